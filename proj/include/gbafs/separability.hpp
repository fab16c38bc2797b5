#pragma once

#include <string>
#include <vector>

#include "gbafs/dataset.hpp"
#include "gbafs/matrix.hpp"

namespace gbafs {

inline constexpr double kVarianceFloor = 1e-10;

/// Per-feature, per-class Gaussian moments (M x C each). Variances are the
/// biased estimate clamped below by the variance floor.
struct ClassStats {
    Matrix mean;
    Matrix variance;

    std::size_t features() const noexcept { return mean.rows(); }
    std::size_t classes() const noexcept { return mean.cols(); }
};

/// Throws DataError if some class has no rows.
ClassStats class_stats(const Dataset& d, double var_floor = kVarianceFloor);

/// Bhattacharyya distance between two univariate Gaussians.
double bhattacharyya(double mean_a, double var_a, double mean_b, double var_b);

/// Jeffries-Matusita distance 2(1 - exp(-B)); lies in [0, 2].
double jeffries_matusita(double mean_a, double var_a, double mean_b, double var_b);

/// C x C pairwise class separability of one feature. Symmetric, zero diagonal.
Matrix jm_matrix(const ClassStats& stats, std::size_t feature);

/// Feature space: row i is the row-major reshape of jm_matrix(i), M x C^2.
struct SeparabilityMatrix {
    Matrix z;
    std::size_t class_count = 0;

    std::size_t features() const noexcept { return z.rows(); }
    double at(std::size_t feature, std::size_t c, std::size_t c_tilde) const {
        return z(feature, c * class_count + c_tilde);
    }
};

SeparabilityMatrix build_feature_space(const Dataset& d);

/// Column headers "pair_<c>_<cTilde>" using the dataset's class identifiers.
std::vector<std::string> feature_space_header(const std::vector<std::string>& class_ids);

}  // namespace gbafs
