#include "gbafs/separability.hpp"

#include <algorithm>
#include <cmath>

#include "gbafs/errors.hpp"
#include "gbafs/parallel.hpp"

namespace gbafs {

ClassStats class_stats(const Dataset& d, double var_floor) {
    const std::size_t m = d.features();
    const std::size_t c = d.classes();
    const auto counts = d.class_counts();
    for (std::size_t k = 0; k < c; ++k) {
        if (counts[k] == 0) throw DataError("class '" + d.class_ids[k] + "' has no samples");
    }

    ClassStats stats{Matrix(m, c), Matrix(m, c)};
    parallel_for(m, [&](std::size_t f) {
        std::vector<double> sum(c, 0.0);
        for (std::size_t r = 0; r < d.rows(); ++r) sum[d.labels[r]] += d.instances(r, f);
        for (std::size_t k = 0; k < c; ++k) stats.mean(f, k) = sum[k] / static_cast<double>(counts[k]);

        std::vector<double> sq(c, 0.0);
        for (std::size_t r = 0; r < d.rows(); ++r) {
            const double dev = d.instances(r, f) - stats.mean(f, d.labels[r]);
            sq[d.labels[r]] += dev * dev;
        }
        for (std::size_t k = 0; k < c; ++k) {
            stats.variance(f, k) = std::max(var_floor, sq[k] / static_cast<double>(counts[k]));
        }
    });
    return stats;
}

double bhattacharyya(double mean_a, double var_a, double mean_b, double var_b) {
    const double gap = mean_a - mean_b;
    const double var_sum = var_a + var_b;
    return 0.125 * gap * gap * 2.0 / var_sum + 0.5 * std::log(var_sum / (2.0 * std::sqrt(var_a * var_b)));
}

double jeffries_matusita(double mean_a, double var_a, double mean_b, double var_b) {
    // B >= 0 analytically; rounding in the log term can dip just below.
    const double b = std::max(0.0, bhattacharyya(mean_a, var_a, mean_b, var_b));
    return -2.0 * std::expm1(-b);
}

Matrix jm_matrix(const ClassStats& stats, std::size_t feature) {
    const std::size_t c = stats.classes();
    Matrix jm(c, c);
    for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = a + 1; b < c; ++b) {
            const double v = jeffries_matusita(stats.mean(feature, a), stats.variance(feature, a),
                                               stats.mean(feature, b), stats.variance(feature, b));
            jm(a, b) = v;
            jm(b, a) = v;
        }
    }
    return jm;
}

SeparabilityMatrix build_feature_space(const Dataset& d) {
    const auto stats = class_stats(d);
    const std::size_t c = stats.classes();
    SeparabilityMatrix out{Matrix(d.features(), c * c), c};
    parallel_for(d.features(), [&](std::size_t f) {
        const Matrix jm = jm_matrix(stats, f);
        const auto src = jm.values();
        std::copy(src.begin(), src.end(), out.z.row(f).begin());
    });
    return out;
}

std::vector<std::string> feature_space_header(const std::vector<std::string>& class_ids) {
    std::vector<std::string> header;
    header.reserve(class_ids.size() * class_ids.size());
    for (const auto& a : class_ids) {
        for (const auto& b : class_ids) header.push_back("pair_" + a + "_" + b);
    }
    return header;
}

}  // namespace gbafs
