#pragma once

#include <cstdint>
#include <vector>

#include "gbafs/matrix.hpp"

namespace gbafs {

struct ClusteringResult {
    std::vector<std::size_t> medoids;     // ascending point indices
    std::vector<std::size_t> assignment;  // per point, index into `medoids`
    double cost = 0.0;                    // sum of point-to-medoid distances
    std::vector<double> cost_trace;       // cost after init and after each accepted swap
    std::size_t swap_rounds = 0;

    std::size_t k() const noexcept { return medoids.size(); }
};

/// Seeded D^2 sampling of k distinct point indices from a distance matrix.
/// The first index is uniform. When all remaining weights are zero (every
/// unchosen point duplicates a chosen one) the next index is uniform over the
/// unchosen points.
std::vector<std::size_t> kmeanspp_init(const Matrix& distances, std::size_t k, std::uint64_t seed);

/// Nearest-medoid assignment with ties broken by the lowest medoid index.
/// Each medoid is assigned to its own cluster. `medoids` must be ascending.
ClusteringResult assign_to_medoids(const Matrix& distances, std::vector<std::size_t> medoids);

struct PamOptions {
    std::size_t max_rounds = 300;
    std::size_t restarts = 1;  // seeded k-means++ starts; the cheapest result is kept
};

/// PAM refinement of a k-means++ start: each round applies the best single
/// medoid/non-medoid swap until none lowers the total cost.
ClusteringResult pam_cluster(const Matrix& distances, std::size_t k, std::uint64_t seed, PamOptions options = {});

/// Convenience overload that builds the Euclidean distance matrix of `points`.
ClusteringResult pam_cluster_points(const Matrix& points, std::size_t k, std::uint64_t seed, PamOptions options = {});

}  // namespace gbafs
