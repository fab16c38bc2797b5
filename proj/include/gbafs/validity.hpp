#pragma once

#include <optional>
#include <vector>

#include "gbafs/kmedoids.hpp"
#include "gbafs/matrix.hpp"

namespace gbafs {

/// Per-point coefficients and their mean over the included points. The
/// aggregate is empty when no point is included.
struct IndexReport {
    std::vector<double> per_point;
    std::vector<bool> included;
    std::optional<double> aggregate;
    std::size_t distance_evaluations = 0;
};

/// Rousseeuw silhouette over full pairwise distances. Points in singleton
/// clusters score 0 and stay in the mean.
IndexReport silhouette(const Matrix& points, const ClusteringResult& clustering);

/// Simplified silhouette: own medoid versus nearest other medoid. Points in
/// singleton clusters score 0 and stay in the mean.
IndexReport simplified_silhouette(const Matrix& points, const ClusteringResult& clustering);

/// Mean simplified silhouette: mss(i) = 1 - a(i)/b(i), where a(i) is the
/// distance to the own medoid and b(i) the mean distance to all other
/// medoids. Points of singleton clusters are left out of the aggregate but
/// their medoids still count in every b(i). b(i) = 0 gives mss(i) = 0.
/// Evaluates exactly M*k point-to-medoid distances.
IndexReport mean_simplified_silhouette(const Matrix& points, const ClusteringResult& clustering);

// Same indices over a precomputed symmetric distance matrix between points.
IndexReport silhouette_from_distances(const Matrix& distances, const ClusteringResult& clustering);
IndexReport simplified_silhouette_from_distances(const Matrix& distances, const ClusteringResult& clustering);
IndexReport mean_simplified_silhouette_from_distances(const Matrix& distances, const ClusteringResult& clustering);

}  // namespace gbafs
