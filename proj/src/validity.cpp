#include "gbafs/validity.hpp"

#include <algorithm>
#include <limits>

#include "gbafs/errors.hpp"

namespace gbafs {
namespace {

void require_multiple_clusters(const ClusteringResult& c, std::size_t n) {
    if (c.k() < 2) throw ConfigError("validity indices need at least 2 clusters");
    if (c.assignment.size() != n) throw ConfigError("assignment size does not match point count");
    for (auto a : c.assignment) {
        if (a >= c.k()) throw ConfigError("assignment refers to a missing cluster");
    }
    for (auto m : c.medoids) {
        if (m >= n) throw ConfigError("medoid index out of range");
    }
}

std::vector<std::size_t> cluster_sizes(const ClusteringResult& c) {
    std::vector<std::size_t> sizes(c.k(), 0);
    for (auto a : c.assignment) ++sizes[a];
    return sizes;
}

void finish(IndexReport& r) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < r.per_point.size(); ++i) {
        if (!r.included[i]) continue;
        sum += r.per_point[i];
        ++count;
    }
    if (count > 0) r.aggregate = sum / static_cast<double>(count);
}

// Point-to-medoid distances, one row per point, via dist(i, j).
template <typename Dist>
Matrix medoid_distances(std::size_t n, const ClusteringResult& c, Dist&& dist, std::size_t& evaluations) {
    Matrix d(n, c.k());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < c.k(); ++s) d(i, s) = dist(i, c.medoids[s]);
    }
    evaluations += n * c.k();
    return d;
}

// b(i) of the mean simplified silhouette. All other medoids count, including
// those heading singleton clusters.
double mean_distance_to_other_medoids(std::span<const double> to_medoids, std::size_t own) {
    double sum = 0.0;
    for (std::size_t s = 0; s < to_medoids.size(); ++s) {
        if (s != own) sum += to_medoids[s];
    }
    return sum / static_cast<double>(to_medoids.size() - 1);
}

template <typename Dist>
IndexReport silhouette_impl(std::size_t n, const ClusteringResult& clustering, Dist&& dist) {
    require_multiple_clusters(clustering, n);
    const auto sizes = cluster_sizes(clustering);
    const std::size_t k = clustering.k();

    IndexReport r{std::vector<double>(n, 0.0), std::vector<bool>(n, true), std::nullopt, 0};
    std::vector<double> sum_to(k);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = clustering.assignment[i];
        if (sizes[own] <= 1) continue;
        std::fill(sum_to.begin(), sum_to.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sum_to[clustering.assignment[j]] += dist(i, j);
        }
        r.distance_evaluations += n - 1;
        const double a = sum_to[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < k; ++s) {
            if (s != own && sizes[s] > 0) b = std::min(b, sum_to[s] / static_cast<double>(sizes[s]));
        }
        const double denom = std::max(a, b);
        r.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    finish(r);
    return r;
}

template <typename Dist>
IndexReport simplified_silhouette_impl(std::size_t n, const ClusteringResult& clustering, Dist&& dist) {
    require_multiple_clusters(clustering, n);
    const auto sizes = cluster_sizes(clustering);

    IndexReport r{std::vector<double>(n, 0.0), std::vector<bool>(n, true), std::nullopt, 0};
    const Matrix d = medoid_distances(n, clustering, dist, r.distance_evaluations);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = clustering.assignment[i];
        if (sizes[own] <= 1) continue;
        const double a = d(i, own);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < clustering.k(); ++s) {
            if (s != own) b = std::min(b, d(i, s));
        }
        const double denom = std::max(a, b);
        r.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    finish(r);
    return r;
}

template <typename Dist>
IndexReport mss_impl(std::size_t n, const ClusteringResult& clustering, Dist&& dist) {
    require_multiple_clusters(clustering, n);
    const auto sizes = cluster_sizes(clustering);

    IndexReport r{std::vector<double>(n, 0.0), std::vector<bool>(n, false), std::nullopt, 0};
    const Matrix d = medoid_distances(n, clustering, dist, r.distance_evaluations);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = clustering.assignment[i];
        if (sizes[own] <= 1) continue;
        r.included[i] = true;
        const double a = d(i, own);
        const double b = mean_distance_to_other_medoids(d.row(i), own);
        r.per_point[i] = b > 0.0 ? 1.0 - a / b : 0.0;
    }
    finish(r);
    return r;
}

auto euclidean_rows(const Matrix& points) {
    return [&points](std::size_t i, std::size_t j) { return euclidean(points.row(i), points.row(j)); };
}

auto lookup(const Matrix& distances) {
    if (distances.rows() != distances.cols()) throw ConfigError("distance matrix must be square");
    return [&distances](std::size_t i, std::size_t j) { return distances(i, j); };
}

}  // namespace

IndexReport silhouette(const Matrix& points, const ClusteringResult& clustering) {
    return silhouette_impl(points.rows(), clustering, euclidean_rows(points));
}

IndexReport simplified_silhouette(const Matrix& points, const ClusteringResult& clustering) {
    return simplified_silhouette_impl(points.rows(), clustering, euclidean_rows(points));
}

IndexReport mean_simplified_silhouette(const Matrix& points, const ClusteringResult& clustering) {
    return mss_impl(points.rows(), clustering, euclidean_rows(points));
}

IndexReport silhouette_from_distances(const Matrix& distances, const ClusteringResult& clustering) {
    return silhouette_impl(distances.rows(), clustering, lookup(distances));
}

IndexReport simplified_silhouette_from_distances(const Matrix& distances, const ClusteringResult& clustering) {
    return simplified_silhouette_impl(distances.rows(), clustering, lookup(distances));
}

IndexReport mean_simplified_silhouette_from_distances(const Matrix& distances, const ClusteringResult& clustering) {
    return mss_impl(distances.rows(), clustering, lookup(distances));
}

}  // namespace gbafs
