#include "gbafs/kmedoids.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gbafs/errors.hpp"
#include "gbafs/parallel.hpp"
#include "gbafs/random.hpp"

namespace gbafs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_k(std::size_t k, std::size_t n) {
    if (k < 2) throw ConfigError("k must be at least 2, got " + std::to_string(k));
    if (k > n) throw ConfigError("k = " + std::to_string(k) + " exceeds the number of points " + std::to_string(n));
}

// Nearest and second-nearest medoid slot for every point.
struct NearestCache {
    std::vector<std::size_t> slot;
    std::vector<double> d1;
    std::vector<double> d2;

    void refresh(const Matrix& dist, const std::vector<std::size_t>& medoids) {
        const std::size_t n = dist.rows();
        slot.assign(n, 0);
        d1.assign(n, kInf);
        d2.assign(n, kInf);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t s = 0; s < medoids.size(); ++s) {
                const double d = dist(j, medoids[s]);
                if (d < d1[j]) {
                    d2[j] = d1[j];
                    d1[j] = d;
                    slot[j] = s;
                } else if (d < d2[j]) {
                    d2[j] = d;
                }
            }
        }
    }

    double cost() const {
        double c = 0.0;
        for (double v : d1) c += v;
        return c;
    }
};

struct SwapCandidate {
    double delta = kInf;
    std::size_t slot = 0;
};

}  // namespace

std::vector<std::size_t> kmeanspp_init(const Matrix& distances, std::size_t k, std::uint64_t seed) {
    const std::size_t n = distances.rows();
    check_k(k, n);
    Rng rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    std::vector<char> taken(n, 0);
    std::vector<double> weight(n, kInf);

    auto take = [&](std::size_t idx) {
        chosen.push_back(idx);
        taken[idx] = 1;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = distances(j, idx);
            weight[j] = std::min(weight[j], d * d);
        }
    };

    take(rng.below(n));
    while (chosen.size() < k) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!taken[j]) total += weight[j];
        }
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cumulative = 0.0;
            std::size_t pick = n;
            std::size_t last_positive = n;
            for (std::size_t j = 0; j < n; ++j) {
                if (taken[j] || weight[j] <= 0.0) continue;
                last_positive = j;
                cumulative += weight[j];
                if (cumulative > target) {
                    pick = j;
                    break;
                }
            }
            take(pick < n ? pick : last_positive);
        } else {
            std::vector<std::size_t> rest;
            for (std::size_t j = 0; j < n; ++j) {
                if (!taken[j]) rest.push_back(j);
            }
            take(rest[rng.below(rest.size())]);
        }
    }
    return chosen;
}

ClusteringResult assign_to_medoids(const Matrix& distances, std::vector<std::size_t> medoids) {
    const std::size_t n = distances.rows();
    ClusteringResult result;
    result.assignment.assign(n, 0);
    std::vector<std::ptrdiff_t> medoid_slot(n, -1);
    for (std::size_t s = 0; s < medoids.size(); ++s) medoid_slot[medoids[s]] = static_cast<std::ptrdiff_t>(s);

    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (medoid_slot[i] >= 0) {
            result.assignment[i] = static_cast<std::size_t>(medoid_slot[i]);
            continue;
        }
        std::size_t best = 0;
        double best_d = kInf;
        for (std::size_t s = 0; s < medoids.size(); ++s) {
            const double d = distances(i, medoids[s]);
            if (d < best_d) {
                best_d = d;
                best = s;
            }
        }
        result.assignment[i] = best;
        cost += best_d;
    }
    result.medoids = std::move(medoids);
    result.cost = cost;
    return result;
}

namespace {

ClusteringResult pam_single(const Matrix& distances, std::size_t k, std::uint64_t seed, const PamOptions& options) {
    const std::size_t n = distances.rows();
    std::vector<std::size_t> medoids = kmeanspp_init(distances, k, seed);
    std::vector<char> is_medoid(n, 0);
    for (auto m : medoids) is_medoid[m] = 1;

    NearestCache cache;
    cache.refresh(distances, medoids);
    double cost = cache.cost();
    std::vector<double> trace{cost};
    std::size_t rounds = 0;

    std::vector<SwapCandidate> best_for(n);
    while (rounds < options.max_rounds) {
        // Change in total cost of replacing medoid slot s by candidate o:
        //   sum_j min(d(o,j) - d1_j, 0)
        // + sum_{j in cluster s} [min(d(o,j), d2_j) - d1_j - min(d(o,j) - d1_j, 0)].
        parallel_for(n, [&](std::size_t o) {
            best_for[o] = SwapCandidate{};
            if (is_medoid[o]) return;
            std::vector<double> per_slot(k, 0.0);
            double shared = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double doj = distances(o, j);
                const double gain = std::min(doj - cache.d1[j], 0.0);
                shared += gain;
                per_slot[cache.slot[j]] += std::min(doj, cache.d2[j]) - cache.d1[j] - gain;
            }
            for (std::size_t s = 0; s < k; ++s) {
                const double delta = shared + per_slot[s];
                if (delta < best_for[o].delta) best_for[o] = {delta, s};
            }
        });

        std::size_t best_o = n;
        SwapCandidate best;
        for (std::size_t o = 0; o < n; ++o) {
            if (is_medoid[o]) continue;
            const auto& c = best_for[o];
            if (c.delta < best.delta || (c.delta == best.delta && best_o < n && c.slot < best.slot)) {
                best = c;
                best_o = o;
            }
        }
        const double tolerance = 1e-12 * std::max(1.0, cost);
        if (best_o == n || !(best.delta < -tolerance)) break;

        const std::size_t old = medoids[best.slot];
        medoids[best.slot] = best_o;
        cache.refresh(distances, medoids);
        const double new_cost = cache.cost();
        if (!(new_cost < cost)) {
            medoids[best.slot] = old;
            cache.refresh(distances, medoids);
            break;
        }
        is_medoid[old] = 0;
        is_medoid[best_o] = 1;
        cost = new_cost;
        trace.push_back(cost);
        ++rounds;
    }

    std::sort(medoids.begin(), medoids.end());
    ClusteringResult result = assign_to_medoids(distances, std::move(medoids));
    result.cost_trace = std::move(trace);
    result.swap_rounds = rounds;
    return result;
}

}  // namespace

ClusteringResult pam_cluster(const Matrix& distances, std::size_t k, std::uint64_t seed, PamOptions options) {
    check_k(k, distances.rows());
    if (options.restarts == 0) throw ConfigError("k-medoids needs at least one restart");
    for (double v : distances.values()) {
        if (!std::isfinite(v)) throw NumericalError("non-finite distance in k-medoids input");
    }
    // The first run uses `seed` itself; later runs only replace it when strictly cheaper.
    ClusteringResult best = pam_single(distances, k, seed, options);
    for (std::size_t r = 1; r < options.restarts; ++r) {
        ClusteringResult next = pam_single(distances, k, derive_seed(seed, 0x70616d, r), options);
        if (next.cost < best.cost) best = std::move(next);
    }
    return best;
}

ClusteringResult pam_cluster_points(const Matrix& points, std::size_t k, std::uint64_t seed, PamOptions options) {
    for (double v : points.values()) {
        if (!std::isfinite(v)) throw NumericalError("non-finite coordinate in k-medoids input");
    }
    return pam_cluster(pairwise_distances(points), k, seed, options);
}

}  // namespace gbafs
