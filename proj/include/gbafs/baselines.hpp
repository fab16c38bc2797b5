#pragma once

#include <cstdint>
#include <vector>

#include "gbafs/dataset.hpp"

namespace gbafs {

/// Feature scores with indices sorted by descending score, ties by index.
struct RankedFeatures {
    std::vector<double> scores;
    std::vector<std::size_t> order;

    /// First k entries of `order`.
    std::vector<std::size_t> top(std::size_t k) const;
};

RankedFeatures rank_by_score(std::vector<double> scores);

/// Between-class scatter over within-class scatter per feature.
RankedFeatures fisher_scores(const Dataset& d);

struct ReliefFOptions {
    std::size_t neighbors = 10;
    std::size_t sample_count = 0;  // 0 means every instance
    std::uint64_t seed = 0;
};

/// ReliefF with prior-weighted misses from every other class. Differences are
/// normalized by the feature range and neighbor search uses the sum of those
/// differences. Throws DataError when a class has `neighbors` or fewer rows.
RankedFeatures relieff_weights(const Dataset& d, const ReliefFOptions& options);

/// Greedy forward correlation-based selection of exactly k features.
std::vector<std::size_t> cfs_select(const Dataset& d, std::size_t k);

/// CFS merit k * mean(r_cf) / sqrt(k + k(k-1) * mean(r_ff)) of a subset.
double cfs_merit(const Dataset& d, const std::vector<std::size_t>& subset);

/// Absolute Pearson correlation; 0 when either side has zero variance.
double abs_pearson(std::span<const double> a, std::span<const double> b);

/// Uniform sample of k out of m indices without replacement, ascending.
std::vector<std::size_t> random_select(std::size_t m, std::size_t k, std::uint64_t seed);

}  // namespace gbafs
