#include "gbafs/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gbafs/errors.hpp"
#include "gbafs/parallel.hpp"
#include "gbafs/random.hpp"
#include "gbafs/separability.hpp"

namespace gbafs {

std::vector<std::size_t> RankedFeatures::top(std::size_t k) const {
    if (k > order.size()) throw ConfigError("cannot take more features than were ranked");
    return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k)};
}

RankedFeatures rank_by_score(std::vector<double> scores) {
    RankedFeatures r;
    r.order.resize(scores.size());
    std::iota(r.order.begin(), r.order.end(), std::size_t{0});
    std::stable_sort(r.order.begin(), r.order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    r.scores = std::move(scores);
    return r;
}

RankedFeatures fisher_scores(const Dataset& d) {
    if (d.classes() < 2) throw DataError("Fisher score needs at least 2 classes");
    const Dataset present = d.without_empty_classes();
    const auto stats = class_stats(present);
    const auto counts = present.class_counts();
    std::vector<double> scores(d.features(), 0.0);
    for (std::size_t f = 0; f < d.features(); ++f) {
        double overall = 0.0;
        for (std::size_t r = 0; r < d.rows(); ++r) overall += d.instances(r, f);
        overall /= static_cast<double>(d.rows());
        double between = 0.0;
        double within = 0.0;
        for (std::size_t c = 0; c < present.classes(); ++c) {
            const double n = static_cast<double>(counts[c]);
            const double gap = stats.mean(f, c) - overall;
            between += n * gap * gap;
            within += n * stats.variance(f, c);
        }
        scores[f] = between / within;
    }
    return rank_by_score(std::move(scores));
}

RankedFeatures relieff_weights(const Dataset& d, const ReliefFOptions& options) {
    const std::size_t n = d.rows();
    const std::size_t m = d.features();
    const std::size_t k = options.neighbors;
    if (k < 1) throw ConfigError("ReliefF needs at least one neighbor");
    const auto counts = d.class_counts();
    for (std::size_t c = 0; c < d.classes(); ++c) {
        if (counts[c] > 0 && counts[c] <= k) {
            throw DataError("class '" + d.class_ids[c] + "' has " + std::to_string(counts[c]) +
                            " rows; ReliefF with " + std::to_string(k) + " neighbors needs more");
        }
    }
    const std::size_t samples = options.sample_count == 0 ? n : options.sample_count;
    if (samples > n) throw ConfigError("ReliefF sample count exceeds the number of rows");

    std::vector<double> range(m, 0.0);
    for (std::size_t f = 0; f < m; ++f) {
        double lo = d.instances(0, f), hi = lo;
        for (std::size_t r = 1; r < n; ++r) {
            lo = std::min(lo, d.instances(r, f));
            hi = std::max(hi, d.instances(r, f));
        }
        range[f] = hi - lo;
    }
    auto diff = [&](std::size_t f, std::size_t a, std::size_t b) {
        return range[f] > 0.0 ? std::abs(d.instances(a, f) - d.instances(b, f)) / range[f] : 0.0;
    };

    std::vector<double> prior(d.classes());
    for (std::size_t c = 0; c < d.classes(); ++c) prior[c] = static_cast<double>(counts[c]) / static_cast<double>(n);

    const auto order = shuffled_indices(n, options.seed);
    // Per-sample contributions are computed independently and summed in order.
    Matrix contribution(samples, m);
    parallel_for(samples, [&](std::size_t s) {
        const std::size_t target = order[s];
        const std::size_t own = d.labels[target];
        std::vector<std::pair<double, std::size_t>> by_distance;
        by_distance.reserve(n);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == target) continue;
            double dist = 0.0;
            for (std::size_t f = 0; f < m; ++f) dist += diff(f, target, r);
            by_distance.emplace_back(dist, r);
        }
        std::sort(by_distance.begin(), by_distance.end());

        std::vector<std::size_t> taken(d.classes(), 0);
        auto out = contribution.row(s);
        for (const auto& [dist, r] : by_distance) {
            const std::size_t c = d.labels[r];
            if (taken[c] >= k) continue;
            ++taken[c];
            const double weight = c == own ? -1.0 : prior[c] / (1.0 - prior[own]);
            for (std::size_t f = 0; f < m; ++f) out[f] += weight * diff(f, target, r);
        }
    });

    std::vector<double> weights(m, 0.0);
    const double scale = 1.0 / (static_cast<double>(samples) * static_cast<double>(k));
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t f = 0; f < m; ++f) weights[f] += contribution(s, f) * scale;
    }
    return rank_by_score(std::move(weights));
}

double abs_pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return std::min(1.0, std::abs(sab) / std::sqrt(saa * sbb));
}

namespace {

struct CorrelationTable {
    std::vector<std::vector<double>> columns;
    std::vector<double> label;

    explicit CorrelationTable(const Dataset& d) : label(d.labels.begin(), d.labels.end()) {
        columns.reserve(d.features());
        for (std::size_t f = 0; f < d.features(); ++f) columns.push_back(d.instances.column(f));
    }
    double with_label(std::size_t f) const { return abs_pearson(columns[f], label); }
    double between(std::size_t a, std::size_t b) const { return abs_pearson(columns[a], columns[b]); }
};

}  // namespace

double cfs_merit(const Dataset& d, const std::vector<std::size_t>& subset) {
    if (subset.empty()) return 0.0;
    const CorrelationTable corr(d);
    double sum_cf = 0.0;
    double sum_pairs = 0.0;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        sum_cf += corr.with_label(subset[i]);
        for (std::size_t j = i + 1; j < subset.size(); ++j) sum_pairs += corr.between(subset[i], subset[j]);
    }
    const double k = static_cast<double>(subset.size());
    return sum_cf / std::sqrt(k + 2.0 * sum_pairs);
}

std::vector<std::size_t> cfs_select(const Dataset& d, std::size_t k) {
    const std::size_t m = d.features();
    if (k < 1 || k > m) throw ConfigError("CFS subset size must lie in [1, " + std::to_string(m) + "]");
    const CorrelationTable corr(d);
    std::vector<double> r_cf(m);
    for (std::size_t f = 0; f < m; ++f) r_cf[f] = corr.with_label(f);

    std::vector<std::size_t> selected;
    std::vector<char> used(m, 0);
    std::vector<double> redundancy(m, 0.0);  // sum of r_ff to the selected set
    double sum_cf = 0.0;
    double sum_pairs = 0.0;
    while (selected.size() < k) {
        const double size = static_cast<double>(selected.size() + 1);
        std::size_t best = m;
        double best_merit = -1.0;
        for (std::size_t f = 0; f < m; ++f) {
            if (used[f]) continue;
            const double merit = (sum_cf + r_cf[f]) / std::sqrt(size + 2.0 * (sum_pairs + redundancy[f]));
            if (merit > best_merit) {
                best_merit = merit;
                best = f;
            }
        }
        used[best] = 1;
        selected.push_back(best);
        sum_cf += r_cf[best];
        sum_pairs += redundancy[best];
        if (selected.size() < k) {
            parallel_for(m, [&](std::size_t f) {
                if (!used[f]) redundancy[f] += corr.between(f, best);
            });
        }
    }
    return selected;
}

std::vector<std::size_t> random_select(std::size_t m, std::size_t k, std::uint64_t seed) {
    if (k > m) throw ConfigError("cannot select " + std::to_string(k) + " of " + std::to_string(m) + " features");
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(m - i)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace gbafs
