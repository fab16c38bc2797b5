#include "gbafs/classify.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "gbafs/errors.hpp"
#include "gbafs/parallel.hpp"

namespace gbafs {

std::vector<std::size_t> knn_predict(const Dataset& train, const Dataset& test, const std::vector<std::size_t>& subset,
                                     std::size_t n_neighbors) {
    if (subset.empty()) throw ConfigError("feature subset is empty");
    for (auto f : subset) {
        if (f >= train.features() || f >= test.features()) {
            throw ConfigError("feature index " + std::to_string(f) + " out of range");
        }
    }
    if (n_neighbors < 1 || n_neighbors > train.rows()) {
        throw ConfigError("n_neighbors must lie in [1, " + std::to_string(train.rows()) + "]");
    }

    const Matrix xs = train.instances.select_cols(subset);
    const Matrix qs = test.instances.select_cols(subset);
    const std::size_t n = xs.rows();
    std::vector<std::size_t> pred(qs.rows());
    parallel_for(qs.rows(), [&](std::size_t t) {
        std::vector<std::pair<double, std::size_t>> dist(n);
        const auto q = qs.row(t);
        for (std::size_t r = 0; r < n; ++r) dist[r] = {squared_euclidean(q, xs.row(r)), r};
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(n_neighbors), dist.end());

        std::vector<std::size_t> votes(train.classes(), 0);
        for (std::size_t j = 0; j < n_neighbors; ++j) ++votes[train.labels[dist[j].second]];
        std::size_t best = train.labels[dist[0].second];
        for (std::size_t j = 0; j < n_neighbors; ++j) {
            const std::size_t c = train.labels[dist[j].second];
            if (votes[c] > votes[best]) best = c;
        }
        pred[t] = best;
    });
    return pred;
}

double accuracy(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& truth) {
    if (pred.size() != truth.size()) throw ConfigError("prediction and truth lengths differ");
    if (pred.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double balanced_f(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& truth) {
    if (pred.size() != truth.size()) throw ConfigError("prediction and truth lengths differ");
    if (pred.empty()) return 0.0;
    std::size_t classes = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) classes = std::max({classes, pred[i] + 1, truth[i] + 1});
    std::vector<std::size_t> tp(classes, 0), fp(classes, 0), fn(classes, 0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] == truth[i]) {
            ++tp[pred[i]];
        } else {
            ++fp[pred[i]];
            ++fn[truth[i]];
        }
    }
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        if (tp[c] + fp[c] + fn[c] == 0) continue;
        ++present;
        const double denom = 2.0 * static_cast<double>(tp[c]) + static_cast<double>(fp[c] + fn[c]);
        sum += denom > 0.0 ? 2.0 * static_cast<double>(tp[c]) / denom : 0.0;
    }
    return present > 0 ? sum / static_cast<double>(present) : 0.0;
}

EvalReport evaluate(const Dataset& train, const Dataset& test, const std::vector<std::size_t>& subset,
                    const ClassifierConfig& cfg) {
    EvalReport report;
    report.subset = subset;
    report.classifier = cfg;
    const auto start = std::chrono::steady_clock::now();
    report.predictions = knn_predict(train, test, subset, cfg.n_neighbors);
    const auto stop = std::chrono::steady_clock::now();
    report.predict_time = std::chrono::duration<double>(stop - start).count();
    report.accuracy = accuracy(report.predictions, test.labels);
    report.balanced_f = balanced_f(report.predictions, test.labels);
    return report;
}

}  // namespace gbafs
