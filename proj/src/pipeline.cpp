#include "gbafs/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "gbafs/errors.hpp"
#include "gbafs/parallel.hpp"
#include "gbafs/random.hpp"
#include "gbafs/validity.hpp"

namespace gbafs {
namespace {

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double value_or_nan(const std::optional<double>& v) { return v ? *v : kUndefined; }

std::size_t upper_k(const PipelineConfig& cfg, std::size_t features) {
    const std::size_t hi = cfg.k_max == 0 ? features : std::min(cfg.k_max, features);
    if (hi < 2) throw ConfigError("k range [2, k_max] is empty");
    return hi;
}

Embedding embed_features(const SeparabilityMatrix& z, const PipelineConfig& cfg, std::size_t fold,
                         std::vector<std::string>* warnings) {
    TsneConfig tsne = cfg.tsne;
    tsne.seed = embedding_seed(cfg, fold);
    tsne.perplexity = effective_perplexity(cfg, z.features());
    Embedding e = embed(z, tsne);
    if (warnings && !e.unconverged_rows.empty()) {
        warnings->push_back("perplexity search did not converge for " + std::to_string(e.unconverged_rows.size()) +
                            " feature(s) in run " + std::to_string(fold));
    }
    return e;
}

}  // namespace

void PipelineConfig::validate() const {
    if (fold_count < 2) throw ConfigError("fold count must be at least 2");
    if (k_max == 1) throw ConfigError("k_max must be at least 2");
    if (!(knee_sensitivity > 0.0)) throw ConfigError("knee sensitivity must be positive");
    if (!(tsne.perplexity >= 1.0)) throw ConfigError("perplexity must be at least 1");
    if (pam.restarts == 0) throw ConfigError("k-medoids needs at least one restart");
}

std::vector<double> mean_of_defined(const Matrix& values) {
    std::vector<double> out(values.cols(), kUndefined);
    for (std::size_t j = 0; j < values.cols(); ++j) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t f = 0; f < values.rows(); ++f) {
            if (std::isnan(values(f, j))) continue;
            sum += values(f, j);
            ++count;
        }
        if (count > 0) out[j] = sum / static_cast<double>(count);
    }
    return out;
}

std::uint64_t embedding_seed(const PipelineConfig& cfg, std::size_t fold) { return cfg.seed + fold; }

std::uint64_t clustering_seed(const PipelineConfig& cfg, std::size_t fold, std::size_t k) {
    return derive_seed(cfg.seed, 0x6b6d6564ULL + fold, k);
}

double effective_perplexity(const PipelineConfig& cfg, std::size_t points) {
    const double cap = std::max(1.0, static_cast<double>(points - 1) / 3.0);
    return std::min(cfg.tsne.perplexity, cap);
}

FoldScores score_validation(const Matrix& distances, const std::vector<std::size_t>& medoids, bool reference_indices) {
    const ClusteringResult clustering = assign_to_medoids(distances, medoids);
    FoldScores s{value_or_nan(mean_simplified_silhouette_from_distances(distances, clustering).aggregate), kUndefined,
                 kUndefined};
    if (reference_indices) {
        s.silhouette = value_or_nan(silhouette_from_distances(distances, clustering).aggregate);
        s.simplified = value_or_nan(simplified_silhouette_from_distances(distances, clustering).aggregate);
    }
    return s;
}

MSSCurve mss_curve_cv(const Dataset& train, const PipelineConfig& cfg, std::vector<std::string>* warnings) {
    cfg.validate();
    train.validate();
    const std::size_t m = train.features();
    const std::size_t k_hi = upper_k(cfg, m);

    MSSCurve curve;
    for (std::size_t k = 2; k <= k_hi; ++k) curve.ks.push_back(k);
    const std::size_t nk = curve.ks.size();
    curve.fold_values = Matrix(cfg.fold_count, nk, kUndefined);
    if (cfg.reference_indices) {
        curve.fold_silhouette = Matrix(cfg.fold_count, nk, kUndefined);
        curve.fold_simplified = Matrix(cfg.fold_count, nk, kUndefined);
    }

    SplitSpec spec;
    spec.fold_count = cfg.fold_count;
    spec.seed = cfg.seed;
    const auto folds = fold_indices(train.rows(), spec);
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const Dataset part = train.subset_rows(folds[f].train).without_empty_classes();
        const Dataset validation = train.subset_rows(folds[f].validation).without_empty_classes();

        const SeparabilityMatrix z_train = build_feature_space(part);
        const Embedding e = embed_features(z_train, cfg, f, warnings);
        const Matrix embedded = pairwise_distances(e.coords);
        const Matrix validation_distances = pairwise_distances(build_feature_space(validation).z);

        parallel_for(nk, [&](std::size_t j) {
            const std::size_t k = curve.ks[j];
            const auto clustering = pam_cluster(embedded, k, clustering_seed(cfg, f, k), cfg.pam);
            const auto scores = score_validation(validation_distances, clustering.medoids, cfg.reference_indices);
            curve.fold_values(f, j) = scores.mss;
            if (cfg.reference_indices) {
                curve.fold_silhouette(f, j) = scores.silhouette;
                curve.fold_simplified(f, j) = scores.simplified;
            }
        });
    }

    curve.averaged = mean_of_defined(curve.fold_values);
    if (cfg.reference_indices) {
        curve.averaged_silhouette = mean_of_defined(curve.fold_silhouette);
        curve.averaged_simplified = mean_of_defined(curve.fold_simplified);
    }
    return curve;
}

SelectionResult select_features(const Dataset& train, const PipelineConfig& cfg) {
    SelectionResult result;
    result.config = cfg;

    Stopwatch cv_clock;
    result.curve = mss_curve_cv(train, cfg, &result.warnings);
    result.timings.emplace_back("cross_validation", cv_clock.seconds());

    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < result.curve.ks.size(); ++j) {
        if (std::isnan(result.curve.averaged[j])) continue;
        xs.push_back(static_cast<double>(result.curve.ks[j]));
        ys.push_back(result.curve.averaged[j]);
    }
    if (xs.size() >= 3) {
        Curve c{xs, ys, cfg.knee_smoothing, cfg.knee_sensitivity};
        result.knee = kneedle(c);
        if (result.knee.x) {
            result.k_min = static_cast<std::size_t>(*result.knee.x);
        } else {
            result.knee_fallback = true;
            result.k_min = static_cast<std::size_t>(xs[difference_argmax(result.knee)]);
            result.warnings.push_back("no knee found on the averaged MSS curve; using the largest chord difference");
        }
    } else {
        result.knee_fallback = true;
        if (xs.empty()) {
            result.k_min = result.curve.ks.front();
        } else {
            std::size_t best = 0;
            for (std::size_t j = 1; j < ys.size(); ++j) {
                if (ys[j] > ys[best]) best = j;
            }
            result.k_min = static_cast<std::size_t>(xs[best]);
        }
        result.warnings.push_back("averaged MSS curve has fewer than 3 defined points; knee detection skipped");
    }

    Stopwatch space_clock;
    const Dataset full = train.without_empty_classes();
    result.feature_space = build_feature_space(full);
    result.timings.emplace_back("feature_space", space_clock.seconds());

    Stopwatch embed_clock;
    result.effective_perplexity = effective_perplexity(cfg, full.features());
    if (result.effective_perplexity < cfg.tsne.perplexity) {
        result.warnings.push_back("perplexity lowered to " + std::to_string(result.effective_perplexity) + " for " +
                                  std::to_string(full.features()) + " features");
    }
    result.embedding = embed_features(result.feature_space, cfg, cfg.fold_count, &result.warnings);
    result.timings.emplace_back("embedding", embed_clock.seconds());

    Stopwatch cluster_clock;
    result.clustering = pam_cluster(pairwise_distances(result.embedding.coords), result.k_min,
                                    clustering_seed(cfg, cfg.fold_count, result.k_min), cfg.pam);
    result.timings.emplace_back("clustering", cluster_clock.seconds());

    result.selected_features = result.clustering.medoids;
    for (auto f : result.selected_features) result.selected_names.push_back(train.feature_names[f]);
    return result;
}

std::vector<std::vector<std::size_t>> medoids_per_k(const SelectionResult& selection,
                                                    const std::vector<std::size_t>& ks) {
    const Matrix distances = pairwise_distances(selection.embedding.coords);
    std::vector<std::vector<std::size_t>> out(ks.size());
    parallel_for(ks.size(), [&](std::size_t j) {
        const std::size_t fold = selection.config.fold_count;
        out[j] = pam_cluster(distances, ks[j], clustering_seed(selection.config, fold, ks[j]), selection.config.pam)
                     .medoids;
    });
    return out;
}

}  // namespace gbafs
