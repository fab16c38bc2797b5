#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gbafs/dataset.hpp"
#include "gbafs/kmedoids.hpp"
#include "gbafs/knee.hpp"
#include "gbafs/separability.hpp"
#include "gbafs/tsne.hpp"

namespace gbafs {

struct PipelineConfig {
    TsneConfig tsne;            // tsne.seed is ignored; seeds derive from `seed`
    std::size_t fold_count = 5;
    std::uint64_t seed = 0;
    std::size_t k_max = 0;      // 0 means M
    double knee_sensitivity = 1.0;
    std::size_t knee_smoothing = 0;
    bool reference_indices = true;  // also track silhouette and simplified silhouette
    PamOptions pam;

    void validate() const;
};

/// Cross-validated index curves over k. Undefined entries are NaN.
struct MSSCurve {
    std::vector<std::size_t> ks;
    Matrix fold_values;                    // fold_count x |ks|
    std::vector<double> averaged;          // mean of the defined fold values
    Matrix fold_silhouette;                // empty unless reference indices are on
    Matrix fold_simplified;
    std::vector<double> averaged_silhouette;
    std::vector<double> averaged_simplified;
};

/// Column means skipping NaN entries; NaN when a column has no defined value.
std::vector<double> mean_of_defined(const Matrix& values);

struct SelectionResult {
    std::size_t k_min = 0;
    std::vector<std::size_t> selected_features;  // ascending feature indices
    std::vector<std::string> selected_names;
    SeparabilityMatrix feature_space;            // of the full training set
    Embedding embedding;
    ClusteringResult clustering;                 // final clustering at k_min
    MSSCurve curve;
    KneeResult knee;
    bool knee_fallback = false;
    PipelineConfig config;
    double effective_perplexity = 0.0;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, double>> timings;  // seconds per stage
};

/// Seed of the t-SNE run for a fold; the final run uses fold index = fold_count.
std::uint64_t embedding_seed(const PipelineConfig& cfg, std::size_t fold);
/// Seed of the k-medoids run for a fold and k.
std::uint64_t clustering_seed(const PipelineConfig& cfg, std::size_t fold, std::size_t k);

/// Perplexity actually used for `points` points: the configured value, capped
/// at (points - 1) / 3 (but not below 1). Values near points - 1 force uniform
/// affinities and leave nothing for the embedding to preserve.
double effective_perplexity(const PipelineConfig& cfg, std::size_t points);

struct FoldScores {
    double mss;
    double silhouette;
    double simplified;
};

/// Scores train-fold medoid features on a validation fold. The validation
/// fold's own separability rows are used as the geometry: every feature joins
/// its nearest medoid feature (Euclidean over the C^2 vector) and the indices
/// are evaluated there. `distances` is the pairwise distance matrix of those
/// rows. Undefined values are NaN.
FoldScores score_validation(const Matrix& distances, const std::vector<std::size_t>& medoids, bool reference_indices);

MSSCurve mss_curve_cv(const Dataset& train, const PipelineConfig& cfg, std::vector<std::string>* warnings = nullptr);

SelectionResult select_features(const Dataset& train, const PipelineConfig& cfg);

/// Medoid feature sets of the final embedding for each k in `ks`.
std::vector<std::vector<std::size_t>> medoids_per_k(const SelectionResult& selection, const std::vector<std::size_t>& ks);

}  // namespace gbafs
