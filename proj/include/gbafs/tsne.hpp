#pragma once

#include <cstdint>
#include <vector>

#include "gbafs/matrix.hpp"
#include "gbafs/separability.hpp"

namespace gbafs {

inline constexpr double kAffinityFloor = 1e-12;
inline constexpr double kPerplexityTolerance = 1e-5;

/// Exact t-SNE settings. Defaults follow the usual recommendations for
/// the method: 1000 iterations, perplexity 30, early exaggeration 4 for the
/// first 100 iterations, momentum 0.5 then 0.8 from iteration 250.
struct TsneConfig {
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    std::size_t output_dim = 2;
    double learning_rate = 200.0;
    double early_exaggeration = 4.0;
    std::size_t exaggeration_iters = 100;
    double momentum_initial = 0.5;
    double momentum_final = 0.8;
    std::size_t momentum_switch_iter = 250;
    double init_stddev = 1e-2;  // variance 1e-4
    double min_gain = 0.01;
    std::uint64_t seed = 0;

    /// Throws ConfigError when the settings cannot embed `points` points.
    void validate(std::size_t points) const;
};

struct AffinityResult {
    Matrix p;                                 // row-stochastic, zero diagonal
    std::vector<double> achieved_perplexity;  // 2^H(P_i) per row
    std::vector<std::size_t> unconverged_rows;
};

/// Gaussian conditional affinities p_{j|i}; each row's bandwidth is found by
/// bisection so that its perplexity matches the target within tolerance.
/// Rows that cannot be matched keep the closest bracket endpoint and are
/// listed in `unconverged_rows`.
AffinityResult conditional_affinities(const Matrix& points, double perplexity);

/// p_ij = (p_{j|i} + p_{i|j}) / 2M with off-diagonal entries floored.
Matrix symmetrize_affinities(const Matrix& p_cond);

/// Student-t affinities q_ij of embedded points, off-diagonal entries floored.
Matrix low_dim_affinities(const Matrix& coords);

/// Sum over i != j of p_ij ln(p_ij / q_ij).
double kl_divergence(const Matrix& p, const Matrix& q);

/// Analytic gradient of kl_divergence(p, low_dim_affinities(coords)).
Matrix kl_gradient(const Matrix& p, const Matrix& coords);

struct Embedding {
    Matrix coords;  // M x R
    double initial_kl = 0.0;
    double final_kl = 0.0;
    std::vector<std::size_t> unconverged_rows;
};

Embedding embed(const Matrix& points, const TsneConfig& cfg);
/// Starts from `initial` (M x output_dim) instead of a seeded Gaussian draw.
Embedding embed(const Matrix& points, const TsneConfig& cfg, const Matrix& initial);
/// The seeded Gaussian starting layout used by embed().
Matrix initial_layout(std::size_t points, const TsneConfig& cfg);
inline Embedding embed(const SeparabilityMatrix& z, const TsneConfig& cfg) { return embed(z.z, cfg); }

}  // namespace gbafs
