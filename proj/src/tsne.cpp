#include "gbafs/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gbafs/errors.hpp"
#include "gbafs/parallel.hpp"
#include "gbafs/random.hpp"

namespace gbafs {
namespace {

constexpr int kMaxBisectionSteps = 50;
constexpr int kMaxBracketSteps = 200;

struct RowFit {
    double perplexity;
    bool converged;
};

// Fills `out` with exp(-beta * (d_j - d_min)) normalized over j != i and
// returns the entropy in bits.
double gaussian_row(std::span<const double> sq_dist, std::size_t self, double beta, std::span<double> out) {
    double d_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sq_dist.size(); ++j) {
        if (j != self) d_min = std::min(d_min, sq_dist[j]);
    }
    double sum = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < sq_dist.size(); ++j) {
        if (j == self) {
            out[j] = 0.0;
            continue;
        }
        const double shifted = sq_dist[j] - d_min;
        const double w = std::exp(-beta * shifted);
        out[j] = w;
        sum += w;
        weighted += shifted * w;
    }
    for (auto& v : out) v /= sum;
    const double entropy_nats = std::log(sum) + beta * weighted / sum;
    return entropy_nats / std::numbers::ln2;
}

RowFit fit_row(std::span<const double> sq_dist, std::size_t self, double perplexity, std::span<double> out) {
    const double target_bits = std::log2(perplexity);
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double best_beta = beta;
    double best_gap = std::numeric_limits<double>::infinity();
    int bisections = 0;

    for (int step = 0; step < kMaxBracketSteps + kMaxBisectionSteps; ++step) {
        const double h = gaussian_row(sq_dist, self, beta, out);
        const double achieved = std::exp2(h);
        const double gap = std::abs(achieved - perplexity);
        if (gap < best_gap) {
            best_gap = gap;
            best_beta = beta;
        }
        if (gap <= kPerplexityTolerance) return {achieved, true};

        const bool bracketed = lo > 0.0 && std::isfinite(hi);
        if (bracketed && ++bisections > kMaxBisectionSteps) break;
        if (h > target_bits) {
            lo = beta;
            beta = std::isfinite(hi) ? 0.5 * (beta + hi) : beta * 2.0;
        } else {
            hi = beta;
            beta = lo > 0.0 ? 0.5 * (beta + lo) : beta * 0.5;
        }
    }
    const double h = gaussian_row(sq_dist, self, best_beta, out);
    return {std::exp2(h), false};
}

void require_finite(const Matrix& m, const char* what) {
    for (double v : m.values()) {
        if (!std::isfinite(v)) throw NumericalError(std::string("non-finite value in ") + what);
    }
}

}  // namespace

void TsneConfig::validate(std::size_t points) const {
    if (points < 3) throw ConfigError("t-SNE needs at least 3 points");
    if (!(perplexity >= 1.0 && perplexity <= static_cast<double>(points - 1))) {
        throw ConfigError("perplexity " + std::to_string(perplexity) + " must lie in [1, " +
                          std::to_string(points - 1) + "] for " + std::to_string(points) + " points");
    }
    if (output_dim < 1) throw ConfigError("output dimension must be at least 1");
    if (iterations < 1) throw ConfigError("iterations must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(early_exaggeration > 0.0)) throw ConfigError("early exaggeration must be positive");
    if (!(momentum_initial >= 0.0 && momentum_initial < 1.0 && momentum_final >= 0.0 && momentum_final < 1.0)) {
        throw ConfigError("momentum values must lie in [0, 1)");
    }
    if (!(init_stddev > 0.0)) throw ConfigError("initialization spread must be positive");
}

AffinityResult conditional_affinities(const Matrix& points, double perplexity) {
    const std::size_t n = points.rows();
    if (n < 2) throw ConfigError("affinities need at least 2 points");
    if (!(perplexity >= 1.0 && perplexity <= static_cast<double>(n - 1))) {
        throw ConfigError("perplexity must lie in [1, M-1]");
    }
    AffinityResult result{Matrix(n, n), std::vector<double>(n, 0.0), {}};
    std::vector<char> converged(n, 1);
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> sq(n);
        for (std::size_t j = 0; j < n; ++j) sq[j] = squared_euclidean(points.row(i), points.row(j));
        const auto fit = fit_row(sq, i, perplexity, result.p.row(i));
        result.achieved_perplexity[i] = fit.perplexity;
        converged[i] = fit.converged ? 1 : 0;
    });
    for (std::size_t i = 0; i < n; ++i) {
        if (!converged[i]) result.unconverged_rows.push_back(i);
    }
    return result;
}

Matrix symmetrize_affinities(const Matrix& p_cond) {
    const std::size_t n = p_cond.rows();
    Matrix p(n, n);
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::max(kAffinityFloor, (p_cond(i, j) + p_cond(j, i)) * scale);
            p(i, j) = v;
            p(j, i) = v;
        }
    }
    return p;
}

namespace {

// Student-t kernel values (1 + |y_i - y_j|^2)^-1 with zero diagonal, plus their total.
std::pair<Matrix, double> student_kernel(const Matrix& coords) {
    const std::size_t n = coords.rows();
    Matrix num(n, n);
    std::vector<double> row_sum(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double v = 1.0 / (1.0 + squared_euclidean(coords.row(i), coords.row(j)));
            num(i, j) = v;
            s += v;
        }
        row_sum[i] = s;
    });
    double total = 0.0;
    for (double s : row_sum) total += s;
    return {std::move(num), total};
}

}  // namespace

Matrix low_dim_affinities(const Matrix& coords) {
    const std::size_t n = coords.rows();
    if (n < 2) throw ConfigError("affinities need at least 2 points");
    auto [q, total] = student_kernel(coords);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) q(i, j) = std::max(kAffinityFloor, q(i, j) / total);
        }
    }
    return q;
}

double kl_divergence(const Matrix& p, const Matrix& q) {
    const std::size_t n = p.rows();
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double pij = std::max(kAffinityFloor, p(i, j));
            const double qij = std::max(kAffinityFloor, q(i, j));
            kl += pij * std::log(pij / qij);
        }
    }
    return kl;
}

namespace {

void gradient_into(const Matrix& p, const Matrix& coords, const Matrix& num, double total, Matrix& grad) {
    const std::size_t n = coords.rows();
    const std::size_t dim = coords.cols();
    parallel_for(n, [&](std::size_t i) {
        auto g = grad.row(i);
        std::fill(g.begin(), g.end(), 0.0);
        const auto yi = coords.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double q = std::max(kAffinityFloor, num(i, j) / total);
            const double w = 4.0 * (p(i, j) - q) * num(i, j);
            const auto yj = coords.row(j);
            for (std::size_t d = 0; d < dim; ++d) g[d] += w * (yi[d] - yj[d]);
        }
    });
}

}  // namespace

Matrix kl_gradient(const Matrix& p, const Matrix& coords) {
    const auto [num, total] = student_kernel(coords);
    Matrix grad(coords.rows(), coords.cols());
    gradient_into(p, coords, num, total, grad);
    return grad;
}

Matrix initial_layout(std::size_t points, const TsneConfig& cfg) {
    Matrix y(points, cfg.output_dim);
    Rng rng(cfg.seed);
    for (auto& v : y.values()) v = cfg.init_stddev * rng.normal();
    return y;
}

Embedding embed(const Matrix& points, const TsneConfig& cfg) {
    cfg.validate(points.rows());
    return embed(points, cfg, initial_layout(points.rows(), cfg));
}

Embedding embed(const Matrix& points, const TsneConfig& cfg, const Matrix& initial) {
    const std::size_t n = points.rows();
    cfg.validate(n);
    if (initial.rows() != n || initial.cols() != cfg.output_dim) {
        throw ConfigError("initial layout must be M x output_dim");
    }
    require_finite(points, "t-SNE input");
    require_finite(initial, "t-SNE initial layout");

    auto affinities = conditional_affinities(points, cfg.perplexity);
    const Matrix p = symmetrize_affinities(affinities.p);
    Matrix p_exaggerated = p;
    for (auto& v : p_exaggerated.values()) v *= cfg.early_exaggeration;

    const std::size_t dim = cfg.output_dim;
    Matrix y = initial;

    Embedding result;
    result.unconverged_rows = std::move(affinities.unconverged_rows);
    result.initial_kl = kl_divergence(p, low_dim_affinities(y));

    Matrix grad(n, dim);
    Matrix update(n, dim);
    Matrix gains(n, dim, 1.0);
    for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
        const bool exaggerating = iter < cfg.exaggeration_iters;
        const auto [num, total] = student_kernel(y);
        gradient_into(exaggerating ? p_exaggerated : p, y, num, total, grad);

        const double momentum = iter < cfg.momentum_switch_iter ? cfg.momentum_initial : cfg.momentum_final;
        auto g = grad.values();
        auto u = update.values();
        auto gain = gains.values();
        auto pos = y.values();
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (!std::isfinite(g[k])) {
                throw NumericalError("non-finite t-SNE gradient at iteration " + std::to_string(iter));
            }
            const bool same_sign = (g[k] > 0.0) == (u[k] > 0.0);
            gain[k] = same_sign ? gain[k] * 0.8 : gain[k] + 0.2;
            gain[k] = std::max(gain[k], cfg.min_gain);
            u[k] = momentum * u[k] - cfg.learning_rate * gain[k] * g[k];
            pos[k] += u[k];
        }

        // Recenter.
        for (std::size_t d = 0; d < dim; ++d) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += y(i, d);
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) y(i, d) -= mean;
        }
    }

    require_finite(y, "t-SNE embedding");
    result.final_kl = kl_divergence(p, low_dim_affinities(y));
    result.coords = std::move(y);
    return result;
}

}  // namespace gbafs
