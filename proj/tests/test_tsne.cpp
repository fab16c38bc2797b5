#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gbafs/errors.hpp"
#include "gbafs/parallel.hpp"
#include "gbafs/tsne.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace gbafs;

namespace {

double total(const Matrix& m) {
    double s = 0.0;
    for (double v : m.values()) s += v;
    return s;
}

// Affinities of three well-separated groups of feature rows.
Matrix three_cluster_rows(std::size_t per_cluster, std::uint64_t seed) {
    return testing::make_blobs(3, per_cluster, 9, 0.05, 2.0, seed);
}

}  // namespace

TEST_SUITE("tsne") {
    TEST_CASE("two points have one neighbor each") {
        const auto a = conditional_affinities(Matrix::from_rows({{0, 0}, {1, 1}}), 1.0);
        CHECK(a.p(0, 1) == 1.0);
        CHECK(a.p(1, 0) == 1.0);
        CHECK(a.p(0, 0) == 0.0);
        const Matrix p = symmetrize_affinities(a.p);
        CHECK(p(0, 1) == 0.5);
        CHECK(p(1, 0) == 0.5);
        CHECK(total(p) == 1.0);
    }

    TEST_CASE("equidistant points give uniform rows") {
        // Vertices of a regular simplex: unit vectors in R^5.
        Matrix pts(5, 5);
        for (std::size_t i = 0; i < 5; ++i) pts(i, i) = 1.0;
        const auto a = conditional_affinities(pts, 4.0);
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) {
                if (i != j) CHECK(a.p(i, j) == doctest::Approx(0.25).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("achieved perplexity matches the target") {
        const Matrix pts = testing::random_points(20, 4, 5);
        for (double perplexity : {2.0, 5.0, 10.0, 15.0}) {
            const auto a = conditional_affinities(pts, perplexity);
            CHECK(a.unconverged_rows.empty());
            for (std::size_t i = 0; i < 20; ++i) {
                double row_sum = 0.0;
                for (double v : a.p.row(i)) row_sum += v;
                CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(std::abs(testing::row_perplexity(a.p.row(i)) - perplexity) <= 1e-5);
            }
        }
    }

    TEST_CASE("unreachable perplexity is reported, not thrown") {
        // Rows 0..3 coincide, so row 0 cannot reach a perplexity below 3.
        Matrix pts(6, 1);
        pts(4, 0) = 1.0;
        pts(5, 0) = 2.0;
        const auto a = conditional_affinities(pts, 1.5);
        CHECK(std::find(a.unconverged_rows.begin(), a.unconverged_rows.end(), 0) != a.unconverged_rows.end());
        for (double v : a.p.values()) CHECK(std::isfinite(v));
    }

    TEST_CASE("invalid perplexity is rejected") {
        const Matrix pts = testing::random_points(5, 2, 1);
        CHECK_THROWS_AS(conditional_affinities(pts, 5.0), ConfigError);
        CHECK_THROWS_AS(conditional_affinities(pts, 0.5), ConfigError);
    }

    TEST_CASE("symmetrized affinities") {
        const Matrix pts = testing::random_points(30, 3, 8);
        const Matrix p = symmetrize_affinities(conditional_affinities(pts, 8.0).p);
        for (std::size_t i = 0; i < 30; ++i) {
            CHECK(p(i, i) == 0.0);
            for (std::size_t j = 0; j < 30; ++j) CHECK(p(i, j) == p(j, i));
        }
        CHECK(total(p) == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("low dimensional affinities") {
        const Matrix two = Matrix::from_rows({{0.3, -1.0}, {2.0, 5.0}});
        const Matrix q2 = low_dim_affinities(two);
        CHECK(q2(0, 1) == 0.5);
        CHECK(q2(1, 0) == 0.5);

        const double h = std::sqrt(3.0) / 2.0;
        const Matrix q3 = low_dim_affinities(Matrix::from_rows({{0, 0}, {1, 0}, {0.5, h}}));
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                if (i != j) CHECK(q3(i, j) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
            }
        }

        const Matrix q10 = low_dim_affinities(testing::random_points(10, 2, 3, 5.0));
        CHECK(total(q10) == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("kl divergence values") {
        const Matrix p = Matrix::from_rows({{0, 0.5}, {0.5, 0}});
        CHECK(kl_divergence(p, p) == 0.0);
        const Matrix q = Matrix::from_rows({{0, 0.25}, {0.75, 0}});
        CHECK(kl_divergence(p, q) == doctest::Approx(0.14384103622589042).epsilon(1e-14));
    }

    TEST_CASE("kl divergence is non-negative") {
        Rng rng(11);
        for (int t = 0; t < 100; ++t) {
            const std::size_t n = 3 + rng.below(6);
            auto random_affinity = [&] {
                Matrix m(n, n);
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        if (i == j) continue;
                        m(i, j) = rng.uniform() + kAffinityFloor;
                        s += m(i, j);
                    }
                }
                for (auto& v : m.values()) v /= s;
                return m;
            };
            const Matrix p = random_affinity();
            const Matrix q = random_affinity();
            CHECK(kl_divergence(p, q) >= 0.0);
        }
    }

    TEST_CASE("analytic gradient matches finite differences") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const Matrix high = testing::random_points(6, 4, seed);
            const Matrix p = symmetrize_affinities(conditional_affinities(high, 3.0).p);
            const Matrix y = testing::random_points(6, 2, seed + 100, 2.0);
            const Matrix analytic = kl_gradient(p, y);
            const Matrix numeric = testing::finite_difference_gradient(
                [&](const Matrix& coords) { return kl_divergence(p, low_dim_affinities(coords)); }, y);
            double diff = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < analytic.values().size(); ++i) {
                diff = std::max(diff, std::abs(analytic.values()[i] - numeric.values()[i]));
                scale = std::max(scale, std::abs(numeric.values()[i]));
            }
            CHECK(diff / scale < 1e-4);
        }
    }

    TEST_CASE("embedding shape, determinism and KL decrease") {
        const auto g = testing::make_grouped({.classes = 5, .rows_per_class = 20, .groups = 10, .copies = 5,
                                              .seed = 3});
        const auto z = build_feature_space(minmax_normalize(g.data));
        REQUIRE(z.features() == 50);
        TsneConfig cfg;
        cfg.iterations = 300;
        cfg.seed = 99;
        const auto e1 = embed(z, cfg);
        const auto e2 = embed(z, cfg);
        CHECK(e1.coords.rows() == 50);
        CHECK(e1.coords.cols() == 2);
        CHECK(e1.coords == e2.coords);
        CHECK(e1.final_kl < e1.initial_kl);
        for (double v : e1.coords.values()) CHECK(std::isfinite(v));
    }

    TEST_CASE("thread count does not change the embedding") {
        const Matrix rows = three_cluster_rows(10, 4);
        TsneConfig cfg;
        cfg.perplexity = 5.0;
        cfg.iterations = 150;
        cfg.seed = 5;
        set_max_threads(1);
        const auto serial = embed(rows, cfg);
        set_max_threads(4);
        const auto threaded = embed(rows, cfg);
        set_max_threads(0);
        CHECK(serial.coords == threaded.coords);
    }

    TEST_CASE("three clusters separate in the embedding") {
        const Matrix rows = three_cluster_rows(12, 6);
        TsneConfig cfg;
        cfg.perplexity = 8.0;
        cfg.seed = 7;
        const auto e = embed(rows, cfg);
        CHECK(e.final_kl < e.initial_kl);
        // Every point's nearest embedded neighbor comes from its own cluster.
        for (std::size_t i = 0; i < 36; ++i) {
            std::size_t nearest = i == 0 ? 1 : 0;
            for (std::size_t j = 0; j < 36; ++j) {
                if (j == i) continue;
                if (squared_euclidean(e.coords.row(i), e.coords.row(j)) <
                    squared_euclidean(e.coords.row(i), e.coords.row(nearest))) {
                    nearest = j;
                }
            }
            CHECK(nearest / 12 == i / 12);
        }
    }

    TEST_CASE("permuting rows permutes the embedding") {
        const Matrix rows = three_cluster_rows(8, 12);
        const std::size_t n = rows.rows();
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng rng(3);
        rng.shuffle(std::span<std::size_t>(perm));

        // Only the first iterations: beyond that, summation order differences
        // are amplified and the runs drift apart as any chaotic system would.
        TsneConfig cfg;
        cfg.perplexity = 6.0;
        cfg.seed = 21;
        cfg.iterations = 40;
        const Matrix init = initial_layout(n, cfg);
        const auto e = embed(rows, cfg, init);
        const auto ep = embed(rows.select_rows(perm), cfg, init.select_rows(perm));
        const Matrix d = pairwise_distances(e.coords);
        const Matrix dp = pairwise_distances(ep.coords);
        double worst = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                worst = std::max(worst, std::abs(dp(i, j) - d(perm[i], perm[j])));
                scale = std::max(scale, d(i, j));
            }
        }
        CHECK(worst <= 1e-6 * scale);
    }

    TEST_CASE("config validation") {
        TsneConfig cfg;
        CHECK_THROWS_AS(cfg.validate(2), ConfigError);
        CHECK_THROWS_AS(cfg.validate(30), ConfigError);  // perplexity 30 needs M >= 31
        CHECK_NOTHROW(cfg.validate(31));
        cfg.output_dim = 0;
        CHECK_THROWS_AS(cfg.validate(100), ConfigError);
    }
}
