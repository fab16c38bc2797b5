#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>

#include "gbafs/errors.hpp"
#include "gbafs/knee.hpp"
#include "oracles.hpp"

using namespace gbafs;

namespace {

std::vector<double> range(double from, double to) {
    std::vector<double> xs;
    for (double x = from; x <= to; x += 1.0) xs.push_back(x);
    return xs;
}

}  // namespace

TEST_SUITE("knee") {
    TEST_CASE("five point example") {
        const Curve c{range(0, 4), {0, 0.7, 0.9, 0.97, 1.0}};
        const auto r = kneedle(c);
        CHECK(r.shape == CurveShape::ConcaveIncreasing);
        REQUIRE(r.x);
        CHECK(*r.x == 1.0);
        CHECK(*r.index == 1);
        const std::vector<double> expected{0.0, 0.45, 0.4, 0.22, 0.0};
        for (std::size_t i = 0; i < 5; ++i) CHECK(r.difference[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }

    // Reference knees from an established kneedle implementation, each with
    // the curve shape passed explicitly there and detected here.
    TEST_CASE("reference curves") {
        struct Case {
            std::vector<double> xs, ys;
            CurveShape shape;
            double knee;
        };
        const std::vector<Case> cases{
            {range(2, 15),
             {0.2, 0.45, 0.6, 0.68, 0.72, 0.74, 0.75, 0.755, 0.76, 0.762, 0.765, 0.766, 0.767, 0.768},
             CurveShape::ConcaveIncreasing, 5},
            {range(1, 10), {100, 60, 35, 22, 15, 12, 10, 9, 8.5, 8.2}, CurveShape::ConvexDecreasing, 4},
            {range(1, 10), {1, 1.2, 1.5, 2, 2.8, 4, 6, 9, 14, 22}, CurveShape::ConvexIncreasing, 7},
            {range(1, 10), {10, 9.8, 9.5, 9, 8.2, 7, 5, 2, -3, -10}, CurveShape::ConcaveDecreasing, 7},
        };
        for (const auto& c : cases) {
            const auto r = kneedle(Curve{c.xs, c.ys});
            CHECK(r.shape == c.shape);
            REQUIRE(r.x);
            CHECK(*r.x == c.knee);
        }
    }

    TEST_CASE("a straight line has no knee") {
        const auto r = kneedle(Curve{range(2, 20), range(2, 20)});
        CHECK_FALSE(r.index.has_value());
        CHECK_FALSE(r.x.has_value());
    }

    TEST_CASE("mirrored curves give the same knee") {
        const std::vector<double> xs = range(2, 15);
        const std::vector<double> ys{0.2, 0.45, 0.6, 0.68, 0.72, 0.74, 0.75, 0.755, 0.76, 0.762, 0.765, 0.766, 0.767,
                                     0.768};
        const auto base = kneedle(Curve{xs, ys});
        REQUIRE(base.x);

        // Flipping y turns the curve convex decreasing.
        std::vector<double> flipped(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) flipped[i] = -ys[i];
        const auto r = kneedle(Curve{xs, flipped});
        CHECK(r.shape == CurveShape::ConvexDecreasing);
        REQUIRE(r.x);
        CHECK(*r.x == *base.x);
    }

    TEST_CASE("positive affine maps of y keep the knee") {
        const std::vector<double> xs = range(1, 10);
        const std::vector<double> ys{100, 60, 35, 22, 15, 12, 10, 9, 8.5, 8.2};
        const auto base = kneedle(Curve{xs, ys});
        for (double a : {0.001, 3.0, 250.0}) {
            for (double b : {-40.0, 0.0, 7.5}) {
                std::vector<double> mapped(ys.size());
                for (std::size_t i = 0; i < ys.size(); ++i) mapped[i] = a * ys[i] + b;
                const auto r = kneedle(Curve{xs, mapped});
                REQUIRE(r.x);
                CHECK(*r.x == *base.x);
            }
        }
    }

    TEST_CASE("knee is one of the supplied xs") {
        const std::vector<double> xs{2, 3, 5, 8, 13, 21, 34};
        const std::vector<double> ys{0.1, 0.5, 0.7, 0.8, 0.85, 0.87, 0.88};
        const auto r = kneedle(Curve{xs, ys});
        REQUIRE(r.x);
        CHECK(std::find(xs.begin(), xs.end(), *r.x) != xs.end());
        CHECK(xs[*r.index] == *r.x);
    }

    TEST_CASE("difference argmax agrees with a chord oracle") {
        for (double p : {0.2, 0.35, 0.5}) {
            std::vector<double> xs = range(2, 30), ys;
            for (double x : xs) ys.push_back(std::pow(x - 1.0, p));
            const auto r = kneedle(Curve{xs, ys});
            CHECK(difference_argmax(r) == testing::chord_difference_argmax(xs, ys));
        }
    }

    TEST_CASE("smoothing keeps the knee on a noisy curve") {
        const std::vector<double> xs = range(2, 25);
        std::vector<double> ys;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double wiggle = (i % 2 == 0 ? 1.0 : -1.0) * 0.004;
            ys.push_back(1.0 - std::exp(-(xs[i] - 2.0) / 2.0) + wiggle);
        }
        Curve c{xs, ys};
        c.smoothing_window = 3;
        const auto r = kneedle(c);
        REQUIRE(r.x);
        CHECK(*r.x >= 3.0);
        CHECK(*r.x <= 7.0);
    }

    TEST_CASE("higher sensitivity never picks an earlier knee") {
        const std::vector<double> xs = range(2, 25);
        std::vector<double> ys;
        for (double x : xs) ys.push_back(std::log(x));
        std::optional<double> previous;
        for (double s : {0.5, 1.0, 2.0, 4.0}) {
            Curve c{xs, ys};
            c.sensitivity = s;
            const auto r = kneedle(c);
            if (!r.x) continue;
            if (previous) CHECK(*r.x >= *previous);
            previous = r.x;
        }
    }

    TEST_CASE("invalid curves") {
        CHECK_THROWS_AS(kneedle(Curve{{1, 2}, {1, 2}}), ConfigError);
        CHECK_THROWS_AS(kneedle(Curve{{1, 2, 3}, {1, 2}}), ConfigError);
        CHECK_THROWS_AS(kneedle(Curve{{1, 3, 2}, {1, 2, 3}}), ConfigError);
        CHECK_THROWS_AS(kneedle(Curve{{1, 2, 3}, {1, std::nan(""), 3}}), ConfigError);
        Curve c{{1, 2, 3}, {1, 2, 3}};
        c.sensitivity = 0.0;
        CHECK_THROWS_AS(kneedle(c), ConfigError);
    }
}
