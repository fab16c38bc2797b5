#include "gbafs/knee.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gbafs/errors.hpp"

namespace gbafs {
namespace {

std::vector<double> moving_average(const std::vector<double>& ys, std::size_t window) {
    if (window <= 1) return ys;
    const std::size_t half = window / 2;
    const std::size_t n = ys.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        double s = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) s += ys[j];
        out[i] = s / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<double> normalize(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double range = *hi - *lo;
    std::vector<double> out(v.size(), 0.0);
    if (range > 0.0) {
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *lo) / range;
    }
    return out;
}

CurveShape detect_shape(const std::vector<double>& xn, const std::vector<double>& yn) {
    const bool increasing = yn.back() >= yn.front();
    const double slope = yn.back() - yn.front();
    double residual = 0.0;
    for (std::size_t i = 0; i < xn.size(); ++i) residual += yn[i] - (yn.front() + slope * xn[i]);
    const bool concave = residual >= 0.0;
    if (increasing) return concave ? CurveShape::ConcaveIncreasing : CurveShape::ConvexIncreasing;
    return concave ? CurveShape::ConcaveDecreasing : CurveShape::ConvexDecreasing;
}

}  // namespace

void Curve::validate() const {
    if (xs.size() != ys.size()) throw ConfigError("curve xs and ys differ in length");
    if (xs.size() < 3) throw ConfigError("knee detection needs at least 3 points");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw ConfigError("curve values must be finite");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw ConfigError("curve xs must be strictly increasing");
    }
    if (!(sensitivity > 0.0)) throw ConfigError("knee sensitivity must be positive");
}

KneeResult kneedle(const Curve& c) {
    c.validate();
    const std::size_t n = c.xs.size();
    const auto xn = normalize(c.xs);
    const auto yn = normalize(moving_average(c.ys, c.smoothing_window));

    KneeResult result;
    result.shape = detect_shape(xn, yn);
    const bool reverse =
        result.shape == CurveShape::ConcaveDecreasing || result.shape == CurveShape::ConvexIncreasing;
    const bool flip_y = result.shape == CurveShape::ConvexDecreasing || result.shape == CurveShape::ConvexIncreasing;

    // Oriented curve (x', y') is concave increasing; t indexes it, src maps back.
    std::vector<double> xo(n), d(n);
    std::vector<std::size_t> src(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t i = reverse ? n - 1 - t : t;
        src[t] = i;
        xo[t] = reverse ? 1.0 - xn[i] : xn[i];
        const double yo = flip_y ? 1.0 - yn[i] : yn[i];
        d[t] = yo - xo[t];
    }
    result.difference.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) result.difference[src[t]] = d[t];

    auto is_max = [&](std::size_t t) {
        return (t == 0 || d[t] >= d[t - 1]) && (t + 1 == n || d[t] >= d[t + 1]);
    };
    auto is_min = [&](std::size_t t) {
        return (t == 0 || d[t] <= d[t - 1]) && (t + 1 == n || d[t] <= d[t + 1]);
    };

    double mean_gap = 0.0;
    for (std::size_t t = 1; t < n; ++t) mean_gap += xo[t] - xo[t - 1];
    mean_gap = std::abs(mean_gap / static_cast<double>(n - 1));

    std::optional<std::size_t> threshold_index;
    double threshold = 0.0;
    for (std::size_t t = 0; t + 1 < n; ++t) {
        if (is_max(t)) {
            threshold = d[t] - c.sensitivity * mean_gap;
            threshold_index = t;
        }
        if (!threshold_index) continue;
        if (is_min(t)) threshold = 0.0;
        if (d[t + 1] < threshold) {
            result.index = src[*threshold_index];
            result.x = c.xs[*result.index];
            break;
        }
    }
    return result;
}

std::size_t difference_argmax(const KneeResult& r) {
    return static_cast<std::size_t>(std::max_element(r.difference.begin(), r.difference.end()) -
                                    r.difference.begin());
}

}  // namespace gbafs
