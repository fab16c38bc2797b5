#pragma once

#include <optional>
#include <vector>

namespace gbafs {

struct Curve {
    std::vector<double> xs;  // strictly increasing
    std::vector<double> ys;
    std::size_t smoothing_window = 0;  // moving average width; 0 or 1 disables
    double sensitivity = 1.0;

    /// Throws ConfigError unless |xs| = |ys| >= 3, xs strictly increasing and
    /// all values finite.
    void validate() const;
};

enum class CurveShape { ConcaveIncreasing, ConcaveDecreasing, ConvexIncreasing, ConvexDecreasing };

struct KneeResult {
    std::optional<std::size_t> index;  // into xs
    std::optional<double> x;
    CurveShape shape = CurveShape::ConcaveIncreasing;
    /// Normalized, oriented difference curve y - x in original point order.
    std::vector<double> difference;
};

/// Kneedle knee detection: normalize, orient to concave increasing, then
/// accept the first local maximum of the difference curve that falls below
/// its threshold (peak - sensitivity * mean x gap) before the next peak.
KneeResult kneedle(const Curve& c);

/// Index of the largest entry of the difference curve (lowest index on ties).
std::size_t difference_argmax(const KneeResult& r);

}  // namespace gbafs
