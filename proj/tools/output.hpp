#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gbafs/pipeline.hpp"

namespace gbafs::cli {

/// Shortest round-trip decimal text; empty for NaN.
std::string format_number(double v);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Columns k, silhouette, simplified_silhouette, mss. Undefined cells are empty.
std::string curve_csv(const MSSCurve& curve);

/// Columns feature, x, y[, ...], medoid.
std::string embedding_csv(const Matrix& coords, const std::vector<std::string>& names,
                          const std::vector<std::size_t>& medoids);

std::string feature_space_csv(const SeparabilityMatrix& z, const std::vector<std::string>& names,
                              const std::vector<std::string>& class_ids);

/// Line chart of the averaged index curves with the chosen k marked.
std::string curve_svg(const MSSCurve& curve, std::optional<std::size_t> k_marked);

/// Scatter of the first two embedding coordinates; medoids are drawn larger and labeled.
std::string embedding_svg(const Matrix& coords, const std::vector<std::string>& names,
                          const std::vector<std::size_t>& medoids);

}  // namespace gbafs::cli
