#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbafs/matrix.hpp"

namespace gbafs {

/// Labeled instance matrix. `labels[r]` indexes into `class_ids`; class
/// identifiers are opaque strings ordered by first appearance in the source.
struct Dataset {
    Matrix instances;                    // N x M
    std::vector<std::size_t> labels;     // N
    std::vector<std::string> feature_names;  // M
    std::vector<std::string> class_ids;  // C

    std::size_t rows() const noexcept { return instances.rows(); }
    std::size_t features() const noexcept { return instances.cols(); }
    std::size_t classes() const noexcept { return class_ids.size(); }

    /// Throws DataError unless N >= 2, M >= 2, C >= 2 and all labels are valid.
    void validate() const;

    /// Row subset; class metadata is kept even when a class has no rows left.
    Dataset subset_rows(std::span<const std::size_t> rows) const;
    /// Column subset, renaming features accordingly.
    Dataset subset_features(std::span<const std::size_t> features) const;
    /// Drops classes without rows and re-indexes labels.
    Dataset without_empty_classes() const;

    /// Number of rows per class.
    std::vector<std::size_t> class_counts() const;
};

/// Label column chosen by header name or zero-based index.
struct LabelColumn {
    std::string name;
    std::optional<std::size_t> index;

    static LabelColumn by_name(std::string n) { return {std::move(n), std::nullopt}; }
    static LabelColumn by_index(std::size_t i) { return {{}, i}; }
    /// Keeps the text as a name and, when it is a non-negative integer, also as
    /// an index. A matching header name wins over the index reading.
    static LabelColumn parse(const std::string& spec);
};

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label);
Dataset parse_csv(const std::string& text, const LabelColumn& label, const std::string& source = "<memory>");

void write_csv(const std::filesystem::path& path, const Dataset& d, const std::string& label_header = "label");

/// Rescales every column to [0, 1]. Constant columns become all zeros.
Dataset minmax_normalize(const Dataset& d);

struct SplitSpec {
    double train_fraction = 0.75;
    std::size_t fold_count = 5;
    std::uint64_t seed = 0;

    /// Throws ConfigError when the spec cannot be applied to `n` rows.
    void validate(std::size_t n) const;
};

struct RowSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Uniform random row partition with round(train_fraction * N) training rows.
RowSplit split_indices(std::size_t n, const SplitSpec& spec);
std::pair<Dataset, Dataset> split_train_test(const Dataset& d, const SplitSpec& spec);

struct FoldIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

/// Shuffled k-fold partition; validation parts are disjoint and cover all rows.
std::vector<FoldIndices> fold_indices(std::size_t n, const SplitSpec& spec);

struct Fold {
    Dataset train;
    Dataset validation;
};

std::vector<Fold> make_folds(const Dataset& d, const SplitSpec& spec);

}  // namespace gbafs
