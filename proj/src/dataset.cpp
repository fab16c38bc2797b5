#include "gbafs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "gbafs/errors.hpp"
#include "gbafs/random.hpp"

namespace gbafs {
namespace {

// Splits RFC-4180 text into records of fields. Quoted fields may contain
// separators, doubled quotes and line breaks. Blank lines are skipped.
struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

std::vector<CsvRecord> split_records(const std::string& text, const std::string& source) {
    std::vector<CsvRecord> records;
    CsvRecord current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = line;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = current.fields.size() == 1 && current.fields[0].empty();
        if (!blank) records.push_back(std::move(current));
        current = CsvRecord{};
    };

    std::size_t i = 0;
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
    for (; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (field_started && !field.empty()) {
                    throw DataError(source + ": line " + std::to_string(line) + ": stray quote in unquoted field");
                }
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                ++line;
                current.line = line;
                break;
            default:
                field.push_back(ch);
                field_started = true;
        }
    }
    if (in_quotes) throw DataError(source + ": unterminated quoted field");
    if (field_started || !current.fields.empty()) end_record();
    return records;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace

void Dataset::validate() const {
    if (rows() < 2) throw DataError("dataset needs at least 2 rows, got " + std::to_string(rows()));
    if (features() < 2) throw DataError("dataset needs at least 2 features, got " + std::to_string(features()));
    if (classes() < 2) throw DataError("fewer than 2 classes");
    if (labels.size() != rows()) throw DataError("label count does not match row count");
    if (feature_names.size() != features()) throw DataError("feature name count does not match column count");
    for (auto l : labels) {
        if (l >= classes()) throw DataError("label index out of range");
    }
}

Dataset Dataset::subset_rows(std::span<const std::size_t> rows) const {
    Dataset out;
    out.instances = instances.select_rows(rows);
    out.labels.reserve(rows.size());
    for (auto r : rows) out.labels.push_back(labels[r]);
    out.feature_names = feature_names;
    out.class_ids = class_ids;
    return out;
}

Dataset Dataset::subset_features(std::span<const std::size_t> features) const {
    Dataset out;
    out.instances = instances.select_cols(features);
    out.labels = labels;
    for (auto f : features) out.feature_names.push_back(feature_names[f]);
    out.class_ids = class_ids;
    return out;
}

Dataset Dataset::without_empty_classes() const {
    const auto counts = class_counts();
    std::vector<std::size_t> remap(classes(), 0);
    Dataset out;
    for (std::size_t c = 0; c < classes(); ++c) {
        if (counts[c] == 0) continue;
        remap[c] = out.class_ids.size();
        out.class_ids.push_back(class_ids[c]);
    }
    out.instances = instances;
    out.feature_names = feature_names;
    out.labels.reserve(labels.size());
    for (auto l : labels) out.labels.push_back(remap[l]);
    return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(classes(), 0);
    for (auto l : labels) ++counts[l];
    return counts;
}

LabelColumn LabelColumn::parse(const std::string& spec) {
    LabelColumn col{spec, std::nullopt};
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), idx);
    if (ec == std::errc{} && ptr == spec.data() + spec.size() && !spec.empty()) col.index = idx;
    return col;
}

Dataset parse_csv(const std::string& text, const LabelColumn& label, const std::string& source) {
    const auto records = split_records(text, source);
    if (records.empty()) throw DataError(source + ": missing header row");

    const auto& header = records.front().fields;
    std::optional<std::size_t> label_col;
    if (!label.name.empty()) {
        const auto it = std::find(header.begin(), header.end(), label.name);
        if (it != header.end()) label_col = static_cast<std::size_t>(it - header.begin());
    }
    if (!label_col && label.index && *label.index < header.size()) label_col = *label.index;
    if (!label_col) {
        const std::string what = label.name.empty() ? std::to_string(label.index.value_or(0)) : label.name;
        throw DataError(source + ": label column '" + what + "' not found");
    }

    Dataset d;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == *label_col) continue;
        feature_cols.push_back(c);
        d.feature_names.push_back(std::string(trim(header[c])));
    }

    const std::size_t n = records.size() - 1;
    d.instances = Matrix(n, feature_cols.size());
    d.labels.reserve(n);
    std::unordered_map<std::string, std::size_t> class_index;
    for (std::size_t r = 0; r < n; ++r) {
        const auto& rec = records[r + 1];
        if (rec.fields.size() != header.size()) {
            throw DataError(source + ": line " + std::to_string(rec.line) + ": expected " +
                            std::to_string(header.size()) + " fields, got " + std::to_string(rec.fields.size()));
        }
        for (std::size_t j = 0; j < feature_cols.size(); ++j) {
            const auto& cell = rec.fields[feature_cols[j]];
            const auto value = parse_real(cell);
            if (!value) {
                throw DataError(source + ": line " + std::to_string(rec.line) + ", column '" + d.feature_names[j] +
                                "': cannot parse '" + cell + "' as a number");
            }
            d.instances(r, j) = *value;
        }
        const std::string cls(trim(rec.fields[*label_col]));
        auto [it, inserted] = class_index.try_emplace(cls, d.class_ids.size());
        if (inserted) d.class_ids.push_back(cls);
        d.labels.push_back(it->second);
    }

    if (d.class_ids.size() < 2) throw DataError(source + ": fewer than 2 classes");
    d.validate();
    return d;
}

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), label, path.string());
}

void write_csv(const std::filesystem::path& path, const Dataset& d, const std::string& label_header) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path.string());
    for (const auto& name : d.feature_names) out << quote_if_needed(name) << ',';
    out << quote_if_needed(label_header) << '\n';
    char buf[32];
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t c = 0; c < d.features(); ++c) {
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d.instances(r, c));
            out.write(buf, ptr - buf);
            out << ',';
        }
        out << quote_if_needed(d.class_ids[d.labels[r]]) << '\n';
    }
}

Dataset minmax_normalize(const Dataset& d) {
    Dataset out = d;
    const std::size_t n = d.rows();
    for (std::size_t c = 0; c < d.features(); ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t r = 0; r < n; ++r) {
            lo = std::min(lo, d.instances(r, c));
            hi = std::max(hi, d.instances(r, c));
        }
        const double range = hi - lo;
        for (std::size_t r = 0; r < n; ++r) {
            out.instances(r, c) = range > 0.0 ? (d.instances(r, c) - lo) / range : 0.0;
        }
    }
    return out;
}

void SplitSpec::validate(std::size_t n) const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train fraction must lie in (0, 1)");
    if (fold_count < 2) throw ConfigError("fold count must be at least 2");
    if (train_fraction * static_cast<double>(n) < static_cast<double>(fold_count)) {
        throw ConfigError("training split of " + std::to_string(n) + " rows is too small for " +
                          std::to_string(fold_count) + " folds");
    }
}

RowSplit split_indices(std::size_t n, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw ConfigError("train fraction must lie in (0, 1)");
    }
    const auto train_n = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
    if (train_n == 0 || train_n >= n) {
        throw ConfigError("train/test split of " + std::to_string(n) + " rows leaves an empty side");
    }
    const auto order = shuffled_indices(n, spec.seed);
    RowSplit split;
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_n));
    split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(train_n), order.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, const SplitSpec& spec) {
    const auto split = split_indices(d.rows(), spec);
    return {d.subset_rows(split.train), d.subset_rows(split.test)};
}

std::vector<FoldIndices> fold_indices(std::size_t n, const SplitSpec& spec) {
    if (spec.fold_count < 2) throw ConfigError("fold count must be at least 2");
    if (spec.fold_count > n) {
        throw ConfigError("fold count " + std::to_string(spec.fold_count) + " exceeds row count " + std::to_string(n));
    }
    const auto order = shuffled_indices(n, derive_seed(spec.seed, 0xf01d));
    const std::size_t k = spec.fold_count;
    std::vector<FoldIndices> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t begin = f * n / k;
        const std::size_t end = (f + 1) * n / k;
        for (std::size_t i = 0; i < n; ++i) {
            auto& part = (i >= begin && i < end) ? folds[f].validation : folds[f].train;
            part.push_back(order[i]);
        }
        std::sort(folds[f].train.begin(), folds[f].train.end());
        std::sort(folds[f].validation.begin(), folds[f].validation.end());
    }
    return folds;
}

std::vector<Fold> make_folds(const Dataset& d, const SplitSpec& spec) {
    std::vector<Fold> folds;
    for (const auto& idx : fold_indices(d.rows(), spec)) {
        folds.push_back({d.subset_rows(idx.train), d.subset_rows(idx.validation)});
    }
    return folds;
}

}  // namespace gbafs
