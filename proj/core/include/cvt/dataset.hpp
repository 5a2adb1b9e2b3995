#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cvt/matrix.hpp"

namespace cvt {

/// Tabular classification data. Immutable once built; label ids are dense,
/// assigned in first-appearance order of the label strings.
struct LabeledTable {
    Matrix features; // n_samples x n_features
    std::vector<std::string> feature_names;
    std::vector<int> labels; // one dense id per sample
    std::vector<std::string> class_names;

    std::size_t n_samples() const { return features.rows(); }
    std::size_t n_features() const { return features.cols(); }
    std::size_t n_classes() const { return class_names.size(); }
};

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 7;
};

/// Loads a comma-separated file with a header row. Every non-label column is
/// parsed as a decimal-point real; errors carry the 1-based data row and the
/// column name. Throws DataError.
LabeledTable load_csv(const std::string& path, const std::string& label_column);

/// Class-stratified deterministic split. Train size = round(fraction * n),
/// apportioned per class by largest remainder; per-class order and the final
/// train order are seeded shuffles. Throws DataError when either side would
/// be empty.
std::pair<LabeledTable, LabeledTable> split(const LabeledTable& table, const SplitSpec& spec);

/// Per-feature min-max scaling to [0,1]; constant columns map to 0.
/// Off by default in the pipeline.
LabeledTable normalize_minmax(const LabeledTable& table);

namespace detail {
/// Index sets behind split(); exposed for the disjoint/union property tests.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(const LabeledTable& table, const SplitSpec& spec);
} // namespace detail

} // namespace cvt
