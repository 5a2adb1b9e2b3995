#include "cvt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cvt/csv.hpp"
#include "cvt/errors.hpp"
#include "cvt/rng.hpp"

namespace cvt {

LabeledTable load_csv(const std::string& path, const std::string& label_column) {
    const std::string text = read_text_file(path);
    const CsvDocument doc = parse_csv(text, path);

    std::size_t label_idx = doc.header.size();
    for (std::size_t i = 0; i < doc.header.size(); ++i) {
        if (doc.header[i] == label_column) {
            label_idx = i;
            break;
        }
    }
    if (label_idx == doc.header.size())
        throw DataError(path + ": label column '" + label_column + "' not found in header");
    if (doc.header.size() < 2)
        throw DataError(path + ": no feature columns besides label column");
    if (doc.rows.empty()) throw DataError(path + ": no data rows");

    LabeledTable table;
    for (std::size_t i = 0; i < doc.header.size(); ++i)
        if (i != label_idx) table.feature_names.push_back(doc.header[i]);

    const std::size_t n = doc.rows.size();
    const std::size_t d = table.feature_names.size();
    table.features = Matrix(n, d);
    table.labels.resize(n);

    for (std::size_t r = 0; r < n; ++r) {
        const auto& cells = doc.rows[r];
        if (cells.size() != doc.header.size())
            throw DataError(path + ": row " + std::to_string(r + 1) + ": expected " +
                            std::to_string(doc.header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        std::size_t f = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_idx) continue;
            const auto value = parse_double(cells[c]);
            if (!value || !std::isfinite(*value))
                throw DataError(path + ": row " + std::to_string(r + 1) + ", column '" +
                                doc.header[c] + "': unparseable cell '" + cells[c] + "'");
            table.features(r, f++) = *value;
        }
        const std::string& label = cells[label_idx];
        auto it = std::find(table.class_names.begin(), table.class_names.end(), label);
        if (it == table.class_names.end()) {
            table.class_names.push_back(label);
            table.labels[r] = static_cast<int>(table.class_names.size()) - 1;
        } else {
            table.labels[r] = static_cast<int>(it - table.class_names.begin());
        }
    }
    return table;
}

namespace detail {

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(const LabeledTable& table, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw DataError("split: train_fraction must lie in (0,1)");
    const std::size_t n = table.n_samples();
    const std::size_t k = table.n_classes();
    const auto total_train =
        static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
    if (total_train == 0 || total_train >= n)
        throw DataError("split: degenerate split, one side would be empty");

    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(table.labels[i])].push_back(i);

    // Largest-remainder apportionment of the train quota across classes.
    std::vector<std::size_t> take(k);
    std::vector<std::pair<double, std::size_t>> remainders; // (-frac, class) for ascending sort
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const double quota = spec.train_fraction * static_cast<double>(by_class[c].size());
        take[c] = static_cast<std::size_t>(std::floor(quota));
        assigned += take[c];
        remainders.emplace_back(-(quota - std::floor(quota)), c);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t i = 0; assigned < total_train && i < remainders.size(); ++i) {
        const std::size_t c = remainders[i].second;
        if (take[c] < by_class[c].size()) {
            ++take[c];
            ++assigned;
        }
    }

    Rng rng(spec.seed);
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t c = 0; c < k; ++c) {
        rng.shuffle(by_class[c]);
        for (std::size_t i = 0; i < by_class[c].size(); ++i)
            (i < take[c] ? train_idx : test_idx).push_back(by_class[c][i]);
    }
    rng.shuffle(train_idx); // mix classes so minibatches are not class-sorted
    std::sort(test_idx.begin(), test_idx.end());

    if (train_idx.empty() || test_idx.empty())
        throw DataError("split: degenerate split, one side would be empty");
    return {train_idx, test_idx};
}

} // namespace detail

namespace {

LabeledTable take_rows(const LabeledTable& table, const std::vector<std::size_t>& idx) {
    LabeledTable out;
    out.feature_names = table.feature_names;
    out.class_names = table.class_names;
    out.features = Matrix(idx.size(), table.n_features());
    out.labels.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t c = 0; c < table.n_features(); ++c)
            out.features(r, c) = table.features(idx[r], c);
        out.labels[r] = table.labels[idx[r]];
    }
    return out;
}

} // namespace

std::pair<LabeledTable, LabeledTable> split(const LabeledTable& table, const SplitSpec& spec) {
    const auto [train_idx, test_idx] = detail::split_indices(table, spec);
    return {take_rows(table, train_idx), take_rows(table, test_idx)};
}

LabeledTable normalize_minmax(const LabeledTable& table) {
    LabeledTable out = table;
    for (std::size_t c = 0; c < table.n_features(); ++c) {
        double lo = table.features(0, c), hi = lo;
        for (std::size_t r = 1; r < table.n_samples(); ++r) {
            lo = std::min(lo, table.features(r, c));
            hi = std::max(hi, table.features(r, c));
        }
        const double range = hi - lo;
        for (std::size_t r = 0; r < table.n_samples(); ++r)
            out.features(r, c) = range > 0.0 ? (table.features(r, c) - lo) / range : 0.0;
    }
    return out;
}

} // namespace cvt
