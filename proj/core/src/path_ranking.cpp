#include "cvt/path_ranking.hpp"

#include <algorithm>
#include <cmath>

#include "cvt/errors.hpp"
#include "cvt/mlp.hpp"

namespace cvt {

std::vector<BasePath> enumerate_paths(const std::vector<std::size_t>& layer_widths) {
    if (layer_widths.size() < 3)
        throw DataError("enumerate_paths: need at least 2 non-output layers");
    const std::size_t levels = layer_widths.size() - 1; // all but the output layer

    std::size_t count = 1;
    for (std::size_t l = 0; l < levels; ++l) count *= layer_widths[l];

    std::vector<BasePath> paths;
    paths.reserve(count);
    BasePath cur;
    cur.nodes.assign(levels, 0);
    for (std::size_t p = 0; p < count; ++p) {
        paths.push_back(cur);
        // odometer increment, last position fastest: lexicographic order
        for (std::size_t l = levels; l-- > 0;) {
            if (++cur.nodes[l] < layer_widths[l]) break;
            cur.nodes[l] = 0;
        }
    }
    return paths;
}

CccValue ccc(const BasePath& path, std::size_t output_node,
             std::span<const LayerCorrelation> matrices) {
    if (matrices.size() != path.nodes.size())
        throw DataError("ccc: path covers " + std::to_string(path.nodes.size()) +
                        " edges but " + std::to_string(matrices.size()) + " matrices given");
    double product = 1.0;
    for (std::size_t l = 0; l < matrices.size(); ++l) {
        const std::size_t src = path.nodes[l];
        const std::size_t tgt = l + 1 < path.nodes.size() ? path.nodes[l + 1] : output_node;
        const LayerCorrelation& m = matrices[l];
        if (src >= m.values.rows() || tgt >= m.values.cols())
            throw DataError("ccc: missing matrix entry at layer " + std::to_string(l));
        if (!m.entry_defined(src, tgt)) return {0.0, false};
        product *= m.values(src, tgt);
    }
    return {product, true};
}

double var_unbiased(std::span<const double> values) {
    if (values.size() < 2) throw DataError("var_ccc: need at least 2 values");
    // constant input is exactly zero variance, not rounding dust
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; }))
        return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(values.size() - 1);
}

std::vector<PathRecord> compute_path_records(const std::vector<std::size_t>& layer_widths,
                                             std::span<const LayerCorrelation> matrices) {
    const std::size_t n_outputs = layer_widths.back();
    if (n_outputs < 2)
        throw DataError("compute_path_records: need >= 2 output nodes for a variance");

    std::vector<PathRecord> records;
    for (BasePath& path : enumerate_paths(layer_widths)) {
        PathRecord rec;
        rec.base_path = std::move(path);
        rec.ccc_per_output.resize(n_outputs);
        rec.defined = true;
        for (std::size_t m = 0; m < n_outputs; ++m) {
            const CccValue v = ccc(rec.base_path, m, matrices);
            if (!v.defined) {
                rec.defined = false;
                rec.ccc_per_output.assign(n_outputs, std::nan(""));
                break;
            }
            rec.ccc_per_output[m] = v.value;
        }
        rec.var_ccc = rec.defined ? var_unbiased(rec.ccc_per_output) : std::nan("");
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PathRecord> rank_paths(std::vector<PathRecord> records) {
    std::sort(records.begin(), records.end(), [](const PathRecord& a, const PathRecord& b) {
        if (a.defined != b.defined) return a.defined; // undefined records last
        if (a.defined && a.var_ccc != b.var_ccc) return a.var_ccc > b.var_ccc;
        return a.base_path < b.base_path;
    });
    return records;
}

EdgeImportance edge_importance(std::span<const PathRecord> records,
                               const std::vector<std::size_t>& layer_widths) {
    EdgeImportance imp;
    imp.layer_widths = layer_widths;
    for (std::size_t l = 0; l + 1 < layer_widths.size(); ++l)
        imp.per_layer.emplace_back(layer_widths[l], layer_widths[l + 1]);

    const std::size_t last = layer_widths.size() - 2; // output edge matrix index
    for (const PathRecord& rec : records) {
        if (!rec.defined) continue;
        for (std::size_t l = 0; l + 1 < rec.base_path.nodes.size(); ++l)
            imp.per_layer[l](rec.base_path.nodes[l], rec.base_path.nodes[l + 1]) += rec.var_ccc;
        // each branch carries the base path's variance onto its output edge
        for (std::size_t m = 0; m < layer_widths.back(); ++m)
            imp.per_layer[last](rec.base_path.nodes.back(), m) += rec.var_ccc;
    }
    return imp;
}

FeatureImportance feature_importance(std::span<const PathRecord> records,
                                     const std::vector<std::size_t>& layer_widths) {
    const std::size_t n_features = layer_widths.front();
    std::vector<double> sums(n_features, 0.0);
    std::vector<std::size_t> counts(n_features, 0);
    FeatureImportance out;
    for (const PathRecord& rec : records) {
        if (!rec.defined) {
            ++out.undefined_excluded;
            continue;
        }
        sums[rec.base_path.nodes.front()] += rec.var_ccc;
        ++counts[rec.base_path.nodes.front()];
    }
    out.importance.resize(n_features);
    double total = 0.0;
    for (std::size_t f = 0; f < n_features; ++f) {
        if (counts[f] == 0)
            throw NumericError("feature_importance: every path from feature " +
                               std::to_string(f) + " is undefined");
        out.importance[f] = sums[f] / static_cast<double>(counts[f]);
        total += out.importance[f];
    }
    if (total <= 0.0)
        throw NumericError("feature_importance: total importance is zero, cannot normalize");
    for (double& v : out.importance) v /= total;
    return out;
}

std::string path_name(const BasePath& path, const std::vector<std::size_t>& layer_widths) {
    std::string out;
    for (std::size_t l = 0; l < path.nodes.size(); ++l) {
        if (l) out += '>';
        out += node_name(layer_widths, l, path.nodes[l]);
    }
    return out;
}

ImportanceReport build_importance_report(const std::vector<std::size_t>& layer_widths,
                                         std::span<const LayerCorrelation> matrices,
                                         const ReportMetadata& metadata) {
    ImportanceReport report;
    report.ranked = rank_paths(compute_path_records(layer_widths, matrices));
    report.edges = edge_importance(report.ranked, layer_widths);
    report.features = feature_importance(report.ranked, layer_widths);
    report.metadata = metadata;
    return report;
}

} // namespace cvt
