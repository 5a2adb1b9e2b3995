#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cvt/dependence.hpp"
#include "cvt/matrix.hpp"

namespace cvt {

/// One node index per non-output layer: an input node threaded through every
/// hidden layer. Each base path branches into one extended path per output.
struct BasePath {
    std::vector<std::size_t> nodes;

    bool operator==(const BasePath&) const = default;
    auto operator<=>(const BasePath&) const = default;
};

/// Cartesian product of node choices per non-output layer, lexicographic.
std::vector<BasePath> enumerate_paths(const std::vector<std::size_t>& layer_widths);

struct CccValue {
    double value = 0.0;
    bool defined = false;
};

/// Product of the dependence coefficients along every edge of
/// (base path + output node); undefined if any edge coefficient is.
CccValue ccc(const BasePath& path, std::size_t output_node,
             std::span<const LayerCorrelation> matrices);

/// Unbiased sample variance, divisor n-1; needs >= 2 values.
double var_unbiased(std::span<const double> values);

struct PathRecord {
    BasePath base_path;
    std::vector<double> ccc_per_output;
    double var_ccc = 0.0;
    bool defined = false;
};

/// One record per base path with its per-output CCCs and VaR(CCC);
/// an undefined edge anywhere poisons the record.
std::vector<PathRecord> compute_path_records(const std::vector<std::size_t>& layer_widths,
                                             std::span<const LayerCorrelation> matrices);

/// Descending var_ccc; ties broken by lexicographic base path; undefined
/// records last.
std::vector<PathRecord> rank_paths(std::vector<PathRecord> records);

/// Sum of var_ccc over base paths through each edge; output edges accumulate
/// from every base path ending at their source node (one branch per output).
/// Indexed like the correlation matrices: per_layer[l](i, j).
struct EdgeImportance {
    std::vector<std::size_t> layer_widths;
    std::vector<Matrix> per_layer;
};

EdgeImportance edge_importance(std::span<const PathRecord> records,
                               const std::vector<std::size_t>& layer_widths);

struct FeatureImportance {
    std::vector<double> importance; // normalized to sum 1
    std::size_t undefined_excluded = 0;
};

/// Mean var_ccc over base paths starting at each input feature, normalized
/// so the values sum to 1. Undefined records are excluded and counted.
FeatureImportance feature_importance(std::span<const PathRecord> records,
                                     const std::vector<std::size_t>& layer_widths);

/// "x_2>h0_5>h1_1" encoding used in the ranking CSV.
std::string path_name(const BasePath& path, const std::vector<std::size_t>& layer_widths);

struct ReportMetadata {
    std::uint64_t init_seed = 0;
    std::uint64_t train_seed = 0;
    std::uint64_t split_seed = 0;
    std::size_t bins = 0;
    CdfMode cdf_mode = CdfMode::histogram;
    CorrelationKind kind = CorrelationKind::kendall_tau_b;
};

/// Everything the ranking stage hands downstream in one bundle.
struct ImportanceReport {
    std::vector<PathRecord> ranked;
    EdgeImportance edges;
    FeatureImportance features;
    ReportMetadata metadata;
};

ImportanceReport build_importance_report(const std::vector<std::size_t>& layer_widths,
                                         std::span<const LayerCorrelation> matrices,
                                         const ReportMetadata& metadata);

} // namespace cvt
