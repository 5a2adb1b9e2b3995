#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cvt/path_ranking.hpp"

namespace cvt {

struct RenderSpec {
    /// Edges whose importance falls below this quantile of the importance
    /// distribution are rendered near-transparent.
    double transparency_quantile = 0.5;
    std::array<std::uint8_t, 3> low_color{49, 130, 189};  // blue
    std::array<std::uint8_t, 3> high_color{222, 45, 38};  // red
    std::vector<std::string> node_labels; // empty = default x_i/h0_j/... names
};

/// Layered digraph in DOT: one rank group per layer, node names
/// x_i/h0_j/h1_k/pred_m, pen width and opacity monotone in edge importance.
/// Deterministic bytes, LF endings.
std::string to_dot(const EdgeImportance& importances, const RenderSpec& spec);

/// Same network on a fixed layered layout as standalone SVG.
std::string to_svg(const EdgeImportance& importances, const RenderSpec& spec);

struct BarTable {
    std::vector<std::string> features;
    std::vector<double> cvt;
    std::vector<double> rf;
};

/// Aligns per-feature importance pairs; both columns must cover the same
/// features and each sums to 1.
BarTable importance_bars(std::span<const std::string> feature_names,
                         std::span<const double> cvt_importance,
                         std::span<const double> rf_importance);

std::string bars_to_csv(const BarTable& table);

} // namespace cvt
