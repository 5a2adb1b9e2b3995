#include "cvt/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cvt/csv.hpp"
#include "cvt/errors.hpp"
#include "cvt/mlp.hpp"

namespace cvt {

namespace {

struct EdgeStyle {
    double pen_width;
    std::array<std::uint8_t, 3> rgb;
    std::uint8_t alpha;
};

class StyleMap {
public:
    StyleMap(const EdgeImportance& imp, const RenderSpec& spec) : spec_(spec) {
        if (!(spec.transparency_quantile >= 0.0 && spec.transparency_quantile <= 1.0))
            throw DataError("render: transparency quantile must lie in [0,1]");
        for (const Matrix& m : imp.per_layer)
            for (double v : m.data()) all_.push_back(v);
        if (all_.empty()) throw DataError("render: no edges");
        std::sort(all_.begin(), all_.end());
        lo_ = all_.front();
        hi_ = all_.back();
        // nearest-rank quantile
        const auto rank = static_cast<std::size_t>(
            std::ceil(spec.transparency_quantile * static_cast<double>(all_.size())));
        threshold_ = all_[rank == 0 ? 0 : rank - 1];
    }

    EdgeStyle style(double importance) const {
        const double t = hi_ > lo_ ? (importance - lo_) / (hi_ - lo_) : 1.0;
        EdgeStyle s{};
        s.pen_width = 0.5 + 4.5 * t;
        for (std::size_t c = 0; c < 3; ++c)
            s.rgb[c] = static_cast<std::uint8_t>(std::lround(
                static_cast<double>(spec_.low_color[c]) +
                t * (static_cast<double>(spec_.high_color[c]) - static_cast<double>(spec_.low_color[c]))));
        s.alpha = importance < threshold_
                      ? static_cast<std::uint8_t>(0x14)
                      : static_cast<std::uint8_t>(std::lround(80.0 + 175.0 * t));
        return s;
    }

private:
    const RenderSpec& spec_;
    std::vector<double> all_;
    double lo_ = 0.0, hi_ = 0.0, threshold_ = 0.0;
};

std::string hex_color(const std::array<std::uint8_t, 3>& rgb, std::uint8_t alpha) {
    char buf[10];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x%02x", rgb[0], rgb[1], rgb[2], alpha);
    return buf;
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string label_for(const RenderSpec& spec, const std::vector<std::size_t>& widths,
                      std::size_t layer, std::size_t node) {
    const std::string name = node_name(widths, layer, node);
    if (spec.node_labels.empty()) return name;
    std::size_t flat = node;
    for (std::size_t l = 0; l < layer; ++l) flat += widths[l];
    if (flat >= spec.node_labels.size()) throw DataError("render: node label list too short");
    return spec.node_labels[flat];
}

} // namespace

std::string to_dot(const EdgeImportance& importances, const RenderSpec& spec) {
    const auto& widths = importances.layer_widths;
    if (importances.per_layer.size() + 1 != widths.size())
        throw DataError("render: importance matrices do not cover all layers");
    const StyleMap styles(importances, spec);

    std::ostringstream out;
    out << "digraph network_paths {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=circle, fontsize=10, fixedsize=true, width=0.7];\n";
    out << "  edge [dir=none];\n";
    for (std::size_t l = 0; l < widths.size(); ++l) {
        out << "  { rank=same;";
        for (std::size_t i = 0; i < widths[l]; ++i) out << " " << node_name(widths, l, i) << ";";
        out << " }\n";
    }
    for (std::size_t l = 0; l < widths.size(); ++l)
        for (std::size_t i = 0; i < widths[l]; ++i)
            out << "  " << node_name(widths, l, i) << " [label=\"" << label_for(spec, widths, l, i)
                << "\"];\n";
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const Matrix& m = importances.per_layer[l];
        for (std::size_t i = 0; i < widths[l]; ++i) {
            for (std::size_t j = 0; j < widths[l + 1]; ++j) {
                const EdgeStyle s = styles.style(m(i, j));
                out << "  " << node_name(widths, l, i) << " -> " << node_name(widths, l + 1, j)
                    << " [penwidth=" << fixed3(s.pen_width) << ", color=\""
                    << hex_color(s.rgb, s.alpha) << "\"];\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

std::string to_svg(const EdgeImportance& importances, const RenderSpec& spec) {
    const auto& widths = importances.layer_widths;
    if (importances.per_layer.size() + 1 != widths.size())
        throw DataError("render: importance matrices do not cover all layers");
    const StyleMap styles(importances, spec);

    const double width = 160.0 * static_cast<double>(widths.size()) + 80.0;
    const double height = 420.0;
    const auto node_x = [](std::size_t layer) { return 120.0 + 160.0 * static_cast<double>(layer); };
    const auto node_y = [&](std::size_t layer, std::size_t i) {
        const double step = (height - 60.0) / static_cast<double>(widths[layer]);
        return 30.0 + step * (static_cast<double>(i) + 0.5);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed3(width) << "\" height=\""
        << fixed3(height) << "\" viewBox=\"0 0 " << fixed3(width) << " " << fixed3(height)
        << "\">\n";
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const Matrix& m = importances.per_layer[l];
        for (std::size_t i = 0; i < widths[l]; ++i) {
            for (std::size_t j = 0; j < widths[l + 1]; ++j) {
                const EdgeStyle s = styles.style(m(i, j));
                char color[8];
                std::snprintf(color, sizeof(color), "#%02x%02x%02x", s.rgb[0], s.rgb[1], s.rgb[2]);
                out << "  <line x1=\"" << fixed3(node_x(l)) << "\" y1=\"" << fixed3(node_y(l, i))
                    << "\" x2=\"" << fixed3(node_x(l + 1)) << "\" y2=\"" << fixed3(node_y(l + 1, j))
                    << "\" stroke=\"" << color << "\" stroke-width=\"" << fixed3(s.pen_width)
                    << "\" stroke-opacity=\"" << fixed3(static_cast<double>(s.alpha) / 255.0)
                    << "\"/>\n";
            }
        }
    }
    for (std::size_t l = 0; l < widths.size(); ++l) {
        for (std::size_t i = 0; i < widths[l]; ++i) {
            out << "  <circle cx=\"" << fixed3(node_x(l)) << "\" cy=\"" << fixed3(node_y(l, i))
                << "\" r=\"14\" fill=\"#ffffff\" stroke=\"#333333\"/>\n";
            out << "  <text x=\"" << fixed3(node_x(l)) << "\" y=\"" << fixed3(node_y(l, i) + 3.5)
                << "\" font-size=\"9\" text-anchor=\"middle\">" << label_for(spec, widths, l, i)
                << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

BarTable importance_bars(std::span<const std::string> feature_names,
                         std::span<const double> cvt_importance,
                         std::span<const double> rf_importance) {
    if (feature_names.size() != cvt_importance.size() ||
        feature_names.size() != rf_importance.size())
        throw DataError("importance_bars: feature sets do not match (" +
                        std::to_string(feature_names.size()) + " names, " +
                        std::to_string(cvt_importance.size()) + " cvt, " +
                        std::to_string(rf_importance.size()) + " rf)");
    if (feature_names.empty()) throw DataError("importance_bars: empty feature set");
    BarTable table;
    table.features.assign(feature_names.begin(), feature_names.end());
    table.cvt.assign(cvt_importance.begin(), cvt_importance.end());
    table.rf.assign(rf_importance.begin(), rf_importance.end());
    return table;
}

std::string bars_to_csv(const BarTable& table) {
    std::ostringstream out;
    out << "feature,cvt_importance,rf_importance\n";
    for (std::size_t i = 0; i < table.features.size(); ++i)
        out << table.features[i] << "," << format_double(table.cvt[i]) << ","
            << format_double(table.rf[i]) << "\n";
    return out.str();
}

} // namespace cvt
