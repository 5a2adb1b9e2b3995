#include "cvt/config.hpp"

#include <charconv>
#include <sstream>

#include "cvt/csv.hpp"
#include "cvt/errors.hpp"

namespace cvt {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
    throw UsageError("config key '" + key + "': invalid value '" + value + "' (expected " +
                     expected + ")");
}

double parse_real(const std::string& key, const std::string& value) {
    const auto v = parse_double(value);
    if (!v) bad_value(key, value, "a real number");
    return *v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const char* first = value.data();
    const char* last = first + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) bad_value(key, value, "a nonnegative integer");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    bad_value(key, value, "true or false");
}

std::vector<std::size_t> parse_width_list(const std::string& key, const std::string& value) {
    std::vector<std::size_t> widths;
    std::string cell;
    std::istringstream in(value);
    while (std::getline(in, cell, ',')) {
        cell = trim(cell);
        const std::uint64_t w = parse_u64(key, cell);
        if (w == 0) throw UsageError("config key '" + key + "': widths must be >= 1");
        widths.push_back(static_cast<std::size_t>(w));
    }
    if (widths.empty()) bad_value(key, value, "a comma-separated width list");
    return widths;
}

} // namespace

void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "data") {
        if (value.empty()) bad_value(key, value, "a file path");
        cfg.data = value;
    } else if (key == "label_column") {
        if (value.empty()) bad_value(key, value, "a column name");
        cfg.label_column = value;
    } else if (key == "normalize") {
        cfg.normalize = parse_bool(key, value);
    } else if (key == "train_fraction") {
        const double v = parse_real(key, value);
        if (!(v > 0.0 && v < 1.0)) bad_value(key, value, "a real in (0,1)");
        cfg.train_fraction = v;
    } else if (key == "split_seed") {
        cfg.split_seed = parse_u64(key, value);
    } else if (key == "hidden_widths") {
        cfg.hidden_widths = parse_width_list(key, value);
    } else if (key == "init_seed") {
        cfg.init_seed = parse_u64(key, value);
    } else if (key == "learning_rate") {
        const double v = parse_real(key, value);
        if (!(v > 0.0)) bad_value(key, value, "a positive real");
        cfg.learning_rate = v;
    } else if (key == "momentum") {
        const double v = parse_real(key, value);
        if (!(v >= 0.0 && v < 1.0)) bad_value(key, value, "a real in [0,1)");
        cfg.momentum = v;
    } else if (key == "epochs") {
        cfg.epochs = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "batch_size") {
        const std::uint64_t v = parse_u64(key, value);
        if (v == 0) bad_value(key, value, "an integer >= 1");
        cfg.batch_size = static_cast<std::size_t>(v);
    } else if (key == "train_seed") {
        cfg.train_seed = parse_u64(key, value);
    } else if (key == "cdf_mode") {
        if (value == "histogram") cfg.cdf_mode = CdfMode::histogram;
        else if (value == "exact") cfg.cdf_mode = CdfMode::exact_ecdf;
        else bad_value(key, value, "histogram or exact");
    } else if (key == "bins") {
        const std::uint64_t v = parse_u64(key, value);
        if (v == 0) bad_value(key, value, "an integer >= 1");
        cfg.bins = static_cast<std::size_t>(v);
    } else if (key == "correlation") {
        if (value == "kendall") cfg.correlation = CorrelationKind::kendall_tau_b;
        else if (value == "spearman") cfg.correlation = CorrelationKind::spearman;
        else if (value == "pearson") cfg.correlation = CorrelationKind::pearson;
        else bad_value(key, value, "kendall, spearman or pearson");
    } else if (key == "n_trees") {
        const std::uint64_t v = parse_u64(key, value);
        if (v == 0) bad_value(key, value, "an integer >= 1");
        cfg.n_trees = static_cast<std::size_t>(v);
    } else if (key == "max_features") {
        if (value == "sqrt") cfg.max_features = MaxFeatures::sqrt_of_total;
        else if (value == "all") cfg.max_features = MaxFeatures::all;
        else bad_value(key, value, "sqrt or all");
    } else if (key == "bootstrap") {
        cfg.bootstrap = parse_bool(key, value);
    } else if (key == "min_samples_split") {
        const std::uint64_t v = parse_u64(key, value);
        if (v == 0) bad_value(key, value, "an integer >= 1");
        cfg.min_samples_split = static_cast<std::size_t>(v);
    } else if (key == "forest_seed") {
        cfg.forest_seed = parse_u64(key, value);
    } else if (key == "render_threshold") {
        const double v = parse_real(key, value);
        if (!(v >= 0.0 && v <= 1.0)) bad_value(key, value, "a real in [0,1]");
        cfg.render_threshold = v;
    } else if (key == "output_dir") {
        if (value.empty()) bad_value(key, value, "a directory path");
        cfg.output_dir = value;
    } else {
        throw UsageError("unknown config key '" + key + "'");
    }
}

RunConfig validate_config(const std::string& path) {
    const std::string text = read_text_file(path);
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(line_no) +
                             ": expected 'key = value', got '" + stripped + "'");
        apply_config_key(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

std::string normalized_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "data = " << cfg.data << "\n";
    out << "label_column = " << cfg.label_column << "\n";
    out << "normalize = " << (cfg.normalize ? "true" : "false") << "\n";
    out << "train_fraction = " << format_double(cfg.train_fraction) << "\n";
    out << "split_seed = " << cfg.split_seed << "\n";
    out << "hidden_widths = ";
    for (std::size_t i = 0; i < cfg.hidden_widths.size(); ++i)
        out << (i ? "," : "") << cfg.hidden_widths[i];
    out << "\n";
    out << "init_seed = " << cfg.init_seed << "\n";
    out << "learning_rate = " << format_double(cfg.learning_rate) << "\n";
    out << "momentum = " << format_double(cfg.momentum) << "\n";
    out << "epochs = " << cfg.epochs << "\n";
    out << "batch_size = " << cfg.batch_size << "\n";
    out << "train_seed = " << cfg.train_seed << "\n";
    out << "cdf_mode = " << (cfg.cdf_mode == CdfMode::histogram ? "histogram" : "exact") << "\n";
    out << "bins = " << cfg.bins << "\n";
    out << "correlation = "
        << (cfg.correlation == CorrelationKind::kendall_tau_b ? "kendall"
            : cfg.correlation == CorrelationKind::spearman    ? "spearman"
                                                              : "pearson")
        << "\n";
    out << "n_trees = " << cfg.n_trees << "\n";
    out << "max_features = " << (cfg.max_features == MaxFeatures::all ? "all" : "sqrt") << "\n";
    out << "bootstrap = " << (cfg.bootstrap ? "true" : "false") << "\n";
    out << "min_samples_split = " << cfg.min_samples_split << "\n";
    out << "forest_seed = " << cfg.forest_seed << "\n";
    out << "render_threshold = " << format_double(cfg.render_threshold) << "\n";
    // output_dir is deliberately absent: it says where artifacts land, not
    // what they are, and the echo must be identical across output locations.
    return out.str();
}

std::string config_hash(const RunConfig& cfg) {
    return to_hex(fnv1a64(normalized_config(cfg)));
}

} // namespace cvt
