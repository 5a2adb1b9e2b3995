#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvt/dependence.hpp"
#include "cvt/forest.hpp"

namespace cvt {

/// Every pipeline knob, one flat key per field. Defaults reproduce the
/// standard Iris experiment.
struct RunConfig {
    std::string data = "data/iris.csv";
    std::string label_column = "species";
    bool normalize = true;

    double train_fraction = 0.8;
    std::uint64_t split_seed = 7;

    std::vector<std::size_t> hidden_widths{6, 6};
    std::uint64_t init_seed = 1;
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::size_t epochs = 4000;
    std::size_t batch_size = 16;
    std::uint64_t train_seed = 1;

    CdfMode cdf_mode = CdfMode::histogram;
    std::size_t bins = 20;
    CorrelationKind correlation = CorrelationKind::kendall_tau_b;

    std::size_t n_trees = 100;
    MaxFeatures max_features = MaxFeatures::sqrt_of_total;
    bool bootstrap = true;
    std::size_t min_samples_split = 2;
    std::uint64_t forest_seed = 1;

    double render_threshold = 0.5;
    std::string output_dir = "out";
};

/// Applies one `key = value` assignment. Throws UsageError naming the key on
/// unknown keys and out-of-range values.
void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses a flat key-value config file (`#` comments, blank lines allowed).
/// An empty file yields the defaults. Throws UsageError / DataError.
RunConfig validate_config(const std::string& path);

/// Canonical echo: every key in fixed order, normalized values.
std::string normalized_config(const RunConfig& cfg);

/// FNV-1a hash of the normalized echo, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

} // namespace cvt
