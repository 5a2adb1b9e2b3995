#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cvt/dataset.hpp"
#include "cvt/matrix.hpp"

namespace cvt {

enum class HiddenActivation { relu };
enum class OutputActivation { softmax };

struct MlpSpec {
    std::vector<std::size_t> layer_widths; // first = n_features, last = n_classes
    HiddenActivation hidden = HiddenActivation::relu;
    OutputActivation output = OutputActivation::softmax;
    std::uint64_t seed = 1;

    std::size_t n_layers() const { return layer_widths.size(); }

    bool operator==(const MlpSpec&) const = default;
};

struct MlpModel {
    MlpSpec spec;
    // weights[l] is layer_widths[l+1] x layer_widths[l]; row = destination node
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    bool operator==(const MlpModel&) const = default;
};

struct TrainConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::size_t epochs = 4000; // 0 leaves the model untouched
    std::size_t batch_size = 16;
    std::uint64_t seed = 1;
};

struct TrainResult {
    MlpModel model;
    double train_accuracy = 0.0;
    double final_loss = 0.0;
};

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

/// Post-activation value of every node for every sample. Column order is
/// (inputs, hidden0, hidden1, ..., outputs); input columns carry the raw
/// feature values.
struct ActivationTrace {
    std::vector<std::size_t> layer_widths;
    Matrix values; // n_samples x total_nodes

    std::size_t n_layers() const { return layer_widths.size(); }
    std::size_t total_nodes() const;
    std::size_t node_offset(std::size_t layer) const;
};

/// Stable display name: x_i, h0_j, h1_k, ..., pred_m.
std::string node_name(const std::vector<std::size_t>& layer_widths, std::size_t layer,
                      std::size_t node);

/// He-scaled seeded weights, zero biases. Same spec (incl. seed) gives an
/// identical model.
MlpModel init(const MlpSpec& spec);

struct ForwardResult {
    std::vector<double> probabilities;
    std::vector<double> trace_row; // every node's post-activation value
};

ForwardResult forward(const MlpModel& model, std::span<const double> x);

/// Mean cross-entropy over a batch; max-subtracted softmax inside.
double batch_loss(const MlpModel& model, const Matrix& x, std::span<const int> y);

/// Analytic backprop gradients of mean cross-entropy over the batch.
Gradients gradients(const MlpModel& model, const Matrix& x, std::span<const int> y);

/// Mini-batch SGD with momentum; deterministic under (model seed, cfg seed).
/// Throws NumericError when the loss stops being finite.
TrainResult train(const MlpModel& model, const LabeledTable& data, const TrainConfig& cfg);

int predict(const MlpModel& model, std::span<const double> x);
double accuracy(const MlpModel& model, const LabeledTable& data);

ActivationTrace capture_traces(const MlpModel& model, const LabeledTable& data);

/// Fixed-schema JSON with 17-significant-digit numbers; save/load round-trips
/// bit-exactly (values and bytes). `meta` keys are emitted sorted.
std::string model_to_json(const MlpModel& model, const std::vector<std::string>& feature_names,
                          const std::vector<std::string>& class_names,
                          const std::map<std::string, std::string>& meta = {});
struct LoadedModel {
    MlpModel model;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::map<std::string, std::string> meta;
};
LoadedModel model_from_json(const std::string& json_text);

} // namespace cvt
