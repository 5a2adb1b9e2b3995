#include "cvt/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "cvt/csv.hpp"
#include "cvt/errors.hpp"
#include "cvt/rng.hpp"

namespace cvt {

namespace {

// Hidden layers are required by the path machinery, not here: plain
// input->output stacks are valid models (and useful in tests).
void validate_spec(const MlpSpec& spec) {
    if (spec.layer_widths.size() < 2)
        throw DataError("mlp: need at least input and output layer widths");
    for (std::size_t w : spec.layer_widths)
        if (w == 0) throw DataError("mlp: every layer width must be >= 1");
}

void softmax_inplace(std::vector<double>& z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

// Per-layer activations for one sample; [0] is the input itself.
std::vector<std::vector<double>> forward_layers(const MlpModel& model, std::span<const double> x) {
    const auto& widths = model.spec.layer_widths;
    std::vector<std::vector<double>> acts(widths.size());
    acts[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const Matrix& w = model.weights[l];
        std::vector<double> z(widths[l + 1]);
        for (std::size_t i = 0; i < widths[l + 1]; ++i) {
            double acc = model.biases[l][i];
            for (std::size_t j = 0; j < widths[l]; ++j) acc += w(i, j) * acts[l][j];
            z[i] = acc;
        }
        if (l + 2 < widths.size()) {
            for (double& v : z) v = v > 0.0 ? v : 0.0; // ReLU
        } else {
            softmax_inplace(z);
        }
        acts[l + 1] = std::move(z);
    }
    return acts;
}

} // namespace

std::size_t ActivationTrace::total_nodes() const {
    return std::accumulate(layer_widths.begin(), layer_widths.end(), std::size_t{0});
}

std::size_t ActivationTrace::node_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) off += layer_widths[l];
    return off;
}

std::string node_name(const std::vector<std::size_t>& layer_widths, std::size_t layer,
                      std::size_t node) {
    if (layer == 0) return "x_" + std::to_string(node);
    if (layer + 1 == layer_widths.size()) return "pred_" + std::to_string(node);
    return "h" + std::to_string(layer - 1) + "_" + std::to_string(node);
}

MlpModel init(const MlpSpec& spec) {
    validate_spec(spec);
    MlpModel model;
    model.spec = spec;
    Rng rng(spec.seed);
    for (std::size_t l = 0; l + 1 < spec.layer_widths.size(); ++l) {
        const std::size_t fan_in = spec.layer_widths[l];
        const std::size_t fan_out = spec.layer_widths[l + 1];
        const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
        Matrix w(fan_out, fan_in);
        for (double& v : w.data()) v = scale * rng.normal();
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(fan_out, 0.0);
    }
    return model;
}

ForwardResult forward(const MlpModel& model, std::span<const double> x) {
    if (x.size() != model.spec.layer_widths.front())
        throw DataError("forward: input arity " + std::to_string(x.size()) + " != network input width " +
                        std::to_string(model.spec.layer_widths.front()));
    for (double v : x)
        if (!std::isfinite(v)) throw DataError("forward: non-finite input value");

    const auto acts = forward_layers(model, x);
    ForwardResult out;
    out.probabilities = acts.back();
    out.trace_row.reserve(std::accumulate(model.spec.layer_widths.begin(),
                                          model.spec.layer_widths.end(), std::size_t{0}));
    for (const auto& layer : acts)
        out.trace_row.insert(out.trace_row.end(), layer.begin(), layer.end());
    return out;
}

double batch_loss(const MlpModel& model, const Matrix& x, std::span<const int> y) {
    if (x.rows() == 0) throw DataError("batch_loss: empty batch");
    double total = 0.0;
    for (std::size_t s = 0; s < x.rows(); ++s) {
        const auto acts = forward_layers(model, x.row(s));
        const double p = acts.back()[static_cast<std::size_t>(y[s])];
        total += -std::log(std::max(p, 1e-300));
    }
    return total / static_cast<double>(x.rows());
}

Gradients gradients(const MlpModel& model, const Matrix& x, std::span<const int> y) {
    if (x.rows() == 0) throw DataError("gradients: empty batch");
    const auto& widths = model.spec.layer_widths;
    const std::size_t L = widths.size() - 1; // number of weight layers

    Gradients g;
    for (std::size_t l = 0; l < L; ++l) {
        g.weights.emplace_back(widths[l + 1], widths[l]);
        g.biases.emplace_back(widths[l + 1], 0.0);
    }

    const double inv_b = 1.0 / static_cast<double>(x.rows());
    for (std::size_t s = 0; s < x.rows(); ++s) {
        const auto acts = forward_layers(model, x.row(s));
        // dL/dz at the output for softmax + cross-entropy
        std::vector<double> delta = acts.back();
        delta[static_cast<std::size_t>(y[s])] -= 1.0;
        for (double& v : delta) v *= inv_b;

        for (std::size_t l = L; l-- > 0;) {
            for (std::size_t i = 0; i < widths[l + 1]; ++i) {
                g.biases[l][i] += delta[i];
                for (std::size_t j = 0; j < widths[l]; ++j)
                    g.weights[l](i, j) += delta[i] * acts[l][j];
            }
            if (l == 0) break;
            std::vector<double> prev(widths[l], 0.0);
            for (std::size_t j = 0; j < widths[l]; ++j) {
                if (acts[l][j] <= 0.0) continue; // ReLU gate
                double acc = 0.0;
                for (std::size_t i = 0; i < widths[l + 1]; ++i)
                    acc += model.weights[l](i, j) * delta[i];
                prev[j] = acc;
            }
            delta = std::move(prev);
        }
    }
    return g;
}

TrainResult train(const MlpModel& model, const LabeledTable& data, const TrainConfig& cfg) {
    if (data.n_features() != model.spec.layer_widths.front())
        throw DataError("train: data has " + std::to_string(data.n_features()) +
                        " features, network expects " +
                        std::to_string(model.spec.layer_widths.front()));
    if (data.n_classes() > model.spec.layer_widths.back())
        throw DataError("train: data has more classes than output nodes");
    if (cfg.batch_size == 0) throw DataError("train: batch_size must be >= 1");
    if (cfg.learning_rate <= 0.0) throw DataError("train: learning_rate must be > 0");
    if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0))
        throw DataError("train: momentum must lie in [0,1)");

    TrainResult result{model, 0.0, 0.0};
    MlpModel& m = result.model;

    std::vector<Matrix> vel_w;
    std::vector<std::vector<double>> vel_b;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        vel_w.emplace_back(m.weights[l].rows(), m.weights[l].cols());
        vel_b.emplace_back(m.biases[l].size(), 0.0);
    }

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(data.n_samples());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t bsz = std::min(cfg.batch_size, order.size() - start);
            Matrix bx(bsz, data.n_features());
            std::vector<int> by(bsz);
            for (std::size_t i = 0; i < bsz; ++i) {
                for (std::size_t c = 0; c < data.n_features(); ++c)
                    bx(i, c) = data.features(order[start + i], c);
                by[i] = data.labels[order[start + i]];
            }
            const Gradients g = gradients(m, bx, by);
            for (std::size_t l = 0; l < m.weights.size(); ++l) {
                for (std::size_t k = 0; k < m.weights[l].data().size(); ++k) {
                    vel_w[l].data()[k] =
                        cfg.momentum * vel_w[l].data()[k] - cfg.learning_rate * g.weights[l].data()[k];
                    m.weights[l].data()[k] += vel_w[l].data()[k];
                }
                for (std::size_t k = 0; k < m.biases[l].size(); ++k) {
                    vel_b[l][k] = cfg.momentum * vel_b[l][k] - cfg.learning_rate * g.biases[l][k];
                    m.biases[l][k] += vel_b[l][k];
                }
            }
        }
        const double loss =
            batch_loss(m, data.features, std::span<const int>(data.labels.data(), data.labels.size()));
        if (!std::isfinite(loss))
            throw NumericError("train: loss diverged to non-finite value at epoch " +
                               std::to_string(epoch + 1));
        result.final_loss = loss;
    }

    if (cfg.epochs == 0)
        result.final_loss = batch_loss(
            m, data.features, std::span<const int>(data.labels.data(), data.labels.size()));
    result.train_accuracy = accuracy(m, data);
    return result;
}

int predict(const MlpModel& model, std::span<const double> x) {
    const auto fwd = forward(model, x);
    return static_cast<int>(std::max_element(fwd.probabilities.begin(), fwd.probabilities.end()) -
                            fwd.probabilities.begin());
}

double accuracy(const MlpModel& model, const LabeledTable& data) {
    if (data.n_samples() == 0) throw DataError("accuracy: empty table");
    std::size_t hits = 0;
    for (std::size_t s = 0; s < data.n_samples(); ++s)
        if (predict(model, data.features.row(s)) == data.labels[s]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(data.n_samples());
}

ActivationTrace capture_traces(const MlpModel& model, const LabeledTable& data) {
    ActivationTrace trace;
    trace.layer_widths = model.spec.layer_widths;
    trace.values = Matrix(data.n_samples(), trace.total_nodes());
    for (std::size_t s = 0; s < data.n_samples(); ++s) {
        const auto fwd = forward(model, data.features.row(s));
        std::copy(fwd.trace_row.begin(), fwd.trace_row.end(), trace.values.row(s).begin());
    }
    return trace;
}

namespace {

void append_string_array(std::ostringstream& out, const std::vector<std::string>& v) {
    out << "[";
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << "\"" << v[i] << "\"";
    out << "]";
}

} // namespace

std::string model_to_json(const MlpModel& model, const std::vector<std::string>& feature_names,
                          const std::vector<std::string>& class_names,
                          const std::map<std::string, std::string>& meta) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"meta\": {";
    std::size_t mi = 0;
    for (const auto& [k, v] : meta) out << (mi++ ? "," : "") << "\n    \"" << k << "\": \"" << v << "\"";
    out << (meta.empty() ? "" : "\n  ") << "},\n";
    out << "  \"layer_widths\": [";
    for (std::size_t i = 0; i < model.spec.layer_widths.size(); ++i)
        out << (i ? "," : "") << model.spec.layer_widths[i];
    out << "],\n";
    out << "  \"hidden_activation\": \"relu\",\n";
    out << "  \"output_activation\": \"softmax\",\n";
    out << "  \"seed\": " << model.spec.seed << ",\n";
    out << "  \"feature_names\": ";
    append_string_array(out, feature_names);
    out << ",\n  \"class_names\": ";
    append_string_array(out, class_names);
    out << ",\n  \"weights\": [";
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        out << (l ? "," : "") << "\n    [";
        const Matrix& w = model.weights[l];
        for (std::size_t r = 0; r < w.rows(); ++r) {
            out << (r ? "," : "") << "\n      [";
            for (std::size_t c = 0; c < w.cols(); ++c)
                out << (c ? "," : "") << format_double(w(r, c));
            out << "]";
        }
        out << "\n    ]";
    }
    out << "\n  ],\n  \"biases\": [";
    for (std::size_t l = 0; l < model.biases.size(); ++l) {
        out << (l ? "," : "") << "\n    [";
        for (std::size_t i = 0; i < model.biases[l].size(); ++i)
            out << (i ? "," : "") << format_double(model.biases[l][i]);
        out << "]";
    }
    out << "\n  ]\n}\n";
    return out.str();
}

LoadedModel model_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model json: parse failure: ") + e.what());
    }
    try {
        LoadedModel loaded;
        MlpModel& m = loaded.model;
        m.spec.layer_widths = j.at("layer_widths").get<std::vector<std::size_t>>();
        m.spec.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("meta"))
            loaded.meta = j.at("meta").get<std::map<std::string, std::string>>();
        loaded.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        loaded.class_names = j.at("class_names").get<std::vector<std::string>>();
        validate_spec(m.spec);
        const auto& jw = j.at("weights");
        const auto& jb = j.at("biases");
        if (jw.size() + 1 != m.spec.layer_widths.size() || jb.size() != jw.size())
            throw DataError("model json: weight/bias layer count mismatch");
        for (std::size_t l = 0; l + 1 < m.spec.layer_widths.size(); ++l) {
            Matrix w(m.spec.layer_widths[l + 1], m.spec.layer_widths[l]);
            if (jw[l].size() != w.rows()) throw DataError("model json: weight row count mismatch");
            for (std::size_t r = 0; r < w.rows(); ++r) {
                if (jw[l][r].size() != w.cols())
                    throw DataError("model json: weight column count mismatch");
                for (std::size_t c = 0; c < w.cols(); ++c) w(r, c) = jw[l][r][c].get<double>();
            }
            m.weights.push_back(std::move(w));
            if (jb[l].size() != m.spec.layer_widths[l + 1])
                throw DataError("model json: bias length mismatch");
            m.biases.push_back(jb[l].get<std::vector<double>>());
        }
        for (const auto& w : m.weights)
            for (double v : w.data())
                if (!std::isfinite(v)) throw DataError("model json: non-finite weight");
        return loaded;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model json: missing or mistyped field: ") + e.what());
    }
}

} // namespace cvt
