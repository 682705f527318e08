#include "streamlens/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace streamlens {

const char* layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::affine: return "affine";
        case LayerKind::prelu: return "prelu";
        case LayerKind::relu: return "relu";
        case LayerKind::leaky_relu: return "leaky_relu";
        case LayerKind::dropout: return "dropout";
        case LayerKind::identity: return "identity";
    }
    return "unknown";
}

LayerKind layer_kind_from_name(const std::string& name) {
    if (name == "affine") return LayerKind::affine;
    if (name == "prelu") return LayerKind::prelu;
    if (name == "relu") return LayerKind::relu;
    if (name == "leaky_relu") return LayerKind::leaky_relu;
    if (name == "dropout") return LayerKind::dropout;
    if (name == "identity") return LayerKind::identity;
    throw ParseError("unknown layer kind '" + name + "'");
}

LayerSpec LayerSpec::affine(std::size_t in, std::size_t out) {
    LayerSpec s;
    s.kind = LayerKind::affine;
    s.in_dim = in;
    s.out_dim = out;
    s.weights.assign(in * out, 0.0);
    s.bias.assign(out, 0.0);
    return s;
}

LayerSpec LayerSpec::prelu(std::size_t dim, double init_slope) {
    LayerSpec s;
    s.kind = LayerKind::prelu;
    s.in_dim = s.out_dim = dim;
    s.slopes.assign(dim, init_slope);
    return s;
}

LayerSpec LayerSpec::relu(std::size_t dim) {
    LayerSpec s;
    s.kind = LayerKind::relu;
    s.in_dim = s.out_dim = dim;
    return s;
}

LayerSpec LayerSpec::leaky_relu(std::size_t dim, double slope) {
    LayerSpec s;
    s.kind = LayerKind::leaky_relu;
    s.in_dim = s.out_dim = dim;
    s.slope = slope;
    return s;
}

LayerSpec LayerSpec::dropout(std::size_t dim, double keep_prob) {
    LayerSpec s;
    s.kind = LayerKind::dropout;
    s.in_dim = s.out_dim = dim;
    s.keep_prob = keep_prob;
    return s;
}

LayerSpec LayerSpec::identity(std::size_t dim) {
    LayerSpec s;
    s.kind = LayerKind::identity;
    s.in_dim = s.out_dim = dim;
    return s;
}

void LayerSpec::validate() const {
    if (in_dim == 0 || out_dim == 0) throw InputError("layer dimensions must be positive");
    switch (kind) {
        case LayerKind::affine:
            if (weights.size() != in_dim * out_dim) {
                throw InputError("affine weight count " + std::to_string(weights.size()) + " != " +
                                 std::to_string(in_dim * out_dim));
            }
            if (bias.size() != out_dim) throw InputError("affine bias size mismatch");
            break;
        case LayerKind::prelu:
            if (in_dim != out_dim) throw InputError("prelu requires in_dim == out_dim");
            if (slopes.size() != out_dim) throw InputError("prelu slope count mismatch");
            break;
        case LayerKind::relu:
        case LayerKind::leaky_relu:
        case LayerKind::identity:
            if (in_dim != out_dim) throw InputError("activation layer requires in_dim == out_dim");
            break;
        case LayerKind::dropout:
            if (in_dim != out_dim) throw InputError("dropout requires in_dim == out_dim");
            if (!(keep_prob > 0.0 && keep_prob <= 1.0)) throw InputError("dropout keep probability must be in (0, 1]");
            break;
    }
}

std::size_t LayerSpec::parameter_count() const {
    switch (kind) {
        case LayerKind::affine: return weights.size() + bias.size();
        case LayerKind::prelu: return slopes.size();
        default: return 0;
    }
}

FeedForwardNet::FeedForwardNet(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw InputError("network needs at least one layer");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        layers_[i].validate();
        if (i > 0 && layers_[i].in_dim != layers_[i - 1].out_dim) {
            throw InputError("layer " + std::to_string(i) + " in_dim " + std::to_string(layers_[i].in_dim) +
                             " does not match previous out_dim " + std::to_string(layers_[i - 1].out_dim));
        }
    }
    // A logical layer starts at each affine primitive and absorbs everything
    // up to (not including) the next affine. Leading non-affine primitives
    // form a logical layer of their own so every net has depth >= 1.
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        if (layers_[i].kind == LayerKind::affine) starts.push_back(i);
    }
    if (starts.empty() || starts.front() != 0) {
        logical_ends_.push_back(starts.empty() ? layers_.size() : starts.front());
    }
    for (std::size_t s = 0; s < starts.size(); ++s) {
        const std::size_t end = (s + 1 < starts.size()) ? starts[s + 1] : layers_.size();
        logical_ends_.push_back(end);
    }
}

std::size_t FeedForwardNet::input_dim() const { return layers_.front().in_dim; }
std::size_t FeedForwardNet::output_dim() const { return layers_.back().out_dim; }

std::size_t FeedForwardNet::activation_dim(std::size_t ell) const {
    if (ell > depth()) throw InputError("activation index out of range");
    if (ell == 0) return input_dim();
    return layers_[logical_ends_[ell - 1] - 1].out_dim;
}

namespace {

void apply_layer_inference(const LayerSpec& layer, const std::vector<double>& in, std::vector<double>& out) {
    switch (layer.kind) {
        case LayerKind::affine: {
            out.assign(layer.out_dim, 0.0);
            for (std::size_t r = 0; r < layer.out_dim; ++r) {
                double acc = layer.bias[r];
                const double* w = layer.weights.data() + r * layer.in_dim;
                for (std::size_t c = 0; c < layer.in_dim; ++c) acc += w[c] * in[c];
                out[r] = acc;
            }
            break;
        }
        case LayerKind::prelu:
            out.resize(layer.out_dim);
            for (std::size_t c = 0; c < layer.out_dim; ++c) {
                out[c] = in[c] > 0.0 ? in[c] : layer.slopes[c] * in[c];
            }
            break;
        case LayerKind::relu:
            out.resize(layer.out_dim);
            for (std::size_t c = 0; c < layer.out_dim; ++c) out[c] = in[c] > 0.0 ? in[c] : 0.0;
            break;
        case LayerKind::leaky_relu:
            out.resize(layer.out_dim);
            for (std::size_t c = 0; c < layer.out_dim; ++c) {
                out[c] = in[c] > 0.0 ? in[c] : layer.slope * in[c];
            }
            break;
        case LayerKind::dropout:   // identity at inference
        case LayerKind::identity:
            out = in;
            break;
    }
}

}  // namespace

std::vector<double> FeedForwardNet::forward(std::span<const double> x) const {
    if (mode_ != NetMode::inference) throw ConfigError("forward requires inference mode");
    if (x.size() != input_dim()) {
        throw InputError("forward: input has " + std::to_string(x.size()) + " features, expected " +
                         std::to_string(input_dim()));
    }
    std::vector<double> current(x.begin(), x.end());
    std::vector<double> next;
    for (const auto& layer : layers_) {
        apply_layer_inference(layer, current, next);
        std::swap(current, next);
    }
    return current;
}

Stream FeedForwardNet::capture_stream(std::span<const double> x) const {
    if (mode_ != NetMode::inference) throw ConfigError("capture_stream requires inference mode");
    if (x.size() != input_dim()) {
        throw InputError("capture_stream: input has " + std::to_string(x.size()) + " features, expected " +
                         std::to_string(input_dim()));
    }
    Stream stream;
    stream.activations.reserve(depth() + 1);
    std::vector<double> current(x.begin(), x.end());
    stream.activations.push_back(current);
    std::vector<double> next;
    std::size_t boundary = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        apply_layer_inference(layers_[i], current, next);
        std::swap(current, next);
        if (boundary < logical_ends_.size() && i + 1 == logical_ends_[boundary]) {
            stream.activations.push_back(current);
            ++boundary;
        }
    }
    return stream;
}

double log_sum_exp(std::span<const double> values) {
    const double m = *std::max_element(values.begin(), values.end());
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - m);
    return m + std::log(acc);
}

std::vector<double> softmax(std::span<const double> logits) {
    if (logits.empty()) throw InputError("softmax of empty vector");
    for (double v : logits) {
        if (!std::isfinite(v)) throw NumericError("softmax input is not finite");
    }
    const double lse = log_sum_exp(logits);
    std::vector<double> probs(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) probs[i] = std::exp(logits[i] - lse);
    return probs;
}

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw ConfigError("adam betas must be in [0, 1)");
    }
}

FeedForwardNet initialize_net(const std::vector<LayerSpec>& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<LayerSpec> layers = spec;
    for (auto& layer : layers) {
        if (layer.kind == LayerKind::affine) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in_dim));
            std::uniform_real_distribution<double> dist(-bound, bound);
            if (layer.weights.size() != layer.in_dim * layer.out_dim) {
                layer.weights.assign(layer.in_dim * layer.out_dim, 0.0);
            }
            if (layer.bias.size() != layer.out_dim) layer.bias.assign(layer.out_dim, 0.0);
            for (auto& w : layer.weights) w = dist(rng);
            std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
        }
    }
    return FeedForwardNet(std::move(layers));
}

std::vector<double> collect_parameters(const FeedForwardNet& net) {
    std::vector<double> params;
    for (const auto& layer : net.layers()) {
        if (layer.kind == LayerKind::affine) {
            params.insert(params.end(), layer.weights.begin(), layer.weights.end());
            params.insert(params.end(), layer.bias.begin(), layer.bias.end());
        } else if (layer.kind == LayerKind::prelu) {
            params.insert(params.end(), layer.slopes.begin(), layer.slopes.end());
        }
    }
    return params;
}

void set_parameters(FeedForwardNet& net, std::span<const double> params) {
    std::size_t offset = 0;
    for (auto& layer : net.mutable_layers()) {
        if (layer.kind == LayerKind::affine) {
            std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(offset), layer.weights.size(),
                        layer.weights.begin());
            offset += layer.weights.size();
            std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(offset), layer.bias.size(), layer.bias.begin());
            offset += layer.bias.size();
        } else if (layer.kind == LayerKind::prelu) {
            std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(offset), layer.slopes.size(),
                        layer.slopes.begin());
            offset += layer.slopes.size();
        }
    }
    if (offset != params.size()) {
        throw InputError("parameter vector size " + std::to_string(params.size()) + " does not match network (" +
                         std::to_string(offset) + ")");
    }
}

double loss_and_gradient(const FeedForwardNet& net, const Matrix& X, const std::vector<int>& labels,
                         std::vector<double>* grad, const DropoutMasks* dropout) {
    const auto& layers = net.layers();
    const std::size_t n = X.rows();
    if (n == 0) throw InputError("loss_and_gradient: empty batch");
    if (labels.size() != n) throw InputError("loss_and_gradient: label count mismatch");
    if (X.cols() != net.input_dim()) throw InputError("loss_and_gradient: feature dimension mismatch");

    const std::size_t param_count = collect_parameters(net).size();
    if (grad) grad->assign(param_count, 0.0);

    // Offsets of each layer's parameter block in the flattened vector.
    std::vector<std::size_t> offsets(layers.size(), 0);
    {
        std::size_t off = 0;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            offsets[i] = off;
            off += layers[i].parameter_count();
        }
    }
    // Index of each dropout layer among dropout layers, for mask lookup.
    std::vector<std::size_t> dropout_ordinal(layers.size(), 0);
    {
        std::size_t k = 0;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            if (layers[i].kind == LayerKind::dropout) dropout_ordinal[i] = k++;
        }
        if (dropout && dropout->masks.size() != k) {
            throw InputError("dropout mask count does not match dropout layer count");
        }
    }

    double total_loss = 0.0;
    std::vector<std::vector<double>> inputs(layers.size() + 1);  // inputs[i] feeds layer i
    std::vector<double> delta, delta_prev;

    for (std::size_t s = 0; s < n; ++s) {
        inputs[0].assign(X.row(s).begin(), X.row(s).end());
        for (std::size_t i = 0; i < layers.size(); ++i) {
            apply_layer_inference(layers[i], inputs[i], inputs[i + 1]);
            if (layers[i].kind == LayerKind::dropout && dropout) {
                const auto& mask = dropout->masks[dropout_ordinal[i]];
                for (std::size_t c = 0; c < layers[i].out_dim; ++c) {
                    inputs[i + 1][c] = inputs[i][c] * mask[s * layers[i].out_dim + c];
                }
            }
        }
        const auto& z = inputs.back();
        const int y = labels[s] - 1;
        if (y < 0 || static_cast<std::size_t>(y) >= z.size()) {
            throw InputError("label " + std::to_string(labels[s]) + " outside network output range");
        }
        const double lse = log_sum_exp(z);
        total_loss += lse - z[static_cast<std::size_t>(y)];

        if (!grad) continue;

        // dL/dz for the mean loss over the batch.
        delta.resize(z.size());
        for (std::size_t c = 0; c < z.size(); ++c) {
            delta[c] = std::exp(z[c] - lse) / static_cast<double>(n);
        }
        delta[static_cast<std::size_t>(y)] -= 1.0 / static_cast<double>(n);

        for (std::size_t i = layers.size(); i-- > 0;) {
            const auto& layer = layers[i];
            const auto& in = inputs[i];
            switch (layer.kind) {
                case LayerKind::affine: {
                    double* gw = grad->data() + offsets[i];
                    double* gb = gw + layer.weights.size();
                    delta_prev.assign(layer.in_dim, 0.0);
                    for (std::size_t r = 0; r < layer.out_dim; ++r) {
                        const double g = delta[r];
                        gb[r] += g;
                        const double* w = layer.weights.data() + r * layer.in_dim;
                        double* gw_row = gw + r * layer.in_dim;
                        for (std::size_t c = 0; c < layer.in_dim; ++c) {
                            gw_row[c] += g * in[c];
                            delta_prev[c] += g * w[c];
                        }
                    }
                    std::swap(delta, delta_prev);
                    break;
                }
                case LayerKind::prelu: {
                    double* gs = grad->data() + offsets[i];
                    for (std::size_t c = 0; c < layer.out_dim; ++c) {
                        if (in[c] <= 0.0) {
                            gs[c] += delta[c] * in[c];
                            delta[c] *= layer.slopes[c];
                        }
                    }
                    break;
                }
                case LayerKind::relu:
                    for (std::size_t c = 0; c < layer.out_dim; ++c) {
                        if (in[c] <= 0.0) delta[c] = 0.0;
                    }
                    break;
                case LayerKind::leaky_relu:
                    for (std::size_t c = 0; c < layer.out_dim; ++c) {
                        if (in[c] <= 0.0) delta[c] *= layer.slope;
                    }
                    break;
                case LayerKind::dropout:
                    if (dropout) {
                        const auto& mask = dropout->masks[dropout_ordinal[i]];
                        for (std::size_t c = 0; c < layer.out_dim; ++c) {
                            delta[c] *= mask[s * layer.out_dim + c];
                        }
                    }
                    break;
                case LayerKind::identity:
                    break;
            }
        }
    }
    return total_loss / static_cast<double>(n);
}

double classification_accuracy(const FeedForwardNet& net, const Dataset& data) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto logits = net.forward(data.X.row(i));
        const auto arg = std::distance(logits.begin(), std::max_element(logits.begin(), logits.end()));
        if (static_cast<int>(arg) + 1 == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

FeedForwardNet train(const std::vector<LayerSpec>& spec, const Dataset& data, const TrainConfig& cfg,
                     TrainSummary* summary) {
    cfg.validate();
    data.validate();
    FeedForwardNet net = initialize_net(spec, cfg.seed);
    if (static_cast<std::size_t>(data.class_count) != net.output_dim()) {
        throw ConfigError("dataset has " + std::to_string(data.class_count) + " classes but network outputs " +
                          std::to_string(net.output_dim()));
    }
    if (data.feature_dim() != net.input_dim()) {
        throw ConfigError("dataset feature dimension does not match network input");
    }
    if (cfg.epochs == 0) {
        if (summary) *summary = {0.0, 0.0, classification_accuracy(net, data), 0};
        return net;
    }

    net.set_mode(NetMode::train);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

    std::vector<double> params = collect_parameters(net);
    std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0), grad;
    std::size_t step = 0;

    const std::size_t n = data.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<std::size_t> dropout_dims;
    for (const auto& layer : net.layers()) {
        if (layer.kind == LayerKind::dropout) dropout_dims.push_back(layer.out_dim);
    }

    double first_epoch_loss = 0.0, epoch_loss = 0.0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t bn = std::min(cfg.batch_size, n - start);
            Matrix xb(bn, data.feature_dim());
            std::vector<int> yb(bn);
            for (std::size_t i = 0; i < bn; ++i) {
                xb.set_row(i, data.X.row(order[start + i]));
                yb[i] = data.labels[order[start + i]];
            }

            DropoutMasks masks;
            if (!dropout_dims.empty()) {
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                for (const auto& layer : net.layers()) {
                    if (layer.kind != LayerKind::dropout) continue;
                    auto& mask = masks.masks.emplace_back(bn * layer.out_dim);
                    for (auto& entry : mask) {
                        entry = (unit(rng) < layer.keep_prob) ? 1.0 / layer.keep_prob : 0.0;
                    }
                }
            }

            const double loss =
                loss_and_gradient(net, xb, yb, &grad, dropout_dims.empty() ? nullptr : &masks);
            if (!std::isfinite(loss)) {
                throw NumericError("training diverged: non-finite loss at epoch " + std::to_string(epoch));
            }
            epoch_loss += loss * static_cast<double>(bn);

            ++step;
            const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
            for (std::size_t p = 0; p < params.size(); ++p) {
                m[p] = cfg.adam_beta1 * m[p] + (1.0 - cfg.adam_beta1) * grad[p];
                v[p] = cfg.adam_beta2 * v[p] + (1.0 - cfg.adam_beta2) * grad[p] * grad[p];
                params[p] -= cfg.learning_rate * (m[p] / bc1) / (std::sqrt(v[p] / bc2) + cfg.adam_eps);
            }
            set_parameters(net, params);
        }
        epoch_loss /= static_cast<double>(n);
        if (epoch == 0) first_epoch_loss = epoch_loss;
    }

    net.set_mode(NetMode::inference);
    if (summary) {
        summary->first_epoch_loss = first_epoch_loss;
        summary->final_epoch_loss = epoch_loss;
        summary->epochs_run = cfg.epochs;
        summary->train_accuracy = classification_accuracy(net, data);
    }
    return net;
}

namespace {

constexpr int kWeightFileVersion = 1;

nlohmann::json layer_to_json(const LayerSpec& layer) {
    nlohmann::json j;
    j["kind"] = layer_kind_name(layer.kind);
    j["in_dim"] = layer.in_dim;
    j["out_dim"] = layer.out_dim;
    switch (layer.kind) {
        case LayerKind::affine:
            j["weights"] = layer.weights;
            j["bias"] = layer.bias;
            break;
        case LayerKind::prelu:
            j["slopes"] = layer.slopes;
            break;
        case LayerKind::leaky_relu:
            j["slope"] = layer.slope;
            break;
        case LayerKind::dropout:
            j["keep_prob"] = layer.keep_prob;
            break;
        default:
            break;
    }
    return j;
}

LayerSpec layer_from_json(const nlohmann::json& j, std::size_t index) {
    LayerSpec layer;
    const std::string where = "layers[" + std::to_string(index) + "]";
    try {
        layer.kind = layer_kind_from_name(j.at("kind").get<std::string>());
        layer.in_dim = j.at("in_dim").get<std::size_t>();
        layer.out_dim = j.at("out_dim").get<std::size_t>();
        switch (layer.kind) {
            case LayerKind::affine:
                layer.weights = j.at("weights").get<std::vector<double>>();
                layer.bias = j.at("bias").get<std::vector<double>>();
                break;
            case LayerKind::prelu:
                layer.slopes = j.at("slopes").get<std::vector<double>>();
                break;
            case LayerKind::leaky_relu:
                layer.slope = j.at("slope").get<double>();
                break;
            case LayerKind::dropout:
                layer.keep_prob = j.at("keep_prob").get<double>();
                break;
            default:
                break;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + ": " + e.what());
    }
    try {
        layer.validate();
    } catch (const InputError& e) {
        throw ParseError(where + ": " + e.what());
    }
    return layer;
}

}  // namespace

void save_weights(const FeedForwardNet& net, const std::string& path) {
    nlohmann::json j;
    j["version"] = kWeightFileVersion;
    j["input_dim"] = net.input_dim();
    j["num_classes"] = net.output_dim();
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : net.layers()) j["layers"].push_back(layer_to_json(layer));
    std::ofstream out(path);
    if (!out) throw InputError("cannot write weight file: " + path);
    out << j.dump(2) << '\n';
}

FeedForwardNet load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open weight file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("weight file " + path + ": " + e.what());
    }
    if (!j.contains("version") || !j["version"].is_number_integer()) {
        throw ParseError("weight file " + path + ": missing version field");
    }
    if (j["version"].get<int>() != kWeightFileVersion) {
        throw ParseError("weight file " + path + ": unsupported version " + j["version"].dump() + ", expected " +
                         std::to_string(kWeightFileVersion));
    }
    std::vector<LayerSpec> layers;
    try {
        const auto& jl = j.at("layers");
        for (std::size_t i = 0; i < jl.size(); ++i) layers.push_back(layer_from_json(jl[i], i));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("weight file " + path + ": " + e.what());
    }
    FeedForwardNet net = [&] {
        try {
            return FeedForwardNet(std::move(layers));
        } catch (const InputError& e) {
            throw ParseError("weight file " + path + ": " + e.what());
        }
    }();
    std::size_t declared_input = 0, declared_classes = 0;
    try {
        declared_input = j.at("input_dim").get<std::size_t>();
        declared_classes = j.at("num_classes").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("weight file " + path + ": " + e.what());
    }
    if (declared_input != net.input_dim() || declared_classes != net.output_dim()) {
        throw ParseError("weight file " + path + ": declared dimensions do not match layer stack");
    }
    return net;
}

}  // namespace streamlens
