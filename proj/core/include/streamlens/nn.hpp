#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "streamlens/common.hpp"
#include "streamlens/dataset.hpp"

namespace streamlens {

enum class LayerKind { affine, prelu, relu, leaky_relu, dropout, identity };

const char* layer_kind_name(LayerKind kind);
LayerKind layer_kind_from_name(const std::string& name);

/// One primitive layer. A logical layer of the network is an affine map fused
/// with the nonlinearity/dropout primitives that follow it.
struct LayerSpec {
    LayerKind kind = LayerKind::identity;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;

    std::vector<double> weights;  // affine: out_dim x in_dim, row-major
    std::vector<double> bias;     // affine: out_dim
    std::vector<double> slopes;   // prelu: one learnable slope per channel
    double slope = 0.01;          // leaky_relu
    double keep_prob = 1.0;       // dropout, in (0, 1]

    static LayerSpec affine(std::size_t in, std::size_t out);
    static LayerSpec prelu(std::size_t dim, double init_slope = 0.25);
    static LayerSpec relu(std::size_t dim);
    static LayerSpec leaky_relu(std::size_t dim, double slope = 0.01);
    static LayerSpec dropout(std::size_t dim, double keep_prob);
    static LayerSpec identity(std::size_t dim);

    void validate() const;
    std::size_t parameter_count() const;
};

enum class NetMode { train, inference };

/// The tuple of activations [a^0(x), ..., a^M(x)]: the raw input followed by
/// the output of each logical layer. The last entry holds the logits.
struct Stream {
    std::vector<std::vector<double>> activations;

    std::size_t depth() const { return activations.empty() ? 0 : activations.size() - 1; }
    const std::vector<double>& input() const { return activations.front(); }
    const std::vector<double>& logits() const { return activations.back(); }
};

class FeedForwardNet {
public:
    FeedForwardNet() = default;
    explicit FeedForwardNet(std::vector<LayerSpec> layers);

    std::size_t input_dim() const;
    std::size_t output_dim() const;
    /// Number of logical layers M (affine blocks with their fused primitives).
    std::size_t depth() const { return logical_ends_.size(); }
    /// Dimension of activation a^ell, ell in 0..M.
    std::size_t activation_dim(std::size_t ell) const;

    NetMode mode() const { return mode_; }
    void set_mode(NetMode mode) { mode_ = mode; }

    const std::vector<LayerSpec>& layers() const { return layers_; }
    std::vector<LayerSpec>& mutable_layers() { return layers_; }

    /// Raw pre-softmax outputs NN(x). Deterministic in inference mode; dropout
    /// is the identity. Throws InputError on dimension mismatch.
    std::vector<double> forward(std::span<const double> x) const;

    /// Activations after every logical layer, a^0 = x, a^M = forward(x).
    Stream capture_stream(std::span<const double> x) const;

private:
    std::vector<LayerSpec> layers_;
    std::vector<std::size_t> logical_ends_;  // one past the last primitive of each logical layer
    NetMode mode_ = NetMode::inference;
};

/// Softmax with max-shift; entries positive and summing to 1.
/// Throws NumericError on non-finite input.
std::vector<double> softmax(std::span<const double> logits);
double log_sum_exp(std::span<const double> values);

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 128;
    double learning_rate = 3e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainSummary {
    double first_epoch_loss = 0.0;
    double final_epoch_loss = 0.0;
    double train_accuracy = 0.0;
    std::size_t epochs_run = 0;
};

/// Seeded initialization: affine weights uniform fan-in scaled, biases zero,
/// PReLU slopes at their configured initial value. Returns an inference-mode net.
FeedForwardNet initialize_net(const std::vector<LayerSpec>& spec, std::uint64_t seed);

/// Minibatch Adam on softmax cross-entropy. Dropout uses inverted scaling
/// during training and is the identity at inference. Throws NumericError with
/// the epoch index if the loss turns non-finite.
FeedForwardNet train(const std::vector<LayerSpec>& spec, const Dataset& data, const TrainConfig& cfg,
                     TrainSummary* summary = nullptr);

/// Trainable parameters flattened in layer order (affine weights, affine bias,
/// prelu slopes). Used by the optimizer and by gradient checks.
std::vector<double> collect_parameters(const FeedForwardNet& net);
void set_parameters(FeedForwardNet& net, std::span<const double> params);

/// Per-dropout-layer multiplicative masks (sample-major), entries in {0, 1/keep}.
struct DropoutMasks {
    // masks[k] has batch_size * out_dim entries for the k-th dropout layer.
    std::vector<std::vector<double>> masks;
};

/// Mean softmax cross-entropy of the batch and its gradient with respect to
/// the flattened parameters. Without masks dropout acts as the identity.
double loss_and_gradient(const FeedForwardNet& net, const Matrix& X, const std::vector<int>& labels,
                         std::vector<double>* grad, const DropoutMasks* dropout = nullptr);

double classification_accuracy(const FeedForwardNet& net, const Dataset& data);

/// Weight file: JSON {version, input_dim, num_classes, layers:[...]}, doubles
/// preserved exactly across save/load.
void save_weights(const FeedForwardNet& net, const std::string& path);
FeedForwardNet load_weights(const std::string& path);

}  // namespace streamlens
