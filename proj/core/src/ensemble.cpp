#include "streamlens/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace streamlens {

DistillingEnsemble fit_distilling_ensemble(const FeedForwardNet& net, const Dataset& data,
                                           const std::vector<TreeHyperParams>& hyperparams,
                                           bool use_multipliers, std::vector<double>* mse_trace) {
    data.validate();
    const std::size_t m = net.depth();
    if (hyperparams.size() != m) {
        throw ConfigError("expected " + std::to_string(m) + " tree hyperparameter sets (one per non-final layer), got " +
                          std::to_string(hyperparams.size()));
    }
    if (data.feature_dim() != net.input_dim()) {
        throw ConfigError("dataset feature dimension does not match network input");
    }

    const std::size_t n = data.size();
    const std::size_t c_dim = net.output_dim();

    std::vector<Stream> streams;
    streams.reserve(n);
    Matrix logits(n, c_dim);
    for (std::size_t i = 0; i < n; ++i) {
        streams.push_back(net.capture_stream(data.X.row(i)));
        logits.set_row(i, streams.back().logits());
    }

    DistillingEnsemble ensemble;
    ensemble.base_prediction.assign(c_dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < c_dim; ++c) ensemble.base_prediction[c] += logits(i, c);
    }
    for (auto& b : ensemble.base_prediction) b /= static_cast<double>(n);

    Matrix prediction(n, c_dim);
    for (std::size_t i = 0; i < n; ++i) prediction.set_row(i, ensemble.base_prediction);

    auto current_mse = [&] {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < c_dim; ++c) {
                const double d = logits(i, c) - prediction(i, c);
                acc += d * d;
            }
        }
        return acc / static_cast<double>(n * c_dim);
    };
    if (mse_trace) {
        mse_trace->clear();
        mse_trace->push_back(current_mse());
    }

    Matrix residuals(n, c_dim);
    for (std::size_t ell = 0; ell < m; ++ell) {
        const std::size_t a_dim = net.activation_dim(ell);
        Matrix activations(n, a_dim);
        for (std::size_t i = 0; i < n; ++i) {
            activations.set_row(i, streams[i].activations[ell]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < c_dim; ++c) {
                residuals(i, c) = logits(i, c) - prediction(i, c);
            }
        }

        ensemble.trees.push_back(RegressionTree::fit(activations, residuals, hyperparams[ell]));
        const auto& tree = ensemble.trees.back();

        Matrix outputs(n, c_dim);
        for (std::size_t i = 0; i < n; ++i) outputs.set_row(i, tree.predict(activations.row(i)));

        const double beta = use_multipliers ? fit_multiplier(outputs, residuals) : 1.0;
        ensemble.multipliers.push_back(beta);

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < c_dim; ++c) prediction(i, c) += beta * outputs(i, c);
        }
        if (mse_trace) mse_trace->push_back(current_mse());
    }
    return ensemble;
}

std::vector<double> ensemble_predict(const DistillingEnsemble& ensemble, const Stream& stream) {
    if (stream.activations.size() < ensemble.tree_count() + 1) {
        throw InputError("stream is too short for this ensemble");
    }
    std::vector<double> out = ensemble.base_prediction;
    for (std::size_t ell = 0; ell < ensemble.tree_count(); ++ell) {
        const auto& a = stream.activations[ell];
        if (a.size() != ensemble.trees[ell].feature_dim()) {
            throw InputError("stale model: activation " + std::to_string(ell) + " has dimension " +
                             std::to_string(a.size()) + ", tree expects " +
                             std::to_string(ensemble.trees[ell].feature_dim()));
        }
        const auto scores = ensemble.trees[ell].predict(a);
        const double beta = ensemble.multipliers[ell];
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += beta * scores[c];
    }
    return out;
}

double fit_multiplier(const Matrix& tree_outputs, const Matrix& residuals) {
    if (tree_outputs.rows() != residuals.rows() || tree_outputs.cols() != residuals.cols()) {
        throw InputError("fit_multiplier: shape mismatch");
    }
    double dot = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < tree_outputs.rows(); ++i) {
        for (std::size_t c = 0; c < tree_outputs.cols(); ++c) {
            dot += tree_outputs(i, c) * residuals(i, c);
            norm2 += tree_outputs(i, c) * tree_outputs(i, c);
        }
    }
    if (norm2 == 0.0) return 1.0;
    return dot / norm2;
}

const char* error_metric_name(ErrorMetric metric) {
    return metric == ErrorMetric::logit_mse ? "logit_mse" : "prob_cross_entropy";
}

ErrorMetric error_metric_from_name(const std::string& name) {
    if (name == "logit_mse" || name == "mse") return ErrorMetric::logit_mse;
    if (name == "prob_cross_entropy" || name == "ce" || name == "cross_entropy") {
        return ErrorMetric::prob_cross_entropy;
    }
    throw ParseError("unknown error metric '" + name + "'");
}

double logit_discrepancy(std::span<const double> net_logits, std::span<const double> ensemble_logits,
                         ErrorMetric metric) {
    if (net_logits.size() != ensemble_logits.size() || net_logits.empty()) {
        throw InputError("logit vectors must have equal nonzero length");
    }
    if (metric == ErrorMetric::logit_mse) {
        double acc = 0.0;
        for (std::size_t c = 0; c < net_logits.size(); ++c) {
            const double d = net_logits[c] - ensemble_logits[c];
            acc += d * d;
        }
        return acc / static_cast<double>(net_logits.size());
    }
    // Full cross-entropy H(p, q) = -sum p log q, computed through log-softmax.
    const auto p = softmax(net_logits);
    const double lse_q = log_sum_exp(ensemble_logits);
    double ce = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        ce -= p[c] * (ensemble_logits[c] - lse_q);
    }
    return ce;
}

double distillation_error(const FeedForwardNet& net, const DistillingEnsemble& ensemble,
                          std::span<const double> x, ErrorMetric metric) {
    const Stream stream = net.capture_stream(x);
    const auto ens = ensemble_predict(ensemble, stream);
    return logit_discrepancy(stream.logits(), ens, metric);
}

ObjectFidelity object_fidelity(const FeedForwardNet& net, const DistillingEnsemble& ensemble,
                               std::span<const double> x) {
    const Stream stream = net.capture_stream(x);
    const auto ens = ensemble_predict(ensemble, stream);
    ObjectFidelity f;
    f.logit_mse = logit_discrepancy(stream.logits(), ens, ErrorMetric::logit_mse);
    f.cross_entropy = logit_discrepancy(stream.logits(), ens, ErrorMetric::prob_cross_entropy);
    const auto& z = stream.logits();
    const auto arg_net = std::distance(z.begin(), std::max_element(z.begin(), z.end()));
    const auto arg_ens = std::distance(ens.begin(), std::max_element(ens.begin(), ens.end()));
    f.argmax_agrees = (arg_net == arg_ens);
    return f;
}

FidelityReport evaluate_fidelity(const FeedForwardNet& net, const DistillingEnsemble& ensemble,
                                 const Dataset& data) {
    FidelityReport report;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto f = object_fidelity(net, ensemble, data.X.row(i));
        report.mean_logit_mse += f.logit_mse;
        report.mean_cross_entropy += f.cross_entropy;
        if (f.argmax_agrees) ++agree;
    }
    const auto n = static_cast<double>(data.size());
    report.mean_logit_mse /= n;
    report.mean_cross_entropy /= n;
    report.argmax_agreement = static_cast<double>(agree) / n;
    return report;
}

namespace {

constexpr int kEnsembleFileVersion = 1;

nlohmann::json node_to_json(const RegressionTree& tree, int node_id) {
    const auto& node = tree.nodes()[static_cast<std::size_t>(node_id)];
    nlohmann::json j;
    if (node.feature < 0) {
        j["scores"] = tree.leaf_scores().row_copy(static_cast<std::size_t>(node.leaf_index - 1));
    } else {
        j["feature"] = node.feature;
        j["threshold"] = node.threshold;
        j["left"] = node_to_json(tree, node.left);
        j["right"] = node_to_json(tree, node.right);
    }
    return j;
}

// Rebuilds the node array in depth-first left-first order, which restores the
// original leaf numbering.
void node_from_json(const nlohmann::json& j, std::vector<RegressionTree::Node>& nodes,
                    std::vector<std::vector<double>>& scores) {
    const auto node_id = nodes.size();
    nodes.emplace_back();
    if (j.contains("scores")) {
        nodes[node_id].leaf_index = static_cast<int>(scores.size()) + 1;
        scores.push_back(j.at("scores").get<std::vector<double>>());
        return;
    }
    nodes[node_id].feature = j.at("feature").get<int>();
    nodes[node_id].threshold = j.at("threshold").get<double>();
    nodes[node_id].left = static_cast<int>(nodes.size());
    node_from_json(j.at("left"), nodes, scores);
    nodes[node_id].right = static_cast<int>(nodes.size());
    node_from_json(j.at("right"), nodes, scores);
}

}  // namespace

void save_ensemble(const DistillingEnsemble& ensemble, const std::string& path) {
    nlohmann::json j;
    j["version"] = kEnsembleFileVersion;
    j["base_prediction"] = ensemble.base_prediction;
    j["multipliers"] = ensemble.multipliers;
    j["trees"] = nlohmann::json::array();
    for (const auto& tree : ensemble.trees) {
        nlohmann::json tj;
        tj["feature_dim"] = tree.feature_dim();
        tj["root"] = node_to_json(tree, 0);
        j["trees"].push_back(std::move(tj));
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write ensemble file: " + path);
    out << j.dump(2) << '\n';
}

DistillingEnsemble load_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open ensemble file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("ensemble file " + path + ": " + e.what());
    }
    try {
        if (j.at("version").get<int>() != kEnsembleFileVersion) {
            throw ParseError("ensemble file " + path + ": unsupported version " + j["version"].dump());
        }
        DistillingEnsemble ensemble;
        ensemble.base_prediction = j.at("base_prediction").get<std::vector<double>>();
        ensemble.multipliers = j.at("multipliers").get<std::vector<double>>();
        for (const auto& tj : j.at("trees")) {
            std::vector<RegressionTree::Node> nodes;
            std::vector<std::vector<double>> scores;
            node_from_json(tj.at("root"), nodes, scores);
            ensemble.trees.emplace_back(std::move(nodes), Matrix::from_rows(scores),
                                        tj.at("feature_dim").get<std::size_t>());
        }
        if (ensemble.multipliers.size() != ensemble.trees.size()) {
            throw ParseError("ensemble file " + path + ": multiplier count does not match tree count");
        }
        return ensemble;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("ensemble file " + path + ": " + e.what());
    } catch (const InputError& e) {
        throw ParseError("ensemble file " + path + ": " + e.what());
    }
}

}  // namespace streamlens
