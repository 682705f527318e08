#pragma once

#include <string>
#include <vector>

#include "streamlens/dataset.hpp"
#include "streamlens/nn.hpp"
#include "streamlens/tree.hpp"

namespace streamlens {

/// Layer-wise boosted distillation of a network: a constant base prediction
/// (the mean of the network logits over the training set) plus one regression
/// tree per non-final layer, tree ell reading activation a^ell. Multipliers
/// scale each tree's contribution and stay at 1 unless fitted.
struct DistillingEnsemble {
    std::vector<double> base_prediction;
    std::vector<RegressionTree> trees;
    std::vector<double> multipliers;

    std::size_t tree_count() const { return trees.size(); }
    std::size_t class_count() const { return base_prediction.size(); }
};

/// Boosting with MSE loss on the raw logits NN(x): each tree is fitted to the
/// current residuals on its layer's activations, then the running prediction
/// absorbs the (optionally multiplier-scaled) tree output. The dataset labels
/// are never consulted. Per-tree training MSE traces are written to
/// mse_trace when provided (entry 0 holds the base-prediction MSE).
DistillingEnsemble fit_distilling_ensemble(const FeedForwardNet& net, const Dataset& data,
                                           const std::vector<TreeHyperParams>& hyperparams,
                                           bool use_multipliers = false,
                                           std::vector<double>* mse_trace = nullptr);

/// base + sum_ell multiplier_ell * T^ell(a^ell). Only activations 0..M-1 are
/// read; the final activation (the distillation target) never is.
std::vector<double> ensemble_predict(const DistillingEnsemble& ensemble, const Stream& stream);

/// Least-squares scalar for one boosting stage:
/// argmin_b ||residuals - b * tree_outputs||^2. Returns 1 when the tree
/// output is identically zero.
double fit_multiplier(const Matrix& tree_outputs, const Matrix& residuals);

enum class ErrorMetric { logit_mse, prob_cross_entropy };

const char* error_metric_name(ErrorMetric metric);
ErrorMetric error_metric_from_name(const std::string& name);

/// Discrepancy between two logit vectors: mean squared difference, or the
/// cross-entropy -sum p log q between their softmax distributions.
double logit_discrepancy(std::span<const double> net_logits, std::span<const double> ensemble_logits,
                         ErrorMetric metric);

double distillation_error(const FeedForwardNet& net, const DistillingEnsemble& ensemble,
                          std::span<const double> x, ErrorMetric metric);

struct ObjectFidelity {
    double logit_mse = 0.0;
    double cross_entropy = 0.0;
    bool argmax_agrees = false;
};

ObjectFidelity object_fidelity(const FeedForwardNet& net, const DistillingEnsemble& ensemble,
                               std::span<const double> x);

struct FidelityReport {
    double mean_logit_mse = 0.0;
    double mean_cross_entropy = 0.0;
    double argmax_agreement = 0.0;  // fraction of objects
};

FidelityReport evaluate_fidelity(const FeedForwardNet& net, const DistillingEnsemble& ensemble,
                                 const Dataset& data);

/// Ensemble file: JSON {version, base_prediction, multipliers, trees:[...]}
/// with recursive node records. Round-trips preserve predictions bitwise.
void save_ensemble(const DistillingEnsemble& ensemble, const std::string& path);
DistillingEnsemble load_ensemble(const std::string& path);

}  // namespace streamlens
