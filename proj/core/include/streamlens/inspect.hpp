#pragma once

#include <string>
#include <vector>

#include "streamlens/streams.hpp"
#include "streamlens/tree.hpp"

namespace streamlens {

/// Mean logistic loss of (weights, bias) on X with binary targets y in {0,1},
/// plus its gradient. Exposed for optimizer internals and gradient checks.
double logistic_loss_and_gradient(const Matrix& X, const std::vector<int>& y, std::span<const double> weights,
                                  double bias, std::vector<double>* weight_grad, double* bias_grad);

struct L1FitResult {
    std::vector<double> weights;
    double bias = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double objective = 0.0;             // loss + l1 * ||w||_1 at the solution
    std::vector<double> objective_trace;
};

/// Proximal gradient (ISTA) for mean logistic loss + l1 * ||w||_1 with an
/// unpenalized bias. Deterministic from zero initialization; the step size is
/// 1/L with L bounded through power iteration on the data Gram matrix.
/// Stops at proximal-gradient norm <= tol or after max_iterations.
L1FitResult fit_l1_logistic(const Matrix& X, const std::vector<int>& y, double l1_strength,
                            std::size_t max_iterations = 10000, double tol = 1e-6);

struct ContrastSpec {
    enum class Mode { one_vs_all, one_vs_group };
    Mode mode = Mode::one_vs_all;
    std::vector<int> group_labels;  // negative-class stream labels for one_vs_group

    void validate() const;
};

struct ContrastData {
    Matrix X;
    std::vector<int> y;                   // 1 for the target stream, 0 for the contrast group
    std::vector<std::size_t> object_ids;  // rows of the originating dataset
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::size_t excluded_high_error = 0;  // alpha-flagged objects dropped
    std::size_t excluded_unreliable = 0;  // members of gamma-unreliable streams dropped
};

/// Assembles the inspector training set for one stream label. Refuses
/// unreliable target labels (deliberate interpretation) with a RefusalError
/// naming the violated criterion. Alpha-flagged objects and members of
/// unreliable streams never enter the result.
ContrastData build_contrast_dataset(const StreamTable& table, int label, const ContrastSpec& spec,
                                    const Dataset& data);

/// One-vs-all (or one-vs-group) L1 logistic inspector. Features are
/// standardized to train-set mean/variance before fitting; coefficients are
/// reported in standardized units with the transform stored.
struct LogisticInspector {
    int target_label = 0;
    double l1_strength = 0.0;
    ContrastSpec contrast;
    std::vector<double> weights;  // standardized space
    double bias = 0.0;
    std::vector<double> feature_means;
    std::vector<double> feature_scales;
    bool converged = false;

    double decision_score(std::span<const double> x) const;
};

LogisticInspector fit_logistic_inspector(const Matrix& X, const std::vector<int>& y, double l1_strength);

LogisticInspector fit_logistic_inspector_for_label(const StreamTable& table, const Dataset& data, int label,
                                                   const ContrastSpec& spec, double l1_strength);

/// Exact Mann-Whitney AUC; ties contribute 1/2. Throws InputError when only
/// one class is present.
double roc_auc(std::span<const double> scores, const std::vector<int>& y);

/// Column means of the selected rows.
std::vector<double> feature_average(const Matrix& X, std::span<const std::size_t> rows);

/// Multiclass Gini CART over stream labels, with rule extraction: each leaf
/// yields the conjunction of threshold predicates on its root path.
class ClassificationTree {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        int predicted_label = 0;               // leaves only
        std::vector<std::size_t> class_counts; // leaves only, indexed by label value
    };

    static ClassificationTree fit(const Matrix& X, const std::vector<int>& labels, const TreeHyperParams& hp);

    int predict(std::span<const double> x) const;
    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t feature_dim() const { return feature_dim_; }

    struct Predicate {
        std::size_t feature = 0;
        bool greater = false;  // false: x[feature] <= threshold, true: x[feature] > threshold
        double threshold = 0.0;
    };
    struct Rule {
        std::vector<Predicate> predicates;
        int predicted_label = 0;
        std::size_t support = 0;
    };
    /// One rule per leaf, in depth-first left-first order. The rules partition
    /// the feature space.
    std::vector<Rule> extract_rules() const;

private:
    std::vector<Node> nodes_;
    std::size_t feature_dim_ = 0;
};

struct RankedFeature {
    std::size_t feature = 0;
    std::string name;
    double coefficient = 0.0;
};

struct InspectorReport {
    int stream_label = 0;
    std::string kind;  // "logistic" or "tree"
    double auc = 0.0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::size_t excluded_high_error = 0;
    std::size_t excluded_unreliable = 0;
    std::vector<RankedFeature> top_features;               // logistic, by |coefficient|
    std::vector<ClassificationTree::Rule> rules;           // tree inspector
    double bias = 0.0;
};

InspectorReport make_logistic_report(const LogisticInspector& inspector, const ContrastData& train,
                                     const std::vector<std::string>& feature_names, std::size_t top_k);

/// JSON export {stream_label, kind, coefficients|rules, auc, training_set_sizes, excluded_counts}.
void save_inspector_report(const InspectorReport& report, const std::string& path);

}  // namespace streamlens
