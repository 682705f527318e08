#include "streamlens/inspect.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace streamlens {

namespace {

inline double log1pexp(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

void require_both_classes(const std::vector<int>& y) {
    const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
    const bool has_neg = std::find(y.begin(), y.end(), 0) != y.end();
    if (!has_pos || !has_neg) throw ConfigError("binary fit requires both classes present");
}

}  // namespace

double logistic_loss_and_gradient(const Matrix& X, const std::vector<int>& y, std::span<const double> weights,
                                  double bias, std::vector<double>* weight_grad, double* bias_grad) {
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    if (y.size() != n) throw InputError("label count does not match row count");
    if (weights.size() != p) throw InputError("weight dimension mismatch");

    if (weight_grad) weight_grad->assign(p, 0.0);
    if (bias_grad) *bias_grad = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = X.row(i);
        double z = bias;
        for (std::size_t j = 0; j < p; ++j) z += weights[j] * row[j];
        loss += log1pexp(z) - static_cast<double>(y[i]) * z;
        if (weight_grad || bias_grad) {
            const double r = sigmoid(z) - static_cast<double>(y[i]);
            if (weight_grad) {
                for (std::size_t j = 0; j < p; ++j) (*weight_grad)[j] += r * row[j];
            }
            if (bias_grad) *bias_grad += r;
        }
    }
    const double dn = static_cast<double>(n);
    if (weight_grad) {
        for (auto& g : *weight_grad) g /= dn;
    }
    if (bias_grad) *bias_grad /= dn;
    return loss / dn;
}

namespace {

// Upper bound on the logistic-loss Lipschitz constant: 0.25 times the largest
// eigenvalue of (1/n) [X 1]^T [X 1], estimated by power iteration.
double lipschitz_bound(const Matrix& X) {
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    std::vector<double> v(p + 1, 1.0 / std::sqrt(static_cast<double>(p + 1)));
    std::vector<double> xv(n), next(p + 1);
    double lambda = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = X.row(i);
            double acc = v[p];
            for (std::size_t j = 0; j < p; ++j) acc += row[j] * v[j];
            xv[i] = acc;
        }
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = X.row(i);
            for (std::size_t j = 0; j < p; ++j) next[j] += row[j] * xv[i];
            next[p] += xv[i];
        }
        for (auto& u : next) u /= static_cast<double>(n);
        const double norm = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
        if (norm == 0.0) break;
        lambda = norm;
        for (std::size_t j = 0; j <= p; ++j) v[j] = next[j] / norm;
    }
    return std::max(0.25 * lambda * 1.05, 1e-8);
}

inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace

L1FitResult fit_l1_logistic(const Matrix& X, const std::vector<int>& y, double l1_strength,
                            std::size_t max_iterations, double tol) {
    if (X.rows() == 0 || X.cols() == 0) throw InputError("empty design matrix");
    if (l1_strength < 0.0) throw InputError("l1_strength must be non-negative");
    require_both_classes(y);

    const std::size_t p = X.cols();
    const double step = 1.0 / lipschitz_bound(X);

    L1FitResult result;
    result.weights.assign(p, 0.0);
    result.bias = 0.0;

    std::vector<double> grad_w;
    double grad_b = 0.0;
    std::vector<double> w_next(p);

    auto objective = [&](const std::vector<double>& w, double b) {
        double l1 = 0.0;
        for (double wj : w) l1 += std::abs(wj);
        return logistic_loss_and_gradient(X, y, w, b, nullptr, nullptr) + l1_strength * l1;
    };

    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        logistic_loss_and_gradient(X, y, result.weights, result.bias, &grad_w, &grad_b);
        for (std::size_t j = 0; j < p; ++j) {
            w_next[j] = soft_threshold(result.weights[j] - step * grad_w[j], step * l1_strength);
        }
        const double b_next = result.bias - step * grad_b;

        // Norm of the generalized gradient map; zero exactly at a stationary
        // point of the composite objective.
        double gnorm2 = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double g = (result.weights[j] - w_next[j]) / step;
            gnorm2 += g * g;
        }
        {
            const double g = (result.bias - b_next) / step;
            gnorm2 += g * g;
        }

        result.weights = w_next;
        result.bias = b_next;
        result.iterations = iter + 1;
        result.objective_trace.push_back(objective(result.weights, result.bias));

        if (std::sqrt(gnorm2) <= tol) {
            result.converged = true;
            break;
        }
    }
    result.objective = objective(result.weights, result.bias);
    for (double wj : result.weights) {
        if (!std::isfinite(wj)) throw NumericError("logistic fit produced non-finite weights");
    }
    return result;
}

void ContrastSpec::validate() const {
    if (mode == Mode::one_vs_group && group_labels.empty()) {
        throw ConfigError("one_vs_group contrast needs a non-empty group");
    }
}

ContrastData build_contrast_dataset(const StreamTable& table, int label, const ContrastSpec& spec,
                                    const Dataset& data) {
    spec.validate();
    if (data.size() != table.object_label.size()) {
        throw InputError("dataset does not match the stream table population");
    }
    const StreamInfo& target = table.info(label);
    if (!target.reliable) {
        const std::size_t min_pop = table.config.resolve_min_population(table.total_population);
        throw RefusalError("stream label " + std::to_string(label) + " is unreliable: population " +
                           std::to_string(target.population) + " is below the minimum population " +
                           std::to_string(min_pop) +
                           (table.config.min_population ? " (absolute threshold)"
                                                        : " (gamma = " + std::to_string(table.config.gamma) + ")"));
    }
    if (spec.mode == ContrastSpec::Mode::one_vs_group) {
        for (int g : spec.group_labels) {
            if (g == label) throw ConfigError("contrast group contains the target label");
            table.info(g);  // existence check
        }
    }

    ContrastData out;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int obj_label = table.object_label[i];
        const bool is_positive = (obj_label == label);
        bool is_negative = false;
        if (!is_positive) {
            if (spec.mode == ContrastSpec::Mode::one_vs_all) {
                is_negative = true;
            } else {
                is_negative = std::find(spec.group_labels.begin(), spec.group_labels.end(), obj_label) !=
                              spec.group_labels.end();
            }
        }
        if (!is_positive && !is_negative) continue;
        if (table.object_flagged[i]) {
            ++out.excluded_high_error;
            continue;
        }
        if (!table.info(obj_label).reliable) {
            ++out.excluded_unreliable;
            continue;
        }
        rows.push_back(data.X.row_copy(i));
        out.y.push_back(is_positive ? 1 : 0);
        out.object_ids.push_back(i);
        if (is_positive) {
            ++out.positives;
        } else {
            ++out.negatives;
        }
    }
    if (out.positives == 0) throw ConfigError("target stream has no usable objects after filtering");
    if (out.negatives == 0) throw ConfigError("contrast group is empty after filtering");
    out.X = Matrix::from_rows(rows);
    return out;
}

double LogisticInspector::decision_score(std::span<const double> x) const {
    if (x.size() != weights.size()) throw InputError("inspector feature dimension mismatch");
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        z += weights[j] * (x[j] - feature_means[j]) / feature_scales[j];
    }
    return z;
}

LogisticInspector fit_logistic_inspector(const Matrix& X, const std::vector<int>& y, double l1_strength) {
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    if (n == 0) throw InputError("empty inspector training set");

    LogisticInspector inspector;
    inspector.l1_strength = l1_strength;
    inspector.feature_means.assign(p, 0.0);
    inspector.feature_scales.assign(p, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) inspector.feature_means[j] += X(i, j);
    }
    for (auto& m : inspector.feature_means) m /= static_cast<double>(n);
    std::vector<double> var(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const double d = X(i, j) - inspector.feature_means[j];
            var[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(n));
        inspector.feature_scales[j] = sd > 0.0 ? sd : 1.0;
    }

    Matrix Z(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            Z(i, j) = (X(i, j) - inspector.feature_means[j]) / inspector.feature_scales[j];
        }
    }
    const L1FitResult fit = fit_l1_logistic(Z, y, l1_strength);
    inspector.weights = fit.weights;
    inspector.bias = fit.bias;
    inspector.converged = fit.converged;
    return inspector;
}

LogisticInspector fit_logistic_inspector_for_label(const StreamTable& table, const Dataset& data, int label,
                                                   const ContrastSpec& spec, double l1_strength) {
    const ContrastData contrast = build_contrast_dataset(table, label, spec, data);
    LogisticInspector inspector = fit_logistic_inspector(contrast.X, contrast.y, l1_strength);
    inspector.target_label = label;
    inspector.contrast = spec;
    return inspector;
}

double roc_auc(std::span<const double> scores, const std::vector<int>& y) {
    if (scores.size() != y.size() || scores.empty()) throw InputError("scores and labels must match and be non-empty");
    std::size_t n_pos = 0;
    for (int v : y) {
        if (v != 0 && v != 1) throw InputError("roc_auc labels must be 0/1");
        n_pos += static_cast<std::size_t>(v);
    }
    const std::size_t n_neg = y.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw InputError("roc_auc undefined: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks across ties (midrank), then the Mann-Whitney statistic.
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double rank_sum_pos = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (y[k] == 1) rank_sum_pos += rank[k];
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<double> feature_average(const Matrix& X, std::span<const std::size_t> rows) {
    if (rows.empty()) throw InputError("feature_average of an empty subset");
    std::vector<double> mean(X.cols(), 0.0);
    for (std::size_t r : rows) {
        for (std::size_t j = 0; j < X.cols(); ++j) mean[j] += X(r, j);
    }
    for (auto& m : mean) m /= static_cast<double>(rows.size());
    return mean;
}

namespace {

double gini_impurity(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        acc += p * p;
    }
    return 1.0 - acc;
}

struct GiniSplit {
    std::size_t feature = 0;
    double threshold = 0.0;
    double decrease = 0.0;
};

std::optional<GiniSplit> best_gini_split(const Matrix& X, const std::vector<int>& labels, int max_label,
                                         std::span<const std::size_t> samples, std::size_t min_samples_leaf) {
    const std::size_t n = samples.size();
    if (n < 2) return std::nullopt;

    std::vector<std::size_t> total_counts(static_cast<std::size_t>(max_label) + 1, 0);
    for (std::size_t idx : samples) ++total_counts[static_cast<std::size_t>(labels[idx])];
    const double parent = gini_impurity(total_counts, n);

    std::optional<GiniSplit> best;
    std::vector<std::size_t> order(samples.begin(), samples.end());
    std::vector<std::size_t> left_counts(total_counts.size());

    for (std::size_t feature = 0; feature < X.cols(); ++feature) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return X(a, feature) < X(b, feature); });
        std::fill(left_counts.begin(), left_counts.end(), 0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            ++left_counts[static_cast<std::size_t>(labels[order[i]])];
            const double xi = X(order[i], feature);
            const double xj = X(order[i + 1], feature);
            if (!(xi < xj)) continue;
            const std::size_t n_left = i + 1;
            const std::size_t n_right = n - n_left;
            if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;

            double gini_left = 0.0, gini_right = 0.0;
            {
                double acc_l = 0.0, acc_r = 0.0;
                for (std::size_t c = 0; c < left_counts.size(); ++c) {
                    const double pl = static_cast<double>(left_counts[c]) / static_cast<double>(n_left);
                    const double pr = static_cast<double>(total_counts[c] - left_counts[c]) /
                                      static_cast<double>(n_right);
                    acc_l += pl * pl;
                    acc_r += pr * pr;
                }
                gini_left = 1.0 - acc_l;
                gini_right = 1.0 - acc_r;
            }
            const double decrease = parent -
                                    (static_cast<double>(n_left) * gini_left +
                                     static_cast<double>(n_right) * gini_right) /
                                        static_cast<double>(n);
            if (decrease <= 0.0) continue;
            if (!best || decrease > best->decrease) {
                best = GiniSplit{feature, 0.5 * (xi + xj), decrease};
            }
        }
    }
    return best;
}

}  // namespace

ClassificationTree ClassificationTree::fit(const Matrix& X, const std::vector<int>& labels,
                                           const TreeHyperParams& hp) {
    hp.validate();
    if (X.rows() == 0) throw InputError("cannot fit a tree on empty data");
    if (labels.size() != X.rows()) throw InputError("label count does not match row count");
    std::vector<int> distinct(labels);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw InputError("tree inspector requires at least two distinct labels");
    if (distinct.front() < 0) throw InputError("labels must be non-negative");
    const int max_label = distinct.back();

    const std::size_t n_total = X.rows();
    const std::size_t min_leaf = hp.resolve_min_samples(n_total);

    ClassificationTree tree;
    tree.feature_dim_ = X.cols();

    struct Builder {
        const Matrix& X;
        const std::vector<int>& labels;
        int max_label;
        const TreeHyperParams& hp;
        std::size_t min_leaf;
        std::size_t n_total;
        ClassificationTree& tree;

        int build(std::vector<std::size_t>& samples, int depth) {
            const int node_id = static_cast<int>(tree.nodes_.size());
            tree.nodes_.emplace_back();

            std::optional<GiniSplit> split;
            if (depth < hp.max_depth && samples.size() >= 2 * min_leaf) {
                split = best_gini_split(X, labels, max_label, samples, min_leaf);
                if (split) {
                    const double weighted = split->decrease * static_cast<double>(samples.size()) /
                                            static_cast<double>(n_total);
                    if (weighted < hp.min_impurity_decrease) split.reset();
                }
            }

            if (!split) {
                auto& node = tree.nodes_[static_cast<std::size_t>(node_id)];
                node.class_counts.assign(static_cast<std::size_t>(max_label) + 1, 0);
                for (std::size_t idx : samples) ++node.class_counts[static_cast<std::size_t>(labels[idx])];
                node.predicted_label = static_cast<int>(std::distance(
                    node.class_counts.begin(),
                    std::max_element(node.class_counts.begin(), node.class_counts.end())));
                return node_id;
            }

            std::vector<std::size_t> left, right;
            for (std::size_t idx : samples) {
                (X(idx, split->feature) <= split->threshold ? left : right).push_back(idx);
            }
            samples.clear();
            samples.shrink_to_fit();

            tree.nodes_[static_cast<std::size_t>(node_id)].feature = static_cast<int>(split->feature);
            tree.nodes_[static_cast<std::size_t>(node_id)].threshold = split->threshold;
            const int l = build(left, depth + 1);
            tree.nodes_[static_cast<std::size_t>(node_id)].left = l;
            const int r = build(right, depth + 1);
            tree.nodes_[static_cast<std::size_t>(node_id)].right = r;
            return node_id;
        }
    } builder{X, labels, max_label, hp, min_leaf, n_total, tree};

    std::vector<std::size_t> all(n_total);
    std::iota(all.begin(), all.end(), 0);
    builder.build(all, 0);
    return tree;
}

int ClassificationTree::predict(std::span<const double> x) const {
    if (x.size() != feature_dim_) throw InputError("tree inspector feature dimension mismatch");
    int node = 0;
    while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = nodes_[static_cast<std::size_t>(node)];
        node = (x[static_cast<std::size_t>(nd.feature)] <= nd.threshold) ? nd.left : nd.right;
    }
    return nodes_[static_cast<std::size_t>(node)].predicted_label;
}

std::vector<ClassificationTree::Rule> ClassificationTree::extract_rules() const {
    std::vector<Rule> rules;
    std::vector<Predicate> path;
    // Depth-first, left branch (<=) before right (>).
    auto walk = [&](auto&& self, int node_id) -> void {
        const auto& node = nodes_[static_cast<std::size_t>(node_id)];
        if (node.feature < 0) {
            Rule rule;
            rule.predicates = path;
            rule.predicted_label = node.predicted_label;
            rule.support = std::accumulate(node.class_counts.begin(), node.class_counts.end(), std::size_t{0});
            rules.push_back(std::move(rule));
            return;
        }
        path.push_back({static_cast<std::size_t>(node.feature), false, node.threshold});
        self(self, node.left);
        path.back().greater = true;
        self(self, node.right);
        path.pop_back();
    };
    walk(walk, 0);
    return rules;
}

InspectorReport make_logistic_report(const LogisticInspector& inspector, const ContrastData& train,
                                     const std::vector<std::string>& feature_names, std::size_t top_k) {
    InspectorReport report;
    report.stream_label = inspector.target_label;
    report.kind = "logistic";
    report.positives = train.positives;
    report.negatives = train.negatives;
    report.excluded_high_error = train.excluded_high_error;
    report.excluded_unreliable = train.excluded_unreliable;
    report.bias = inspector.bias;

    std::vector<double> scores(train.X.rows());
    for (std::size_t i = 0; i < train.X.rows(); ++i) scores[i] = inspector.decision_score(train.X.row(i));
    report.auc = roc_auc(scores, train.y);

    std::vector<std::size_t> order(inspector.weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double da = std::abs(inspector.weights[a]);
        const double db = std::abs(inspector.weights[b]);
        return da != db ? da > db : a < b;
    });
    for (std::size_t k = 0; k < std::min(top_k, order.size()); ++k) {
        RankedFeature rf;
        rf.feature = order[k];
        rf.name = order[k] < feature_names.size() ? feature_names[order[k]]
                                                  : "f" + std::to_string(order[k]);
        rf.coefficient = inspector.weights[order[k]];
        report.top_features.push_back(std::move(rf));
    }
    return report;
}

void save_inspector_report(const InspectorReport& report, const std::string& path) {
    nlohmann::json j;
    j["stream_label"] = report.stream_label;
    j["kind"] = report.kind;
    j["auc"] = report.auc;
    j["training_set_sizes"] = {{"positives", report.positives}, {"negatives", report.negatives}};
    j["excluded_counts"] = {{"high_error", report.excluded_high_error},
                            {"unreliable_stream", report.excluded_unreliable}};
    if (report.kind == "logistic") {
        j["bias"] = report.bias;
        j["coefficients"] = nlohmann::json::array();
        for (const auto& rf : report.top_features) {
            j["coefficients"].push_back(
                {{"feature", rf.feature}, {"name", rf.name}, {"coefficient", rf.coefficient}});
        }
    } else {
        j["rules"] = nlohmann::json::array();
        for (const auto& rule : report.rules) {
            nlohmann::json rj;
            rj["predicted_label"] = rule.predicted_label;
            rj["support"] = rule.support;
            rj["predicates"] = nlohmann::json::array();
            for (const auto& pred : rule.predicates) {
                rj["predicates"].push_back({{"feature", pred.feature},
                                            {"op", pred.greater ? ">" : "<="},
                                            {"threshold", pred.threshold}});
            }
            j["rules"].push_back(std::move(rj));
        }
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write inspector report: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace streamlens
