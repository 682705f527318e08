#include "streamlens/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace streamlens {

void TreeHyperParams::validate() const {
    if (max_depth < 0) throw InputError("max_depth must be non-negative");
    if (min_samples_leaf <= 0.0) throw InputError("min_samples_leaf must be positive");
    if (min_impurity_decrease < 0.0) throw InputError("min_impurity_decrease must be non-negative");
}

std::size_t TreeHyperParams::resolve_min_samples(std::size_t n_total) const {
    if (min_samples_leaf >= 1.0) return static_cast<std::size_t>(min_samples_leaf);
    return std::max<std::size_t>(1, static_cast<std::size_t>(
        std::ceil(min_samples_leaf * static_cast<double>(n_total))));
}

namespace {

// Sum over outputs of squared deviations from the node mean.
double node_sse(const Matrix& G, std::span<const std::size_t> samples, std::vector<double>& mean_out) {
    const std::size_t c_dim = G.cols();
    mean_out.assign(c_dim, 0.0);
    for (std::size_t idx : samples) {
        for (std::size_t c = 0; c < c_dim; ++c) mean_out[c] += G(idx, c);
    }
    for (auto& m : mean_out) m /= static_cast<double>(samples.size());
    double sse = 0.0;
    for (std::size_t idx : samples) {
        for (std::size_t c = 0; c < c_dim; ++c) {
            const double d = G(idx, c) - mean_out[c];
            sse += d * d;
        }
    }
    return sse;
}

}  // namespace

std::optional<SplitChoice> best_split(const Matrix& X, const Matrix& G,
                                      std::span<const std::size_t> samples,
                                      std::size_t min_samples_leaf) {
    const std::size_t n = samples.size();
    if (n < 2) return std::nullopt;
    const std::size_t p = X.cols();
    const std::size_t c_dim = G.cols();

    std::vector<double> parent_mean;
    const double parent_sse = node_sse(G, samples, parent_mean);
    const double dn = static_cast<double>(n);

    std::optional<SplitChoice> best;
    std::vector<std::size_t> order(samples.begin(), samples.end());
    std::vector<double> left_sum(c_dim);

    // Node totals are feature independent: per-output sums plus the total sum
    // of squares, which is additive across outputs.
    std::vector<double> total_sum(c_dim, 0.0);
    double total_sumsq = 0.0;
    for (std::size_t idx : samples) {
        for (std::size_t c = 0; c < c_dim; ++c) {
            total_sum[c] += G(idx, c);
            total_sumsq += G(idx, c) * G(idx, c);
        }
    }

    for (std::size_t feature = 0; feature < p; ++feature) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return X(a, feature) < X(b, feature); });

        std::fill(left_sum.begin(), left_sum.end(), 0.0);
        double left_sumsq = 0.0;

        for (std::size_t i = 0; i + 1 < n; ++i) {
            const std::size_t idx = order[i];
            for (std::size_t c = 0; c < c_dim; ++c) left_sum[c] += G(idx, c);
            for (std::size_t c = 0; c < c_dim; ++c) left_sumsq += G(idx, c) * G(idx, c);

            const double xi = X(order[i], feature);
            const double xj = X(order[i + 1], feature);
            if (!(xi < xj)) continue;  // only distinct consecutive values yield thresholds

            const std::size_t n_left = i + 1;
            const std::size_t n_right = n - n_left;
            if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;

            double sse_left = left_sumsq;
            double sse_right = total_sumsq - left_sumsq;
            for (std::size_t c = 0; c < c_dim; ++c) {
                sse_left -= left_sum[c] * left_sum[c] / static_cast<double>(n_left);
                const double right_sum = total_sum[c] - left_sum[c];
                sse_right -= right_sum * right_sum / static_cast<double>(n_right);
            }

            const double decrease = (parent_sse - sse_left - sse_right) / dn;
            if (decrease <= 0.0) continue;
            if (!best || decrease > best->impurity_decrease) {
                best = SplitChoice{feature, 0.5 * (xi + xj), decrease};
            }
        }
    }
    return best;
}

RegressionTree RegressionTree::fit(const Matrix& X, const Matrix& G, const TreeHyperParams& hp) {
    hp.validate();
    if (X.rows() == 0) throw InputError("cannot fit a tree on empty data");
    if (G.rows() != X.rows()) throw InputError("feature and target row counts differ");
    if (G.cols() == 0) throw InputError("targets must have at least one output");
    if (!X.all_finite() || !G.all_finite()) throw InputError("tree inputs contain NaN or Inf");

    const std::size_t n_total = X.rows();
    const std::size_t min_leaf = hp.resolve_min_samples(n_total);

    RegressionTree tree;
    tree.feature_dim_ = X.cols();
    std::vector<std::vector<double>> score_rows;

    std::vector<std::size_t> all(n_total);
    std::iota(all.begin(), all.end(), 0);

    // Depth-first, left child before right, so leaf indices come out in
    // left-to-right order and are stable across identical fits.
    struct Builder {
        const Matrix& X;
        const Matrix& G;
        const TreeHyperParams& hp;
        std::size_t min_leaf;
        std::size_t n_total;
        RegressionTree& tree;
        std::vector<std::vector<double>>& scores;

        int build(std::vector<std::size_t>& samples, int depth) {
            const int node_id = static_cast<int>(tree.nodes_.size());
            tree.nodes_.emplace_back();

            std::optional<SplitChoice> split;
            if (depth < hp.max_depth && samples.size() >= 2 * min_leaf) {
                split = best_split(X, G, samples, min_leaf);
                if (split) {
                    const double weighted = split->impurity_decrease *
                                            static_cast<double>(samples.size()) /
                                            static_cast<double>(n_total);
                    if (weighted < hp.min_impurity_decrease) split.reset();
                }
            }

            if (!split) {
                std::vector<double> mean;
                node_sse(G, samples, mean);
                tree.nodes_[node_id].leaf_index = static_cast<int>(scores.size()) + 1;
                scores.push_back(std::move(mean));
                return node_id;
            }

            std::vector<std::size_t> left, right;
            left.reserve(samples.size());
            right.reserve(samples.size());
            for (std::size_t idx : samples) {
                (X(idx, split->feature) <= split->threshold ? left : right).push_back(idx);
            }
            samples.clear();
            samples.shrink_to_fit();

            tree.nodes_[node_id].feature = static_cast<int>(split->feature);
            tree.nodes_[node_id].threshold = split->threshold;
            tree.nodes_[node_id].left = build(left, depth + 1);
            tree.nodes_[node_id].right = build(right, depth + 1);
            return node_id;
        }
    } builder{X, G, hp, min_leaf, n_total, tree, score_rows};

    builder.build(all, 0);
    tree.leaf_scores_ = Matrix::from_rows(score_rows);
    return tree;
}

RegressionTree::RegressionTree(std::vector<Node> nodes, Matrix leaf_scores, std::size_t feature_dim)
    : nodes_(std::move(nodes)), leaf_scores_(std::move(leaf_scores)), feature_dim_(feature_dim) {
    if (nodes_.empty()) throw InputError("tree must have at least one node");
    std::size_t leaves_seen = 0;
    for (const auto& node : nodes_) {
        if (node.feature < 0) {
            ++leaves_seen;
            if (node.leaf_index < 1 || static_cast<std::size_t>(node.leaf_index) > leaf_scores_.rows()) {
                throw InputError("leaf index out of range");
            }
        } else {
            if (node.left < 0 || node.right < 0 || node.left >= static_cast<int>(nodes_.size()) ||
                node.right >= static_cast<int>(nodes_.size())) {
                throw InputError("tree node has invalid children");
            }
            if (static_cast<std::size_t>(node.feature) >= feature_dim_) {
                throw InputError("tree split feature out of range");
            }
        }
    }
    if (leaves_seen != leaf_scores_.rows()) throw InputError("leaf count does not match score matrix");
}

int RegressionTree::descend(std::span<const double> x) const {
    if (x.size() != feature_dim_) {
        throw InputError("tree expects " + std::to_string(feature_dim_) + " features, got " +
                         std::to_string(x.size()));
    }
    int node = 0;
    while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = nodes_[static_cast<std::size_t>(node)];
        node = (x[static_cast<std::size_t>(nd.feature)] <= nd.threshold) ? nd.left : nd.right;
    }
    return node;
}

std::span<const double> RegressionTree::predict(std::span<const double> x) const {
    const auto& node = nodes_[static_cast<std::size_t>(descend(x))];
    return leaf_scores_.row(static_cast<std::size_t>(node.leaf_index - 1));
}

int RegressionTree::leaf_index(std::span<const double> x) const {
    return nodes_[static_cast<std::size_t>(descend(x))].leaf_index;
}

}  // namespace streamlens
