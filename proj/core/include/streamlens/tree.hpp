#pragma once

#include <optional>
#include <vector>

#include "streamlens/common.hpp"

namespace streamlens {

struct TreeHyperParams {
    int max_depth = 0;                  // 0 fits a single-leaf (constant) tree
    double min_samples_leaf = 1.0;      // >= 1: absolute count; in (0,1): fraction of the training size
    double min_impurity_decrease = 0.0; // gate on (n_node/n_total) * (parent - weighted child impurity)

    void validate() const;
    std::size_t resolve_min_samples(std::size_t n_total) const;
};

struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity_decrease = 0.0;  // parent impurity minus size-weighted child impurity
};

/// Exhaustive best split over features and midpoints of consecutive distinct
/// sorted values. Impurity is the sum over outputs of the within-node variance.
/// Ties break to the lowest feature index, then the lowest threshold.
/// Returns nothing when no candidate leaves min_samples_leaf on both sides
/// with a positive decrease.
std::optional<SplitChoice> best_split(const Matrix& X, const Matrix& G,
                                      std::span<const std::size_t> samples,
                                      std::size_t min_samples_leaf);

/// Multi-output CART regression tree. Leaf indices are 1..K in depth-first
/// left-first order; the score matrix holds the per-leaf training target means.
class RegressionTree {
public:
    struct Node {
        int feature = -1;       // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        int leaf_index = 0;     // 1..K for leaves, 0 for internal nodes
    };

    RegressionTree() = default;
    /// Assembles a tree from explicit structure (deserialization); validates
    /// node links and leaf numbering.
    RegressionTree(std::vector<Node> nodes, Matrix leaf_scores, std::size_t feature_dim);

    static RegressionTree fit(const Matrix& X, const Matrix& G, const TreeHyperParams& hp);

    std::span<const double> predict(std::span<const double> x) const;
    int leaf_index(std::span<const double> x) const;

    int leaf_count() const { return static_cast<int>(leaf_scores_.rows()); }
    std::size_t feature_dim() const { return feature_dim_; }
    std::size_t output_dim() const { return leaf_scores_.cols(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const Matrix& leaf_scores() const { return leaf_scores_; }

private:
    int descend(std::span<const double> x) const;

    std::vector<Node> nodes_;    // nodes_[0] is the root
    Matrix leaf_scores_;         // K x C
    std::size_t feature_dim_ = 0;
};

}  // namespace streamlens
