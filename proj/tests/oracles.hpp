#pragma once

// Independent reference implementations used only by tests. These stay
// deliberately naive (direct two-pass formulas, exhaustive enumeration) so
// they cannot share a bug with the library code they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "streamlens/common.hpp"

namespace oracles {

using streamlens::Matrix;

inline double direct_sse(const Matrix& G, const std::vector<std::size_t>& idx) {
    if (idx.empty()) return 0.0;
    double sse = 0.0;
    for (std::size_t c = 0; c < G.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t i : idx) mean += G(i, c);
        mean /= static_cast<double>(idx.size());
        for (std::size_t i : idx) {
            const double d = G(i, c) - mean;
            sse += d * d;
        }
    }
    return sse;
}

struct BruteSplit {
    std::size_t feature = 0;
    double threshold = 0.0;
    double decrease = 0.0;
};

// Exhaustive O(n^2 p) split search with the same tie-break convention as the
// library: strictly greater decrease wins, scanning features then thresholds
// in ascending order.
inline std::optional<BruteSplit> brute_force_best_split(const Matrix& X, const Matrix& G,
                                                        const std::vector<std::size_t>& idx,
                                                        std::size_t min_leaf) {
    const std::size_t n = idx.size();
    if (n < 2) return std::nullopt;
    const double parent = direct_sse(G, idx);

    std::optional<BruteSplit> best;
    for (std::size_t f = 0; f < X.cols(); ++f) {
        std::vector<double> values;
        for (std::size_t i : idx) values.push_back(X(i, f));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t v = 0; v + 1 < values.size(); ++v) {
            const double thr = 0.5 * (values[v] + values[v + 1]);
            std::vector<std::size_t> left, right;
            for (std::size_t i : idx) (X(i, f) <= thr ? left : right).push_back(i);
            if (left.size() < min_leaf || right.size() < min_leaf) continue;
            const double dec = (parent - direct_sse(G, left) - direct_sse(G, right)) / static_cast<double>(n);
            if (dec <= 0.0) continue;
            if (!best || dec > best->decrease) best = BruteSplit{f, thr, dec};
        }
    }
    return best;
}

// Training MSE of a greedy brute-force CART with the library's stopping rules.
inline double brute_force_greedy_tree_mse(const Matrix& X, const Matrix& G, int max_depth,
                                          std::size_t min_leaf, double min_impurity_decrease) {
    const std::size_t n_total = X.rows();
    double total_sse = 0.0;
    std::function<void(std::vector<std::size_t>, int)> build = [&](std::vector<std::size_t> idx, int depth) {
        std::optional<BruteSplit> split;
        if (depth < max_depth && idx.size() >= 2 * min_leaf) {
            split = brute_force_best_split(X, G, idx, min_leaf);
            if (split) {
                const double weighted =
                    split->decrease * static_cast<double>(idx.size()) / static_cast<double>(n_total);
                if (weighted < min_impurity_decrease) split.reset();
            }
        }
        if (!split) {
            total_sse += direct_sse(G, idx);
            return;
        }
        std::vector<std::size_t> left, right;
        for (std::size_t i : idx) (X(i, split->feature) <= split->threshold ? left : right).push_back(i);
        build(std::move(left), depth + 1);
        build(std::move(right), depth + 1);
    };
    std::vector<std::size_t> all(n_total);
    for (std::size_t i = 0; i < n_total; ++i) all[i] = i;
    build(std::move(all), 0);
    return total_sse / static_cast<double>(n_total * G.cols());
}

// Pairwise Mann-Whitney enumeration; ties count one half.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& y) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

// Golden-section minimizer for smooth unimodal scalar functions.
inline double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double tol = 1e-12) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Central finite differences of a scalar function of a parameter vector.
inline std::vector<double> finite_difference_gradient(const std::function<double(const std::vector<double>&)>& f,
                                                      std::vector<double> params, double h = 1e-5) {
    std::vector<double> grad(params.size());
    for (std::size_t j = 0; j < params.size(); ++j) {
        const double saved = params[j];
        params[j] = saved + h;
        const double up = f(params);
        params[j] = saved - h;
        const double down = f(params);
        params[j] = saved;
        grad[j] = (up - down) / (2.0 * h);
    }
    return grad;
}

inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double denom = std::max({std::abs(a[j]), std::abs(b[j]), 1e-8});
        worst = std::max(worst, std::abs(a[j] - b[j]) / denom);
    }
    return worst;
}

}  // namespace oracles
