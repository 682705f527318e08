#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "streamlens/common.hpp"

namespace streamlens {

/// A labeled tabular dataset. Labels are 1..class_count.
struct Dataset {
    Matrix X;
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    int class_count = 0;

    std::size_t size() const { return X.rows(); }
    std::size_t feature_dim() const { return X.cols(); }

    /// Throws InputError on empty data, NaN/Inf features or out-of-range labels.
    void validate() const;
};

struct MixtureComponent {
    std::array<double, 2> mean{0.0, 0.0};
    std::array<double, 4> covariance{1.0, 0.0, 0.0, 1.0};  // row-major 2x2, must be SPD
    int cls = 0;                                            // 0 or 1
    double weight = 0.25;
};

/// Two-class 2-D Gaussian mixture generator configuration.
struct MixtureConfig {
    std::vector<MixtureComponent> components;
    std::size_t total_n = 7500;
    double flip_fraction = 0.02;
    std::uint64_t seed = 0;

    /// Four components, two per class: class 0 on the left (means (-2, +-1.5)),
    /// class 1 on the right (means (+2, +-1.5)), covariance 0.8*I, equal weights.
    static MixtureConfig two_class_default();

    void validate() const;
};

/// Samples the mixture, maps component class c to label c+1, then flips
/// exactly round(flip_fraction * total_n) labels chosen uniformly at random.
/// When component_out is non-null it receives the component index of each row.
Dataset gaussian_mixture_generate(const MixtureConfig& cfg, std::vector<int>* component_out = nullptr);

MixtureConfig load_mixture_config(const std::string& path);
void save_mixture_config(const MixtureConfig& cfg, const std::string& path);

struct CsvSchema {
    std::string label_column;                  // empty: unlabeled objects, all labels set to 1
    std::vector<std::string> feature_columns;  // empty: every non-label column
};

/// Strict numeric CSV reader. Non-numeric cells, missing columns and empty
/// files raise ParseError naming the row/column. Label values are mapped to
/// 1..C in order of first occurrence.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

/// Pure, composable predicate over feature vectors (boxes, balls, conjunctions).
class RegionPredicate {
public:
    static RegionPredicate all();
    static RegionPredicate box(std::vector<double> lo, std::vector<double> hi);
    static RegionPredicate ball(std::vector<double> center, double radius);
    RegionPredicate and_also(const RegionPredicate& other) const;

    bool contains(std::span<const double> x) const { return fn_(x); }
    const std::string& description() const { return description_; }

private:
    RegionPredicate(std::function<bool(std::span<const double>)> fn, std::string description)
        : fn_(std::move(fn)), description_(std::move(description)) {}

    std::function<bool(std::span<const double>)> fn_;
    std::string description_;
};

/// A total feature map producing a parallel dataset for inspector consumption.
struct FeatureTransform {
    std::function<std::vector<double>(std::span<const double>)> fn;
    std::vector<std::string> feature_names;
};

/// Applies the transform row by row; labels and row count are preserved.
/// A throwing transform or non-finite output raises InputError with the row index.
Dataset transform_space(const Dataset& data, const FeatureTransform& transform);

/// Keeps the rows whose features satisfy the predicate, preserving order.
/// Raises InputError when no row matches.
Dataset restrict_manifold(const Dataset& data, const RegionPredicate& predicate);

}  // namespace streamlens
