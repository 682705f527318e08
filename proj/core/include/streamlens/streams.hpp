#pragma once

#include <optional>
#include <string>
#include <vector>

#include "streamlens/ensemble.hpp"

namespace streamlens {

/// Tuple of leaf indices, entry ell in 1..K_ell of tree ell.
using DiscretizedStream = std::vector<int>;

/// DS(x) = [q^0(a^0), ..., q^{M-1}(a^{M-1})].
DiscretizedStream discretize(const DistillingEnsemble& ensemble, const Stream& stream);

/// Ensemble output as a function of the leaf code alone.
std::vector<double> ensemble_predict_from_codes(const DistillingEnsemble& ensemble,
                                                const DiscretizedStream& codes);

struct ReliabilityConfig {
    /// Fraction of the training set flagged as high distillation error and
    /// excluded from inspector training sets.
    double alpha = 0.0;
    /// Streams with population below gamma * N are unreliable.
    double gamma = 0.0;
    /// Absolute population threshold; overrides gamma when set.
    std::optional<std::size_t> min_population;
    ErrorMetric error_metric = ErrorMetric::prob_cross_entropy;

    void validate() const;
    std::size_t resolve_min_population(std::size_t n_total) const;
};

struct StreamInfo {
    DiscretizedStream codes;
    int label = 0;  // 1..U, lexicographic rank of the code
    std::size_t population = 0;
    std::vector<double> mean_ensemble_logits;
    bool reliable = true;
};

struct StreamTable {
    std::vector<StreamInfo> streams;  // lexicographically sorted; label == index + 1
    std::size_t total_population = 0;
    ReliabilityConfig config;

    /// k-th largest training error with k = ceil(alpha * N); +infinity when
    /// alpha flags nothing. Objects with error >= threshold are flagged.
    double error_threshold = 0.0;

    // Per training object, in dataset order.
    std::vector<int> object_label;
    std::vector<double> object_error;
    std::vector<bool> object_flagged;

    std::optional<int> find_label(const DiscretizedStream& codes) const;
    const StreamInfo& info(int label) const;
};

StreamTable build_stream_table(const DistillingEnsemble& ensemble, const FeedForwardNet& net,
                               const Dataset& data, const ReliabilityConfig& config);

/// Training-set label for the code, or nothing when the code was never seen
/// (an advisory anomaly verdict).
std::optional<int> assign_label(const StreamTable& table, const DiscretizedStream& codes);

/// Shannon entropy (nats) of the population distribution over stream labels.
double stream_population_entropy(const StreamTable& table);

/// JSON array of {label, leaf_indices, population, mean_logits, reliable}.
void save_stream_table(const StreamTable& table, const std::string& path);
/// Restores the enumeration side of the table (streams and populations only;
/// per-object vectors stay empty and error_threshold must come from the run report).
StreamTable load_stream_table(const std::string& path);

/// CSV with columns object_id,label_or_anomaly,distillation_error,filtered_flag.
void save_assignments_csv(const StreamTable& table, const std::string& path);

}  // namespace streamlens
