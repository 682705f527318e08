#pragma once

#include <functional>
#include <random>
#include <vector>

#include "streamlens/dataset.hpp"
#include "streamlens/streams.hpp"

namespace streamlens {

/// Draws one candidate point; rejection sampling against the round's region
/// happens in adaptive_explain.
using PointSampler = std::function<std::vector<double>(std::mt19937_64&)>;

struct AdaptiveConfig {
    std::vector<RegionPredicate> regions;  // one per round; each must lie inside the previous
    std::size_t sample_size = 2000;
    std::size_t max_attempts_per_point = 100000;
    std::uint64_t seed = 0;
    std::vector<TreeHyperParams> tree_params;
    ReliabilityConfig reliability;

    void validate() const;
};

struct AdaptiveRound {
    Dataset sample;  // labels are the network's argmax predictions, not ground truth
    DistillingEnsemble ensemble;
    StreamTable table;
};

/// Shrink-sample-refit: per round, draw a fresh sample inside the region,
/// label it with the network outputs, and refit the distilling ensemble and
/// stream table on that sample. A point inside some round's region but
/// outside an earlier one proves the regions are not nested and raises
/// ConfigError. Sampler exhaustion raises InputError.
std::vector<AdaptiveRound> adaptive_explain(const FeedForwardNet& net, const PointSampler& sampler,
                                            const AdaptiveConfig& config);

/// Sampler drawing from a mixture generative model (labels and flips ignored).
PointSampler mixture_point_sampler(const MixtureConfig& cfg);

}  // namespace streamlens
