#include "streamlens/adaptive.hpp"

#include <algorithm>
#include <cmath>

namespace streamlens {

void AdaptiveConfig::validate() const {
    if (regions.empty()) throw ConfigError("adaptive explanation needs at least one round");
    if (sample_size == 0) throw ConfigError("sample_size must be positive");
    if (tree_params.empty()) throw ConfigError("tree hyperparameters are required");
    reliability.validate();
}

std::vector<AdaptiveRound> adaptive_explain(const FeedForwardNet& net, const PointSampler& sampler,
                                            const AdaptiveConfig& config) {
    config.validate();
    if (!sampler) throw ConfigError("missing point sampler");

    std::mt19937_64 rng(config.seed);
    std::vector<AdaptiveRound> rounds;
    rounds.reserve(config.regions.size());

    for (std::size_t round = 0; round < config.regions.size(); ++round) {
        const auto& region = config.regions[round];

        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        rows.reserve(config.sample_size);
        while (rows.size() < config.sample_size) {
            std::vector<double> x;
            bool accepted = false;
            for (std::size_t attempt = 0; attempt < config.max_attempts_per_point; ++attempt) {
                x = sampler(rng);
                if (region.contains(x)) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                throw InputError("sampler exhausted: no point in region '" + region.description() +
                                 "' after " + std::to_string(config.max_attempts_per_point) + " attempts");
            }
            // Nesting check: a point of this round must lie in every earlier region.
            for (std::size_t prev = 0; prev < round; ++prev) {
                if (!config.regions[prev].contains(x)) {
                    throw ConfigError("regions are not nested: round " + std::to_string(round + 1) +
                                      " produced a point outside region " + std::to_string(prev + 1));
                }
            }
            // Distillation needs no ground truth; label with the network's prediction.
            const auto logits = net.forward(x);
            const auto arg = std::distance(logits.begin(), std::max_element(logits.begin(), logits.end()));
            labels.push_back(static_cast<int>(arg) + 1);
            rows.push_back(std::move(x));
        }

        AdaptiveRound result;
        result.sample.X = Matrix::from_rows(rows);
        result.sample.labels = std::move(labels);
        result.sample.class_count = static_cast<int>(net.output_dim());
        result.ensemble = fit_distilling_ensemble(net, result.sample, config.tree_params);
        result.table = build_stream_table(result.ensemble, net, result.sample, config.reliability);
        rounds.push_back(std::move(result));
    }
    return rounds;
}

PointSampler mixture_point_sampler(const MixtureConfig& cfg) {
    cfg.validate();
    struct Component {
        double mean0, mean1;
        double l00, l10, l11;
        double cumulative;
    };
    std::vector<Component> comps;
    double acc = 0.0;
    for (const auto& c : cfg.components) {
        Component f{};
        f.mean0 = c.mean[0];
        f.mean1 = c.mean[1];
        f.l00 = std::sqrt(c.covariance[0]);
        f.l10 = c.covariance[2] / f.l00;
        f.l11 = std::sqrt(c.covariance[3] - f.l10 * f.l10);
        acc += c.weight;
        f.cumulative = acc;
        comps.push_back(f);
    }
    comps.back().cumulative = 1.0;

    return [comps](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double u = unit(rng);
        std::size_t k = 0;
        while (k + 1 < comps.size() && u > comps[k].cumulative) ++k;
        const double z1 = gauss(rng);
        const double z2 = gauss(rng);
        return std::vector<double>{comps[k].mean0 + comps[k].l00 * z1,
                                   comps[k].mean1 + comps[k].l10 * z1 + comps[k].l11 * z2};
    };
}

}  // namespace streamlens
