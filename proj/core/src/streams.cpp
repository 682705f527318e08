#include "streamlens/streams.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

namespace streamlens {

DiscretizedStream discretize(const DistillingEnsemble& ensemble, const Stream& stream) {
    if (stream.activations.size() < ensemble.tree_count() + 1) {
        throw InputError("stream is too short for this ensemble");
    }
    DiscretizedStream codes(ensemble.tree_count());
    for (std::size_t ell = 0; ell < ensemble.tree_count(); ++ell) {
        codes[ell] = ensemble.trees[ell].leaf_index(stream.activations[ell]);
    }
    return codes;
}

std::vector<double> ensemble_predict_from_codes(const DistillingEnsemble& ensemble,
                                                const DiscretizedStream& codes) {
    if (codes.size() != ensemble.tree_count()) {
        throw InputError("code length does not match tree count");
    }
    std::vector<double> out = ensemble.base_prediction;
    for (std::size_t ell = 0; ell < codes.size(); ++ell) {
        const auto& tree = ensemble.trees[ell];
        if (codes[ell] < 1 || codes[ell] > tree.leaf_count()) {
            throw InputError("leaf index " + std::to_string(codes[ell]) + " out of range for tree " +
                             std::to_string(ell));
        }
        const auto scores = tree.leaf_scores().row(static_cast<std::size_t>(codes[ell] - 1));
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += ensemble.multipliers[ell] * scores[c];
    }
    return out;
}

void ReliabilityConfig::validate() const {
    if (alpha < 0.0 || alpha >= 1.0) throw ConfigError("alpha must be in [0, 1)");
    if (gamma < 0.0 || gamma >= 1.0) throw ConfigError("gamma must be in [0, 1)");
}

std::size_t ReliabilityConfig::resolve_min_population(std::size_t n_total) const {
    if (min_population) return *min_population;
    return static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n_total)));
}

std::optional<int> StreamTable::find_label(const DiscretizedStream& codes) const {
    const auto it = std::lower_bound(streams.begin(), streams.end(), codes,
                                     [](const StreamInfo& s, const DiscretizedStream& c) { return s.codes < c; });
    if (it == streams.end() || it->codes != codes) return std::nullopt;
    return it->label;
}

const StreamInfo& StreamTable::info(int label) const {
    if (label < 1 || static_cast<std::size_t>(label) > streams.size()) {
        throw InputError("unknown stream label " + std::to_string(label));
    }
    return streams[static_cast<std::size_t>(label - 1)];
}

StreamTable build_stream_table(const DistillingEnsemble& ensemble, const FeedForwardNet& net,
                               const Dataset& data, const ReliabilityConfig& config) {
    config.validate();
    data.validate();
    const std::size_t n = data.size();

    StreamTable table;
    table.config = config;
    table.total_population = n;
    table.object_label.resize(n);
    table.object_error.resize(n);
    table.object_flagged.assign(n, false);

    std::vector<DiscretizedStream> per_object(n);
    std::map<DiscretizedStream, std::size_t> populations;  // ordered: lexicographic enumeration
    for (std::size_t i = 0; i < n; ++i) {
        const Stream stream = net.capture_stream(data.X.row(i));
        per_object[i] = discretize(ensemble, stream);
        const auto ens_logits = ensemble_predict(ensemble, stream);
        table.object_error[i] = logit_discrepancy(stream.logits(), ens_logits, config.error_metric);
        ++populations[per_object[i]];
    }

    const std::size_t min_pop = config.resolve_min_population(n);
    int label = 0;
    for (const auto& [codes, population] : populations) {
        StreamInfo info;
        info.codes = codes;
        info.label = ++label;
        info.population = population;
        info.mean_ensemble_logits = ensemble_predict_from_codes(ensemble, codes);
        info.reliable = population >= min_pop;
        table.streams.push_back(std::move(info));
    }
    for (std::size_t i = 0; i < n; ++i) {
        table.object_label[i] = *table.find_label(per_object[i]);
    }

    // alpha flags the ceil(alpha*N) largest training errors; objects tied with
    // the k-th largest value are all kept in the flagged set.
    const auto flag_count = static_cast<std::size_t>(std::ceil(config.alpha * static_cast<double>(n)));
    if (flag_count == 0) {
        table.error_threshold = std::numeric_limits<double>::infinity();
    } else {
        std::vector<double> sorted_errors = table.object_error;
        std::nth_element(sorted_errors.begin(), sorted_errors.begin() + static_cast<std::ptrdiff_t>(flag_count - 1),
                         sorted_errors.end(), std::greater<double>());
        table.error_threshold = sorted_errors[flag_count - 1];
        for (std::size_t i = 0; i < n; ++i) {
            table.object_flagged[i] = table.object_error[i] >= table.error_threshold;
        }
    }
    return table;
}

std::optional<int> assign_label(const StreamTable& table, const DiscretizedStream& codes) {
    return table.find_label(codes);
}

double stream_population_entropy(const StreamTable& table) {
    if (table.streams.empty() || table.total_population == 0) {
        throw InputError("entropy of an empty stream table");
    }
    double entropy = 0.0;
    for (const auto& s : table.streams) {
        if (s.population == 0) continue;
        const double p = static_cast<double>(s.population) / static_cast<double>(table.total_population);
        entropy -= p * std::log(p);
    }
    return entropy;
}

void save_stream_table(const StreamTable& table, const std::string& path) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : table.streams) {
        j.push_back({{"label", s.label},
                     {"leaf_indices", s.codes},
                     {"population", s.population},
                     {"mean_logits", s.mean_ensemble_logits},
                     {"reliable", s.reliable}});
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write stream table: " + path);
    out << j.dump(2) << '\n';
}

StreamTable load_stream_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open stream table: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("stream table " + path + ": " + e.what());
    }
    StreamTable table;
    table.error_threshold = std::numeric_limits<double>::infinity();
    try {
        for (const auto& sj : j) {
            StreamInfo info;
            info.label = sj.at("label").get<int>();
            info.codes = sj.at("leaf_indices").get<std::vector<int>>();
            info.population = sj.at("population").get<std::size_t>();
            info.mean_ensemble_logits = sj.at("mean_logits").get<std::vector<double>>();
            info.reliable = sj.at("reliable").get<bool>();
            table.total_population += info.population;
            table.streams.push_back(std::move(info));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("stream table " + path + ": " + e.what());
    }
    if (!std::is_sorted(table.streams.begin(), table.streams.end(),
                        [](const StreamInfo& a, const StreamInfo& b) { return a.codes < b.codes; })) {
        throw ParseError("stream table " + path + ": entries are not in lexicographic order");
    }
    for (std::size_t i = 0; i < table.streams.size(); ++i) {
        if (table.streams[i].label != static_cast<int>(i) + 1) {
            throw ParseError("stream table " + path + ": labels are not contiguous from 1");
        }
    }
    return table;
}

void save_assignments_csv(const StreamTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write assignments file: " + path);
    out << "object_id,label_or_anomaly,distillation_error,filtered_flag\n";
    out.precision(17);
    for (std::size_t i = 0; i < table.object_label.size(); ++i) {
        out << i << ',' << table.object_label[i] << ',' << table.object_error[i] << ','
            << (table.object_flagged[i] ? 1 : 0) << '\n';
    }
}

}  // namespace streamlens
