#include "streamlens/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace streamlens {

void Dataset::validate() const {
    if (X.rows() == 0 || X.cols() == 0) throw InputError("dataset is empty");
    if (labels.size() != X.rows()) {
        throw InputError("dataset has " + std::to_string(X.rows()) + " rows but " +
                         std::to_string(labels.size()) + " labels");
    }
    if (class_count < 1) throw InputError("dataset class count must be >= 1");
    if (!X.all_finite()) throw InputError("dataset contains NaN or Inf features");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 1 || labels[i] > class_count) {
            throw InputError("label out of range 1.." + std::to_string(class_count) + " at row " +
                             std::to_string(i));
        }
    }
    if (!feature_names.empty() && feature_names.size() != X.cols()) {
        throw InputError("feature name count does not match feature dimension");
    }
}

MixtureConfig MixtureConfig::two_class_default() {
    MixtureConfig cfg;
    const std::array<double, 4> cov{0.8, 0.0, 0.0, 0.8};
    cfg.components = {
        {{-2.0, 1.5}, cov, 0, 0.25},
        {{-2.0, -1.5}, cov, 0, 0.25},
        {{2.0, 1.5}, cov, 1, 0.25},
        {{2.0, -1.5}, cov, 1, 0.25},
    };
    return cfg;
}

void MixtureConfig::validate() const {
    if (components.empty()) throw ConfigError("mixture has no components");
    if (total_n == 0) throw ConfigError("mixture total_n must be positive");
    if (flip_fraction < 0.0 || flip_fraction >= 1.0) {
        throw ConfigError("flip_fraction must be in [0, 1)");
    }
    double weight_sum = 0.0;
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto& c = components[k];
        if (c.cls != 0 && c.cls != 1) {
            throw ConfigError("component " + std::to_string(k) + " class must be 0 or 1");
        }
        if (c.weight <= 0.0) throw ConfigError("component " + std::to_string(k) + " weight must be positive");
        // SPD check for a symmetric 2x2: positive diagonal and positive determinant.
        const double a = c.covariance[0], b = c.covariance[1], c2 = c.covariance[2], d = c.covariance[3];
        if (std::abs(b - c2) > 1e-12 * (1.0 + std::abs(b))) {
            throw ConfigError("component " + std::to_string(k) + " covariance is not symmetric");
        }
        if (a <= 0.0 || a * d - b * c2 <= 0.0) {
            throw ConfigError("component " + std::to_string(k) + " covariance is not SPD");
        }
        weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) throw ConfigError("component weights must sum to 1");
}

Dataset gaussian_mixture_generate(const MixtureConfig& cfg, std::vector<int>* component_out) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);

    // Cholesky factors of the component covariances.
    struct Chol {
        double l00, l10, l11;
    };
    std::vector<Chol> chol;
    chol.reserve(cfg.components.size());
    for (const auto& c : cfg.components) {
        Chol f{};
        f.l00 = std::sqrt(c.covariance[0]);
        f.l10 = c.covariance[2] / f.l00;
        f.l11 = std::sqrt(c.covariance[3] - f.l10 * f.l10);
        chol.push_back(f);
    }

    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& c : cfg.components) {
        acc += c.weight;
        cumulative.push_back(acc);
    }
    cumulative.back() = 1.0;

    Dataset data;
    data.X = Matrix(cfg.total_n, 2);
    data.labels.resize(cfg.total_n);
    data.feature_names = {"x1", "x2"};
    data.class_count = 2;
    if (component_out) component_out->assign(cfg.total_n, 0);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < cfg.total_n; ++i) {
        const double u = unit(rng);
        std::size_t k = 0;
        while (k + 1 < cumulative.size() && u > cumulative[k]) ++k;
        const double z1 = gauss(rng);
        const double z2 = gauss(rng);
        const auto& comp = cfg.components[k];
        const auto& f = chol[k];
        data.X(i, 0) = comp.mean[0] + f.l00 * z1;
        data.X(i, 1) = comp.mean[1] + f.l10 * z1 + f.l11 * z2;
        data.labels[i] = comp.cls + 1;
        if (component_out) (*component_out)[i] = static_cast<int>(k);
    }

    // Flip exactly round(flip_fraction * N) labels, chosen uniformly without
    // replacement (partial Fisher-Yates over the index array).
    const auto flip_count = static_cast<std::size_t>(std::llround(cfg.flip_fraction * static_cast<double>(cfg.total_n)));
    if (flip_count > 0) {
        std::vector<std::size_t> idx(cfg.total_n);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (std::size_t i = 0; i < flip_count; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
            std::swap(idx[i], idx[pick(rng)]);
            const std::size_t j = idx[i];
            data.labels[j] = (data.labels[j] == 1) ? 2 : 1;
        }
    }

    data.validate();
    return data;
}

namespace {

nlohmann::json mixture_to_json(const MixtureConfig& cfg) {
    nlohmann::json j;
    j["total_n"] = cfg.total_n;
    j["flip_fraction"] = cfg.flip_fraction;
    j["seed"] = cfg.seed;
    j["components"] = nlohmann::json::array();
    for (const auto& c : cfg.components) {
        j["components"].push_back({{"mean", c.mean},
                                   {"covariance", c.covariance},
                                   {"class", c.cls},
                                   {"weight", c.weight}});
    }
    return j;
}

MixtureConfig mixture_from_json(const nlohmann::json& j) {
    MixtureConfig cfg;
    try {
        cfg.total_n = j.at("total_n").get<std::size_t>();
        cfg.flip_fraction = j.at("flip_fraction").get<double>();
        cfg.seed = j.value("seed", std::uint64_t{0});
        for (const auto& cj : j.at("components")) {
            MixtureComponent c;
            const auto mean = cj.at("mean").get<std::vector<double>>();
            const auto cov = cj.at("covariance").get<std::vector<double>>();
            if (mean.size() != 2 || cov.size() != 4) {
                throw ParseError("mixture component mean/covariance must have 2/4 entries");
            }
            std::copy(mean.begin(), mean.end(), c.mean.begin());
            std::copy(cov.begin(), cov.end(), c.covariance.begin());
            c.cls = cj.at("class").get<int>();
            c.weight = cj.at("weight").get<double>();
            cfg.components.push_back(c);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("mixture config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

}  // namespace

MixtureConfig load_mixture_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open mixture config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("mixture config " + path + ": " + e.what());
    }
    return mixture_from_json(j);
}

void save_mixture_config(const MixtureConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write mixture config: " + path);
    out << mixture_to_json(cfg).dump(2) << '\n';
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0') || errno == ERANGE || !std::isfinite(value)) {
        throw ParseError("non-numeric cell at row " + std::to_string(row) + ", column '" + column + "': '" +
                         cell + "'");
    }
    return value;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open CSV file: " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) throw ParseError("empty CSV file: " + path);
    const auto header = split_csv_line(trim(header_line));
    if (header.empty()) throw ParseError("CSV header has no columns: " + path);

    auto column_index = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return i;
        }
        throw ParseError("missing column '" + name + "' in " + path);
    };

    std::optional<std::size_t> label_idx;
    if (!schema.label_column.empty()) label_idx = column_index(schema.label_column);

    std::vector<std::size_t> feature_idx;
    std::vector<std::string> feature_names;
    if (schema.feature_columns.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (label_idx && i == *label_idx) continue;
            feature_idx.push_back(i);
            feature_names.push_back(trim(header[i]));
        }
    } else {
        for (const auto& name : schema.feature_columns) {
            feature_idx.push_back(column_index(name));
            feature_names.push_back(name);
        }
    }
    if (feature_idx.empty()) throw ParseError("no feature columns in " + path);

    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    std::string line;
    std::size_t row_number = 1;  // header is row 0
    while (std::getline(in, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            ++row_number;
            continue;
        }
        const auto cells = split_csv_line(stripped);
        if (cells.size() != header.size()) {
            throw ParseError("row " + std::to_string(row_number) + " has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(header.size()));
        }
        std::vector<double> features;
        features.reserve(feature_idx.size());
        for (std::size_t k = 0; k < feature_idx.size(); ++k) {
            features.push_back(parse_cell(trim(cells[feature_idx[k]]), row_number, feature_names[k]));
        }
        rows.push_back(std::move(features));
        if (label_idx) raw_labels.push_back(trim(cells[*label_idx]));
        ++row_number;
    }
    if (rows.empty()) throw ParseError("CSV file has no data rows: " + path);

    Dataset data;
    data.X = Matrix::from_rows(rows);
    data.feature_names = feature_names;
    if (label_idx) {
        // Map label values to 1..C preserving first-occurrence order.
        std::vector<std::string> seen;
        data.labels.reserve(raw_labels.size());
        for (const auto& raw : raw_labels) {
            auto it = std::find(seen.begin(), seen.end(), raw);
            if (it == seen.end()) {
                seen.push_back(raw);
                it = std::prev(seen.end());
            }
            data.labels.push_back(static_cast<int>(std::distance(seen.begin(), it)) + 1);
        }
        data.class_count = static_cast<int>(seen.size());
    } else {
        data.labels.assign(rows.size(), 1);
        data.class_count = 1;
    }
    data.validate();
    return data;
}

RegionPredicate RegionPredicate::all() {
    return {[](std::span<const double>) { return true; }, "all"};
}

RegionPredicate RegionPredicate::box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size()) throw InputError("box bounds must have equal dimensions");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (lo[i] > hi[i]) throw InputError("box lower bound exceeds upper bound at dim " + std::to_string(i));
    }
    std::string desc = "box";
    auto fn = [lo = std::move(lo), hi = std::move(hi)](std::span<const double> x) {
        if (x.size() < lo.size()) return false;
        for (std::size_t i = 0; i < lo.size(); ++i) {
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        }
        return true;
    };
    return {std::move(fn), std::move(desc)};
}

RegionPredicate RegionPredicate::ball(std::vector<double> center, double radius) {
    if (radius <= 0.0) throw InputError("ball radius must be positive");
    auto fn = [center = std::move(center), radius](std::span<const double> x) {
        if (x.size() < center.size()) return false;
        double d2 = 0.0;
        for (std::size_t i = 0; i < center.size(); ++i) {
            const double d = x[i] - center[i];
            d2 += d * d;
        }
        return d2 <= radius * radius;
    };
    return {std::move(fn), "ball"};
}

RegionPredicate RegionPredicate::and_also(const RegionPredicate& other) const {
    auto a = fn_;
    auto b = other.fn_;
    return {[a, b](std::span<const double> x) { return a(x) && b(x); },
            description_ + " & " + other.description_};
}

Dataset transform_space(const Dataset& data, const FeatureTransform& transform) {
    data.validate();
    if (!transform.fn) throw InputError("transform_space: missing feature map");
    std::vector<std::vector<double>> rows;
    rows.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::vector<double> mapped;
        try {
            mapped = transform.fn(data.X.row(i));
        } catch (const std::exception& e) {
            throw InputError("transform failed at row " + std::to_string(i) + ": " + e.what());
        }
        for (double v : mapped) {
            if (!std::isfinite(v)) throw InputError("transform produced non-finite value at row " + std::to_string(i));
        }
        if (!rows.empty() && mapped.size() != rows.front().size()) {
            throw InputError("transform produced inconsistent dimension at row " + std::to_string(i));
        }
        rows.push_back(std::move(mapped));
    }
    Dataset out;
    out.X = Matrix::from_rows(rows);
    out.labels = data.labels;
    out.class_count = data.class_count;
    out.feature_names = transform.feature_names;
    out.validate();
    return out;
}

Dataset restrict_manifold(const Dataset& data, const RegionPredicate& predicate) {
    data.validate();
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (predicate.contains(data.X.row(i))) {
            rows.push_back(data.X.row_copy(i));
            labels.push_back(data.labels[i]);
        }
    }
    if (rows.empty()) {
        throw InputError("region is empty: no object satisfies predicate '" + predicate.description() + "'");
    }
    Dataset out;
    out.X = Matrix::from_rows(rows);
    out.labels = std::move(labels);
    out.class_count = data.class_count;
    out.feature_names = data.feature_names;
    return out;
}

}  // namespace streamlens
