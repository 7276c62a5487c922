#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "interpol/errors.hpp"
#include "interpol/estimator.hpp"
#include "interpol/experiments.hpp"
#include "interpol/simulation.hpp"

namespace interpol::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Click logs: one JSON object per line.
//   {"query_id": "...", "ranking": [...], "clicks": [...],
//    "propensities": [[...], ...]}
// The optional propensities hold each item's full rank distribution; row j
// belongs to the item displayed at rank j of `ranking`. The full distribution
// is stored because window probabilities need more than the realized rank.
// ---------------------------------------------------------------------------

inline json record_to_json(const ClickRecord& record) {
    json doc;
    doc["query_id"] = record.query_id;
    doc["ranking"] = record.logged_ranking.items();
    doc["clicks"] = record.clicks;
    if (record.propensities) {
        json rows = json::array();
        for (int item : record.logged_ranking.items()) {
            const auto row = record.propensities->row(item);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        doc["propensities"] = std::move(rows);
    }
    return doc;
}

inline ClickRecord record_from_json(const json& doc) {
    ClickRecord record;
    record.query_id = doc.at("query_id").get<std::string>();
    record.logged_ranking = Ranking(doc.at("ranking").get<std::vector<int>>());
    record.clicks = doc.at("clicks").get<std::vector<int>>();
    if (doc.contains("propensities")) {
        const auto rows = doc.at("propensities").get<std::vector<std::vector<double>>>();
        const std::size_t k = record.logged_ranking.size();
        if (rows.size() != k) throw DataError("propensity row count != ranking length");
        std::vector<double> matrix;
        matrix.reserve(k * k);
        for (const auto& row : rows) {
            if (row.size() != k) throw DataError("propensity row length != ranking length");
            matrix.insert(matrix.end(), row.begin(), row.end());
        }
        record.propensities = std::make_shared<const RankPropensities>(
            record.logged_ranking.items(), std::move(matrix));
    }
    record.validate();
    return record;
}

inline void write_log(std::span<const ClickRecord> records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    for (const ClickRecord& record : records) {
        out << record_to_json(record).dump() << '\n';
    }
    if (!out) throw DataError("failed while writing '" + path + "'");
}

inline std::vector<ClickRecord> read_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::vector<ClickRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": malformed record: " + e.what());
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Result tables: fixed header, rows sorted by (exponent, stay_prob, window),
// reals in scientific notation with 17 significant digits (lossless).
// ---------------------------------------------------------------------------

inline constexpr const char* kResultsHeader =
    "exponent,stay_prob,window,n,replications,mean_estimate,true_value,bias,variance,mse";

inline std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", value);
    return buf;
}

inline std::string results_to_csv(std::span<const CellResult> cells) {
    std::vector<CellResult> sorted(cells.begin(), cells.end());
    std::sort(sorted.begin(), sorted.end(), [](const CellResult& a, const CellResult& b) {
        return std::tie(a.exponent, a.stay_prob, a.window) <
               std::tie(b.exponent, b.stay_prob, b.window);
    });
    std::string out = std::string(kResultsHeader) + "\n";
    for (const CellResult& cell : sorted) {
        out += format_real(cell.exponent);
        out += ',';
        out += format_real(cell.stay_prob);
        out += ',';
        out += std::to_string(cell.window);
        out += ',';
        out += std::to_string(cell.n_queries);
        out += ',';
        out += std::to_string(cell.replications);
        out += ',';
        out += format_real(cell.mean_estimate);
        out += ',';
        out += format_real(cell.true_value);
        out += ',';
        out += format_real(cell.bias);
        out += ',';
        out += format_real(cell.variance);
        out += ',';
        out += format_real(cell.mse);
        out += '\n';
    }
    return out;
}

inline void write_results(std::span<const CellResult> cells, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << results_to_csv(cells);
    if (!out) throw DataError("failed while writing '" + path + "'");
}

inline std::vector<CellResult> read_results(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != kResultsHeader) {
        throw DataError(path + ": missing or unexpected results header");
    }
    std::vector<CellResult> cells;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 10) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 10 fields");
        }
        try {
            CellResult cell;
            cell.exponent = std::stod(fields[0]);
            cell.stay_prob = std::stod(fields[1]);
            cell.window = static_cast<std::size_t>(std::stoull(fields[2]));
            cell.n_queries = static_cast<std::size_t>(std::stoull(fields[3]));
            cell.replications = static_cast<std::size_t>(std::stoull(fields[4]));
            cell.mean_estimate = std::stod(fields[5]);
            cell.true_value = std::stod(fields[6]);
            cell.bias = std::stod(fields[7]);
            cell.variance = std::stod(fields[8]);
            cell.mse = std::stod(fields[9]);
            cells.push_back(cell);
        } catch (const std::logic_error&) {
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed number");
        }
    }
    return cells;
}

// ---------------------------------------------------------------------------
// Run configuration (JSON document). Every field has a usable default;
// unknown keys are rejected by name so typos do not silently fall back.
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string mode = "grid";  // simulate | evaluate | grid | oracle | plot

    // scenario
    std::size_t k = 10;
    double stay_prob = 0.95;
    std::size_t n_queries = 5000;
    std::uint64_t seed = 1;
    SamplerKind sampler = SamplerKind::IdentityOrUniform;
    std::optional<std::vector<int>> logging_base;   // defaults: k == 10 scenario
    std::optional<std::vector<int>> target;
    std::optional<std::vector<double>> relevance;   // per item id
    std::optional<std::vector<int>> relevant;       // shorthand: ids with relevance 1
    std::optional<std::vector<double>> true_curve;  // default: linear decay

    // estimator
    EstimatorFamily family = EstimatorFamily::Interpol;
    std::size_t window = 0;
    double exponent = 1.0;                     // power applied to the base curve
    std::optional<std::vector<double>> curve;  // explicit estimator base curve

    // experiment grid
    std::vector<double> exponents = ExperimentGrid{}.exponents;
    std::vector<double> stay_probs = ExperimentGrid{}.stay_probs;
    std::vector<std::size_t> windows = ExperimentGrid{}.windows;
    std::size_t replications = 500;
    unsigned threads = 0;  // 0: one worker per hardware thread

    // io & plotting
    std::string input;
    std::string output;
    std::string x_axis = "window";
    std::vector<std::string> y_axes = {"mse"};

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline double as_real(const json& value, const std::string& key) {
    if (!value.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return value.get<double>();
}

inline std::uint64_t as_uint(const json& value, const std::string& key) {
    if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
        throw ConfigError("config key '" + key + "' must be a non-negative integer");
    }
    return value.get<std::uint64_t>();
}

inline std::string as_string(const json& value, const std::string& key) {
    if (!value.is_string()) throw ConfigError("config key '" + key + "' must be a string");
    return value.get<std::string>();
}

template <typename T>
std::vector<T> as_array(const json& value, const std::string& key) {
    if (!value.is_array()) throw ConfigError("config key '" + key + "' must be an array");
    try {
        return value.get<std::vector<T>>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has entries of the wrong type");
    }
}

}  // namespace detail

inline void validate_config(const RunConfig& cfg) {
    static const std::set<std::string> kModes = {"simulate", "evaluate", "grid", "oracle",
                                                 "plot"};
    if (!kModes.count(cfg.mode)) throw ConfigError("unknown mode '" + cfg.mode + "'");
    if (cfg.k == 0) throw ConfigError("config key 'k' must be at least 1");
    if (cfg.n_queries == 0) throw ConfigError("config key 'n' must be at least 1");
    if (cfg.replications < 2) throw ConfigError("config key 'replications' must be at least 2");
    if (!(cfg.exponent > 0.0)) throw ConfigError("config key 'exponent' must be positive");
    for (double e : cfg.exponents) {
        if (!(e > 0.0)) throw ConfigError("config key 'exponents' must all be positive");
    }
    const auto check_stay = [&](double q, const std::string& key) {
        if (!(q >= 0.0) || q > 1.0) throw ConfigError("config key '" + key + "' must lie in [0, 1]");
        if (cfg.sampler == SamplerKind::IdentityOrUniform && cfg.k > 1 &&
            q * static_cast<double>(cfg.k) < 1.0 - 1e-12) {
            throw ConfigError("config key '" + key +
                              "': identity-or-uniform sampler requires stay_prob >= 1/k");
        }
    };
    check_stay(cfg.stay_prob, "stay_prob");
    for (double q : cfg.stay_probs) check_stay(q, "stay_probs");
    const auto check_items = [&](const std::optional<std::vector<int>>& items,
                                 const std::string& key) {
        if (items && items->size() != cfg.k) {
            throw ConfigError("config key '" + key + "' must list exactly k items");
        }
    };
    check_items(cfg.logging_base, "logging_base");
    check_items(cfg.target, "target");
    const auto check_curve = [&](const std::optional<std::vector<double>>& curve,
                                 const std::string& key) {
        if (curve && curve->size() != cfg.k) {
            throw ConfigError("config key '" + key + "' must list exactly k entries");
        }
    };
    check_curve(cfg.true_curve, "true_curve");
    check_curve(cfg.curve, "curve");
    for (const std::string& y : cfg.y_axes) {
        if (y != "mse" && y != "bias" && y != "variance") {
            throw ConfigError("config key 'y_axes' entries must be mse, bias or variance");
        }
    }
    if (cfg.x_axis != "window" && cfg.x_axis != "stay_prob" && cfg.x_axis != "exponent") {
        throw ConfigError("config key 'x_axis' must be window, stay_prob or exponent");
    }
}

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::string trimmed = text;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
    if (trimmed.empty()) {
        validate_config(cfg);
        return cfg;
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config document must be a JSON object");

    using detail::as_array;
    using detail::as_real;
    using detail::as_string;
    using detail::as_uint;
    for (const auto& [key, value] : doc.items()) {
        if (key == "mode") {
            cfg.mode = as_string(value, key);
        } else if (key == "k") {
            cfg.k = static_cast<std::size_t>(as_uint(value, key));
        } else if (key == "stay_prob") {
            cfg.stay_prob = as_real(value, key);
        } else if (key == "n") {
            cfg.n_queries = static_cast<std::size_t>(as_uint(value, key));
        } else if (key == "seed") {
            cfg.seed = as_uint(value, key);
        } else if (key == "sampler") {
            cfg.sampler = sampler_from_string(as_string(value, key));
        } else if (key == "logging_base") {
            cfg.logging_base = as_array<int>(value, key);
        } else if (key == "target") {
            cfg.target = as_array<int>(value, key);
        } else if (key == "relevance") {
            cfg.relevance = as_array<double>(value, key);
        } else if (key == "relevant") {
            cfg.relevant = as_array<int>(value, key);
        } else if (key == "true_curve") {
            cfg.true_curve = as_array<double>(value, key);
        } else if (key == "family") {
            cfg.family = family_from_string(as_string(value, key));
        } else if (key == "window") {
            cfg.window = static_cast<std::size_t>(as_uint(value, key));
        } else if (key == "exponent") {
            cfg.exponent = as_real(value, key);
        } else if (key == "curve") {
            cfg.curve = as_array<double>(value, key);
        } else if (key == "exponents") {
            cfg.exponents = as_array<double>(value, key);
        } else if (key == "stay_probs") {
            cfg.stay_probs = as_array<double>(value, key);
        } else if (key == "windows") {
            const auto raw = as_array<std::int64_t>(value, key);
            cfg.windows.clear();
            for (std::int64_t w : raw) {
                if (w < 0) throw ConfigError("config key 'windows' must be non-negative");
                cfg.windows.push_back(static_cast<std::size_t>(w));
            }
        } else if (key == "replications") {
            cfg.replications = static_cast<std::size_t>(as_uint(value, key));
        } else if (key == "threads") {
            cfg.threads = static_cast<unsigned>(as_uint(value, key));
        } else if (key == "input") {
            cfg.input = as_string(value, key);
        } else if (key == "output") {
            cfg.output = as_string(value, key);
        } else if (key == "x_axis") {
            cfg.x_axis = as_string(value, key);
        } else if (key == "y_axes") {
            cfg.y_axes = as_array<std::string>(value, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    validate_config(cfg);
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

inline std::string serialize_config(const RunConfig& cfg) {
    json doc;
    doc["mode"] = cfg.mode;
    doc["k"] = cfg.k;
    doc["stay_prob"] = cfg.stay_prob;
    doc["n"] = cfg.n_queries;
    doc["seed"] = cfg.seed;
    doc["sampler"] = to_string(cfg.sampler);
    if (cfg.logging_base) doc["logging_base"] = *cfg.logging_base;
    if (cfg.target) doc["target"] = *cfg.target;
    if (cfg.relevance) doc["relevance"] = *cfg.relevance;
    if (cfg.relevant) doc["relevant"] = *cfg.relevant;
    if (cfg.true_curve) doc["true_curve"] = *cfg.true_curve;
    doc["family"] = to_string(cfg.family);
    doc["window"] = cfg.window;
    doc["exponent"] = cfg.exponent;
    if (cfg.curve) doc["curve"] = *cfg.curve;
    doc["exponents"] = cfg.exponents;
    doc["stay_probs"] = cfg.stay_probs;
    doc["windows"] = cfg.windows;
    doc["replications"] = cfg.replications;
    doc["threads"] = cfg.threads;
    doc["input"] = cfg.input;
    doc["output"] = cfg.output;
    doc["x_axis"] = cfg.x_axis;
    doc["y_axes"] = cfg.y_axes;
    return doc.dump(2);
}

// Builds the synthetic world a config describes. k == 10 falls back to the
// ten-item default scenario; other sizes need explicit rankings and
// relevance.
inline Scenario scenario_from_config(const RunConfig& cfg) {
    Scenario s;
    const Scenario defaults = toy_scenario(cfg.stay_prob, cfg.n_queries);
    if (cfg.logging_base) {
        s.logging_base = Ranking(*cfg.logging_base);
    } else if (cfg.k == 10) {
        s.logging_base = defaults.logging_base;
    } else {
        std::vector<int> identity(cfg.k);
        for (std::size_t i = 0; i < cfg.k; ++i) identity[i] = static_cast<int>(i);
        s.logging_base = Ranking(std::move(identity));
    }
    if (cfg.target) {
        s.target = Ranking(*cfg.target);
    } else if (cfg.k == 10 && !cfg.logging_base) {
        s.target = defaults.target;
    } else {
        s.target = s.logging_base;
    }
    s.user.true_curve = cfg.true_curve ? PositionBiasCurve(*cfg.true_curve)
                                       : PositionBiasCurve::linear(cfg.k);
    if (cfg.relevance) {
        s.user.relevance = *cfg.relevance;
    } else if (cfg.relevant) {
        int max_item = 0;
        for (int item : s.logging_base.items()) max_item = std::max(max_item, item);
        s.user.relevance.assign(static_cast<std::size_t>(max_item) + 1, 0.0);
        for (int item : *cfg.relevant) {
            if (item < 0 || static_cast<std::size_t>(item) > static_cast<std::size_t>(max_item)) {
                throw ConfigError("config key 'relevant' names item " + std::to_string(item) +
                                  " outside the ranking");
            }
            s.user.relevance[static_cast<std::size_t>(item)] = 1.0;
        }
    } else if (cfg.k == 10 && !cfg.logging_base && !cfg.target) {
        s.user.relevance = defaults.user.relevance;
    } else {
        throw ConfigError("config needs 'relevance' or 'relevant' for a custom scenario");
    }
    s.stay_prob = cfg.stay_prob;
    s.sampler = cfg.sampler;
    s.n_queries = cfg.n_queries;
    s.validate();
    return s;
}

// Estimator curve implied by a config: the explicit curve if given, else the
// scenario's true curve, else the linear default -- raised to `exponent`.
inline PositionBiasCurve estimator_curve_from_config(const RunConfig& cfg, std::size_t k) {
    PositionBiasCurve base;
    if (cfg.curve) {
        base = PositionBiasCurve(*cfg.curve);
    } else if (cfg.true_curve) {
        base = PositionBiasCurve(*cfg.true_curve);
    } else {
        base = PositionBiasCurve::linear(k);
    }
    if (base.size() != k) {
        throw ConfigError("estimator curve length does not match the ranking length");
    }
    return base.powered(cfg.exponent);
}

// ---------------------------------------------------------------------------
// Target policy files: {"ranking": [...]} and/or {"rankings": {id: [...]}}.
// ---------------------------------------------------------------------------

inline TargetPolicy policy_from_json(const json& doc) {
    if (!doc.is_object()) throw DataError("policy document must be a JSON object");
    TargetPolicy policy;
    for (const auto& [key, value] : doc.items()) {
        if (key == "ranking") {
            policy.fixed = Ranking(value.get<std::vector<int>>());
        } else if (key == "rankings") {
            if (!value.is_object()) throw DataError("policy key 'rankings' must be an object");
            for (const auto& [query_id, ranking] : value.items()) {
                policy.per_query.emplace(query_id, Ranking(ranking.get<std::vector<int>>()));
            }
        } else {
            throw DataError("unknown policy key '" + key + "'");
        }
    }
    if (!policy.fixed && policy.per_query.empty()) {
        throw DataError("policy document defines no rankings");
    }
    return policy;
}

inline TargetPolicy read_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open policy file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return policy_from_json(json::parse(buffer.str()));
    } catch (const json::exception& e) {
        throw DataError(path + ": malformed policy: " + e.what());
    }
}

inline json report_to_json(const EstimateReport& report, bool include_per_query = false) {
    json doc;
    doc["point_estimate"] = report.point_estimate;
    doc["std_error"] = report.std_error;
    doc["n"] = report.n;
    if (include_per_query) doc["per_query_sums"] = report.per_query_sums;
    return doc;
}

}  // namespace interpol::io
