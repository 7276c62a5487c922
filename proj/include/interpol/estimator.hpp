#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "interpol/errors.hpp"
#include "interpol/stats.hpp"
#include "interpol/types.hpp"
#include "interpol/weights.hpp"

namespace interpol {

enum class EstimatorFamily { Pbm, Ipm, Interpol };

inline const char* to_string(EstimatorFamily family) {
    switch (family) {
        case EstimatorFamily::Pbm: return "pbm";
        case EstimatorFamily::Ipm: return "ipm";
        case EstimatorFamily::Interpol: return "interpol";
    }
    return "?";
}

inline EstimatorFamily family_from_string(std::string_view name) {
    if (name == "pbm" || name == "PBM") return EstimatorFamily::Pbm;
    if (name == "ipm" || name == "IPM") return EstimatorFamily::Ipm;
    if (name == "interpol" || name == "INTERPOL") return EstimatorFamily::Interpol;
    throw ConfigError("unknown estimator family '" + std::string(name) + "'");
}

struct EstimatorConfig {
    EstimatorFamily family = EstimatorFamily::Interpol;
    std::size_t window = 0;                  // interpol only; above K-1 behaves as K-1
    std::optional<PositionBiasCurve> curve;  // pbm and interpol
};

struct EstimateReport {
    double point_estimate = 0.0;
    double std_error = 0.0;  // sample std of per-query sums / sqrt(n)
    std::size_t n = 0;
    std::vector<double> per_query_sums;
};

// Deterministic target policy: one fixed ranking, per-query rankings, or
// both (per-query entries take precedence).
struct TargetPolicy {
    std::optional<Ranking> fixed;
    std::map<std::string, Ranking> per_query;

    const Ranking& ranking_for(const std::string& query_id) const {
        if (auto it = per_query.find(query_id); it != per_query.end()) return it->second;
        if (fixed) return *fixed;
        throw DataError("target policy has no ranking for query '" + query_id + "'");
    }
};

// IPS point estimate of the target policy's expected clicks per query:
// the mean over queries of the weighted click sums. Items without a click
// contribute nothing and are skipped.
inline EstimateReport estimate(std::span<const ClickRecord> records, const TargetPolicy& policy,
                               const EstimatorConfig& config) {
    const bool needs_curve = config.family != EstimatorFamily::Ipm;
    const bool needs_propensities = config.family != EstimatorFamily::Pbm;
    if (needs_curve && !config.curve) {
        throw ConfigError(std::string(to_string(config.family)) +
                          " estimator requires a position bias curve");
    }

    EstimateReport report;
    report.per_query_sums.reserve(records.size());
    for (const ClickRecord& record : records) {
        record.validate();
        const Ranking& logged = record.logged_ranking;
        const Ranking& target = policy.ranking_for(record.query_id);
        if (!logged.same_items(target)) {
            throw DataError("logged and target rankings disagree on items (query '" +
                            record.query_id + "')");
        }
        if (needs_curve && config.curve->size() != logged.size()) {
            throw ConfigError("position bias curve length does not match the ranking length");
        }
        if (needs_propensities && !record.propensities) {
            throw ConfigError(std::string(to_string(config.family)) +
                              " estimator requires logged propensities (query '" +
                              record.query_id + "')");
        }

        double query_sum = 0.0;
        for (std::size_t logged_rank = 0; logged_rank < logged.size(); ++logged_rank) {
            if (record.clicks[logged_rank] == 0) continue;
            const int item = logged.item_at(logged_rank);
            const std::size_t target_rank = target.rank_of(item);
            double weight = 0.0;
            switch (config.family) {
                case EstimatorFamily::Pbm:
                    weight = pbm_weight(target_rank, logged_rank, *config.curve);
                    break;
                case EstimatorFamily::Ipm:
                    weight = ip_weight(item, target_rank, logged_rank, *record.propensities);
                    break;
                case EstimatorFamily::Interpol:
                    weight = interpol_weight(item, target_rank, logged_rank, config.window,
                                             *config.curve, *record.propensities);
                    break;
            }
            query_sum += weight;
        }
        report.per_query_sums.push_back(query_sum);
    }

    report.n = report.per_query_sums.size();
    report.point_estimate = stats::mean(report.per_query_sums);
    report.std_error =
        report.n < 2 ? 0.0
                     : stats::sample_std(report.per_query_sums, report.point_estimate) /
                           std::sqrt(static_cast<double>(report.n));
    return report;
}

}  // namespace interpol
