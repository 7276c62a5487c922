#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "interpol/errors.hpp"
#include "interpol/logging_policy.hpp"
#include "interpol/random.hpp"
#include "interpol/stats.hpp"
#include "interpol/types.hpp"

namespace interpol {

// Position-based user: relevance depends on the item alone, examination on
// the rank alone, and a click requires both.
struct UserModel {
    std::vector<double> relevance;  // indexed by item id, values in [0, 1]
    PositionBiasCurve true_curve;

    double relevance_of(int item) const {
        if (item < 0 || static_cast<std::size_t>(item) >= relevance.size()) {
            throw DataError("no relevance entry for item " + std::to_string(item));
        }
        return relevance[static_cast<std::size_t>(item)];
    }
};

// Fully specified synthetic world: a randomized logging policy, a fixed
// deterministic target ranking, and the user model that generates clicks.
struct Scenario {
    Ranking logging_base;
    Ranking target;
    UserModel user;
    double stay_prob = 0.95;
    SamplerKind sampler = SamplerKind::IdentityOrUniform;
    std::size_t n_queries = 5000;

    std::size_t size() const { return logging_base.size(); }

    void validate() const {
        if (!logging_base.same_items(target)) {
            throw ConfigError("logging base and target ranking must contain the same items");
        }
        if (user.true_curve.size() != logging_base.size()) {
            throw ConfigError("true curve length must equal the ranking length");
        }
        for (int item : logging_base.items()) {
            if (item < 0 || static_cast<std::size_t>(item) >= user.relevance.size()) {
                throw ConfigError("relevance table does not cover item " + std::to_string(item));
            }
            const double r = user.relevance[static_cast<std::size_t>(item)];
            if (!(r >= 0.0) || r > 1.0) {
                throw ConfigError("relevance of item " + std::to_string(item) +
                                  " must lie in [0, 1]");
            }
        }
    }
};

// Ten items, linearly decaying examination curve, relevant items {1, 2, 4, 7}
// split between the top and the bottom of the target list. The target
// policy's expected clicks per query come out to exactly 2.
inline Scenario toy_scenario(double stay_prob = 0.95, std::size_t n_queries = 5000) {
    Scenario s;
    s.logging_base = Ranking({6, 0, 3, 1, 4, 8, 9, 7, 5, 2});
    s.target = Ranking({7, 0, 3, 1, 5, 6, 8, 9, 2, 4});
    s.user.true_curve = PositionBiasCurve({1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1});
    s.user.relevance.assign(10, 0.0);
    for (int item : {1, 2, 4, 7}) s.user.relevance[static_cast<std::size_t>(item)] = 1.0;
    s.stay_prob = stay_prob;
    s.n_queries = n_queries;
    return s;
}

// Three-item world, small enough to enumerate every logging outcome exactly.
inline Scenario mini_scenario(double stay_prob = 0.8,
                              SamplerKind sampler = SamplerKind::CyclicShift) {
    Scenario s;
    s.logging_base = Ranking({0, 1, 2});
    s.target = Ranking({0, 1, 2});
    s.user.true_curve = PositionBiasCurve({1.0, 0.6, 0.3});
    s.user.relevance = {1.0, 0.0, 0.0};
    s.stay_prob = stay_prob;
    s.sampler = sampler;
    s.n_queries = 1000;
    return s;
}

// One Bernoulli draw per position: a click happens iff the item is relevant
// and the position is examined. Positions do not interact.
inline std::vector<int> simulate_clicks(const Ranking& ranking, const UserModel& user,
                                        rng::Engine& eng) {
    if (user.true_curve.size() != ranking.size()) {
        throw ConfigError("curve length must equal the ranking length");
    }
    std::vector<int> clicks(ranking.size(), 0);
    for (std::size_t k = 0; k < ranking.size(); ++k) {
        const double p = user.relevance_of(ranking.item_at(k)) * user.true_curve.at(k);
        clicks[k] = rng::bernoulli(eng, p) ? 1 : 0;
    }
    return clicks;
}

// n logged queries drawn from the scenario's randomized logging policy; every
// record carries the policy's exact propensity matrix.
inline std::vector<ClickRecord> generate_dataset(const Scenario& scenario, std::size_t n,
                                                 std::uint64_t seed) {
    scenario.validate();
    if (n == 0) throw ConfigError("dataset needs at least one query");
    const SwapPolicy policy(scenario.logging_base, scenario.stay_prob, scenario.sampler);
    const auto propensities =
        std::make_shared<const RankPropensities>(policy.propensity_matrix());
    rng::Engine eng = rng::make_engine(seed);
    std::vector<ClickRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ClickRecord record;
        record.query_id = std::to_string(i);
        record.logged_ranking = policy.sample(eng);
        record.clicks = simulate_clicks(record.logged_ranking, scenario.user, eng);
        record.propensities = propensities;
        records.push_back(std::move(record));
    }
    return records;
}

// Expected clicks per query of a deterministic ranking under full visibility.
inline double true_value(const Ranking& target, const UserModel& user) {
    if (user.true_curve.size() != target.size()) {
        throw ConfigError("curve length must equal the ranking length");
    }
    stats::CompensatedSum total;
    for (std::size_t k = 0; k < target.size(); ++k) {
        total.add(user.relevance_of(target.item_at(k)) * user.true_curve.at(k));
    }
    return total.value();
}

// Componentwise power of the examination curve (the misspecification knob).
inline PositionBiasCurve power_curve(const PositionBiasCurve& curve, double exponent) {
    return curve.powered(exponent);
}

}  // namespace interpol
