#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <vector>

#include "interpol/estimator.hpp"
#include "interpol/types.hpp"
#include "interpol/weights.hpp"

using namespace interpol;
using Catch::Matchers::WithinAbs;

namespace {

RankPropensities swap_matrix(const std::vector<int>& items, double stay) {
    const std::size_t k = items.size();
    const double off = k == 1 ? 0.0 : (1.0 - stay) / static_cast<double>(k - 1);
    std::vector<double> matrix(k * k, off);
    for (std::size_t r = 0; r < k; ++r) matrix[r * k + r] = k == 1 ? 1.0 : stay;
    return RankPropensities(items, std::move(matrix));
}

std::shared_ptr<const RankPropensities> shared_swap(const std::vector<int>& items, double stay) {
    return std::make_shared<const RankPropensities>(swap_matrix(items, stay));
}

}  // namespace

TEST_CASE("ranking validates its items") {
    CHECK_THROWS_AS(Ranking({0, 1, 1}), DataError);
    CHECK_THROWS_AS(Ranking({0, -1, 2}), DataError);

    const Ranking r({4, 0, 2});
    CHECK(r.size() == 3);
    CHECK(r.item_at(0) == 4);
    CHECK(r.rank_of(2) == 2);
    CHECK_THROWS_AS(r.item_at(3), std::out_of_range);
    CHECK_THROWS_AS(r.rank_of(1), DataError);
    CHECK(r.same_items(Ranking({0, 2, 4})));
    CHECK_FALSE(r.same_items(Ranking({0, 2, 5})));
    CHECK_FALSE(r.same_items(Ranking({0, 2})));
    CHECK(r == Ranking({4, 0, 2}));
    CHECK_FALSE(r == Ranking({0, 2, 4}));
}

TEST_CASE("position bias curve validates and transforms") {
    CHECK_THROWS_AS(PositionBiasCurve({1.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(PositionBiasCurve({1.0, 1.5}), ConfigError);
    CHECK_THROWS_AS(PositionBiasCurve({1.0, -0.2}), ConfigError);

    const auto linear = PositionBiasCurve::linear(4);
    CHECK(linear.at(0) == 1.0);
    CHECK(linear.at(1) == 0.75);
    CHECK(linear.at(3) == 0.25);
    CHECK_THROWS_AS(linear.at(4), std::out_of_range);

    const auto squared = linear.powered(2.0);
    CHECK_THAT(squared.at(1), WithinAbs(0.5625, 1e-15));
    CHECK(linear.powered(1.0) == linear);
    CHECK_THROWS_AS(linear.powered(0.0), ConfigError);
    CHECK_THROWS_AS(linear.powered(-1.0), ConfigError);
}

TEST_CASE("rank propensities must be doubly stochastic") {
    CHECK_NOTHROW(swap_matrix({0, 1, 2}, 0.8));
    CHECK_NOTHROW(RankPropensities({3, 9}, {0.0, 1.0, 1.0, 0.0}));

    // rows sum to one but columns do not
    CHECK_THROWS_AS(RankPropensities({0, 1}, {0.7, 0.3, 0.7, 0.3}), DataError);
    CHECK_THROWS_AS(RankPropensities({0, 1}, {0.5, 0.4, 0.5, 0.6}), DataError);
    CHECK_THROWS_AS(RankPropensities({0, 1}, {1.2, -0.2, -0.2, 1.2}), DataError);
    CHECK_THROWS_AS(RankPropensities({0, 0}, {0.5, 0.5, 0.5, 0.5}), DataError);
    CHECK_THROWS_AS(RankPropensities({0, 1}, {1.0, 0.0, 0.0}), DataError);

    const auto p = swap_matrix({5, 2, 7}, 0.8);
    CHECK(p.at(5, 0) == 0.8);
    CHECK_THAT(p.at(5, 1), WithinAbs(0.1, 1e-15));
    CHECK(p.at(2, 1) == 0.8);
    CHECK_THROWS_AS(p.at(4, 0), DataError);
    CHECK_THROWS_AS(p.at(5, 3), std::out_of_range);
    CHECK(p.row(7).size() == 3);
    CHECK(p.row(7)[2] == 0.8);
}

TEST_CASE("click records validate shape and click values") {
    ClickRecord record;
    record.query_id = "q";
    record.logged_ranking = Ranking({0, 1});
    record.clicks = {1, 0};
    CHECK_NOTHROW(record.validate());

    record.clicks = {1};
    CHECK_THROWS_AS(record.validate(), DataError);
    record.clicks = {1, 2};
    CHECK_THROWS_AS(record.validate(), DataError);

    record.clicks = {1, 0};
    record.propensities = shared_swap({0, 1, 2}, 0.8);
    CHECK_THROWS_AS(record.validate(), DataError);
    record.propensities = shared_swap({0, 1}, 0.8);
    CHECK_NOTHROW(record.validate());
}

TEST_CASE("position-based weight is the examination ratio") {
    const auto curve = PositionBiasCurve::linear(10);
    CHECK(pbm_weight(3, 3, curve) == 1.0);
    CHECK(pbm_weight(3, 4, curve) == 0.7 / 0.6);
    CHECK(pbm_weight(9, 0, curve) == 0.1);
    CHECK(pbm_weight(0, 9, curve) == 1.0 / 0.1);
    CHECK_THROWS_AS(pbm_weight(10, 0, curve), std::out_of_range);
}

TEST_CASE("item-position weight inverts the matched-rank propensity") {
    const auto p = swap_matrix({6, 0, 3}, 0.95);
    CHECK(ip_weight(6, 1, 0, p) == 0.0);
    CHECK(ip_weight(6, 0, 0, p) == 1.0 / 0.95);
    CHECK_THAT(ip_weight(0, 2, 2, p), WithinAbs(1.0 / 0.025, 1e-9));

    const RankPropensities antidiag({0, 1}, {0.0, 1.0, 1.0, 0.0});
    CHECK_THROWS_AS(ip_weight(0, 0, 0, antidiag), SupportViolation);
    CHECK(ip_weight(0, 1, 1, antidiag) == 1.0);
}

TEST_CASE("window probability sums the clipped rank window") {
    const std::vector<int> items = {6, 0, 3, 1, 4, 8, 9, 7, 5, 2};
    const auto p = swap_matrix(items, 0.95);
    const double off = 0.05 / 9.0;

    // item 6 sits at base rank 0
    CHECK_THAT(window_probability(6, 0, 1, p), WithinAbs(0.95 + off, 1e-15));
    CHECK_THAT(window_probability(6, 1, 1, p), WithinAbs(0.95 + 2 * off, 1e-15));
    CHECK_THAT(window_probability(6, 5, 1, p), WithinAbs(3 * off, 1e-15));
    CHECK_THAT(window_probability(6, 9, 1, p), WithinAbs(2 * off, 1e-15));
    CHECK(window_probability(6, 4, 9, p) == 1.0);
    CHECK(window_probability(6, 4, 50, p) == 1.0);
    CHECK_THROWS_AS(window_probability(6, 10, 1, p), std::out_of_range);

    SECTION("never decreases as the window grows") {
        double prev = 0.0;
        for (std::size_t w = 0; w <= 10; ++w) {
            const double cur = window_probability(3, 6, w, p);
            CHECK(cur >= prev);
            prev = cur;
        }
        CHECK(prev == 1.0);
    }

    const RankPropensities antidiag({0, 1}, {0.0, 1.0, 1.0, 0.0});
    CHECK_THROWS_AS(window_probability(0, 0, 0, antidiag), SupportViolation);
    CHECK(window_probability(0, 0, 1, antidiag) == 1.0);
}

TEST_CASE("interpolating weight matches a frozen example") {
    const std::vector<int> items = {6, 0, 3, 1, 4, 8, 9, 7, 5, 2};
    const auto p = swap_matrix(items, 0.95);
    const PositionBiasCurve curve({1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1});

    // item 3 (base rank 2): ratio 0.7/0.6, window mass 0.95 + 4*(0.05/9)
    CHECK_THAT(interpol_weight(3, 3, 4, 2, curve, p), WithinAbs(1.2, 1e-12));
    CHECK(interpol_weight(3, 3, 6, 2, curve, p) == 0.0);
    CHECK(interpol_weight(3, 6, 3, 2, curve, p) == 0.0);
}

TEST_CASE("window zero reproduces the item-position weight exactly") {
    const std::vector<int> items = {6, 0, 3, 1, 4, 8, 9, 7, 5, 2};
    const auto p = swap_matrix(items, 0.8);
    const auto curve = PositionBiasCurve::linear(10).powered(1.7);
    for (std::size_t t = 0; t < 10; ++t) {
        for (std::size_t l = 0; l < 10; ++l) {
            for (int item : items) {
                CHECK(interpol_weight(item, t, l, 0, curve, p) == ip_weight(item, t, l, p));
            }
        }
    }
}

TEST_CASE("window K-1 reproduces the position-based weight exactly") {
    const std::vector<int> items = {6, 0, 3, 1, 4, 8, 9, 7, 5, 2};
    const auto p = swap_matrix(items, 0.8);
    const auto curve = PositionBiasCurve::linear(10).powered(0.6);
    for (std::size_t t = 0; t < 10; ++t) {
        for (std::size_t l = 0; l < 10; ++l) {
            for (int item : items) {
                CHECK(interpol_weight(item, t, l, 9, curve, p) == pbm_weight(t, l, curve));
                CHECK(interpol_weight(item, t, l, 30, curve, p) == pbm_weight(t, l, curve));
            }
        }
    }
}

TEST_CASE("estimate averages weighted click sums over queries") {
    const PositionBiasCurve curve({1.0, 0.5});
    TargetPolicy policy;
    policy.fixed = Ranking({1, 0});

    ClickRecord record;
    record.query_id = "a";
    record.logged_ranking = Ranking({0, 1});
    record.clicks = {1, 1};

    EstimatorConfig config;
    config.family = EstimatorFamily::Pbm;
    config.curve = curve;

    SECTION("single query, both items clicked") {
        const auto report = estimate(std::vector<ClickRecord>{record}, policy, config);
        CHECK(report.n == 1);
        // item 0 moves 0 -> 1 (weight 0.5), item 1 moves 1 -> 0 (weight 2)
        CHECK(report.point_estimate == 2.5);
        CHECK(report.std_error == 0.0);
        CHECK(report.per_query_sums == std::vector<double>{2.5});
    }

    SECTION("clicks of zero contribute nothing") {
        record.clicks = {0, 0};
        const auto report = estimate(std::vector<ClickRecord>{record}, policy, config);
        CHECK(report.point_estimate == 0.0);
    }

    SECTION("two queries give mean and standard error") {
        ClickRecord second = record;
        second.query_id = "b";
        second.clicks = {0, 1};  // only item 1: weight 2
        const auto report =
            estimate(std::vector<ClickRecord>{record, second}, policy, config);
        CHECK(report.n == 2);
        CHECK(report.point_estimate == 2.25);
        // sample std of {2.5, 2.0} over sqrt(2)
        CHECK_THAT(report.std_error, WithinAbs(0.25, 1e-15));
    }

    SECTION("record order does not change the estimate") {
        ClickRecord second = record;
        second.query_id = "b";
        second.clicks = {0, 1};
        const auto ab = estimate(std::vector<ClickRecord>{record, second}, policy, config);
        const auto ba = estimate(std::vector<ClickRecord>{second, record}, policy, config);
        CHECK(ab.point_estimate == ba.point_estimate);
        CHECK(ab.std_error == ba.std_error);
    }

    SECTION("per-query rankings take precedence over the fixed one") {
        TargetPolicy mixed = policy;
        mixed.per_query.emplace("a", Ranking({0, 1}));  // identity: weights 1 + 1
        const auto report = estimate(std::vector<ClickRecord>{record}, policy, config);
        const auto report2 = estimate(std::vector<ClickRecord>{record}, mixed, config);
        CHECK(report.point_estimate == 2.5);
        CHECK(report2.point_estimate == 2.0);
    }

    SECTION("empty log yields an empty report") {
        const auto report = estimate(std::vector<ClickRecord>{}, policy, config);
        CHECK(report.n == 0);
        CHECK(report.point_estimate == 0.0);
        CHECK(report.std_error == 0.0);
    }
}

TEST_CASE("estimate rejects inconsistent inputs") {
    ClickRecord record;
    record.query_id = "a";
    record.logged_ranking = Ranking({0, 1});
    record.clicks = {1, 0};
    const std::vector<ClickRecord> log{record};

    TargetPolicy policy;
    policy.fixed = Ranking({1, 0});

    EstimatorConfig config;
    config.family = EstimatorFamily::Pbm;

    SECTION("curve required for curve-based families") {
        CHECK_THROWS_AS(estimate(log, policy, config), ConfigError);
        config.family = EstimatorFamily::Interpol;
        CHECK_THROWS_AS(estimate(log, policy, config), ConfigError);
    }

    SECTION("curve length must match") {
        config.curve = PositionBiasCurve::linear(3);
        CHECK_THROWS_AS(estimate(log, policy, config), ConfigError);
    }

    SECTION("propensities required for rank-matching families") {
        config.family = EstimatorFamily::Ipm;
        CHECK_THROWS_AS(estimate(log, policy, config), ConfigError);
        config.family = EstimatorFamily::Interpol;
        config.curve = PositionBiasCurve::linear(2);
        CHECK_THROWS_AS(estimate(log, policy, config), ConfigError);
    }

    SECTION("target must rank the same items") {
        config.curve = PositionBiasCurve::linear(2);
        TargetPolicy other;
        other.fixed = Ranking({1, 2});
        CHECK_THROWS_AS(estimate(log, other, config), DataError);
    }

    SECTION("policy must cover every query") {
        config.curve = PositionBiasCurve::linear(2);
        TargetPolicy per_query_only;
        per_query_only.per_query.emplace("someone-else", Ranking({1, 0}));
        CHECK_THROWS_AS(estimate(log, per_query_only, config), DataError);
    }
}

TEST_CASE("estimator family names round-trip") {
    CHECK(family_from_string("pbm") == EstimatorFamily::Pbm);
    CHECK(family_from_string("IPM") == EstimatorFamily::Ipm);
    CHECK(family_from_string(to_string(EstimatorFamily::Interpol)) ==
          EstimatorFamily::Interpol);
    CHECK_THROWS_AS(family_from_string("nope"), ConfigError);
}
