#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "interpol/simulation.hpp"

using namespace interpol;
using Catch::Matchers::WithinAbs;

TEST_CASE("scenario validation catches inconsistent worlds") {
    Scenario s = toy_scenario();
    CHECK_NOTHROW(s.validate());

    SECTION("target must rank the same items") {
        s.target = Ranking({0, 1, 2, 3, 4, 5, 6, 7, 8, 10});
        CHECK_THROWS_AS(s.validate(), ConfigError);
    }
    SECTION("curve length must match") {
        s.user.true_curve = PositionBiasCurve::linear(9);
        CHECK_THROWS_AS(s.validate(), ConfigError);
    }
    SECTION("relevance table must cover every item") {
        s.user.relevance.resize(9);
        CHECK_THROWS_AS(s.validate(), ConfigError);
    }
    SECTION("relevance values must be probabilities") {
        s.user.relevance[3] = 1.5;
        CHECK_THROWS_AS(s.validate(), ConfigError);
    }
}

TEST_CASE("clicks require a relevant item at an examined position") {
    UserModel user;
    user.relevance = {1.0, 0.0};
    user.true_curve = PositionBiasCurve({1.0, 1.0});
    rng::Engine eng = rng::make_engine(3);

    SECTION("certain examination clicks every relevant item") {
        for (int i = 0; i < 20; ++i) {
            CHECK(simulate_clicks(Ranking({0, 1}), user, eng) == std::vector<int>{1, 0});
            CHECK(simulate_clicks(Ranking({1, 0}), user, eng) == std::vector<int>{0, 1});
        }
    }
    SECTION("curve length must match the ranking") {
        CHECK_THROWS_AS(simulate_clicks(Ranking({0}), user, eng), ConfigError);
    }
    SECTION("unknown items are rejected") {
        CHECK_THROWS_AS(simulate_clicks(Ranking({0, 2}), user, eng), DataError);
    }
}

TEST_CASE("click rate tracks relevance times examination") {
    UserModel user;
    user.relevance = {0.8, 0.0};
    user.true_curve = PositionBiasCurve({0.5, 1.0});
    rng::Engine eng = rng::make_engine(17);
    const std::size_t draws = 100000;
    std::size_t clicks = 0;
    for (std::size_t i = 0; i < draws; ++i) {
        clicks += static_cast<std::size_t>(simulate_clicks(Ranking({0, 1}), user, eng)[0]);
    }
    const double p = 0.8 * 0.5;
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(draws));
    CHECK_THAT(static_cast<double>(clicks) / static_cast<double>(draws),
               WithinAbs(p, 3.0 * sigma));
}

TEST_CASE("datasets are reproducible and share one propensity matrix") {
    const Scenario s = toy_scenario(0.9, 50);
    const auto a = generate_dataset(s, 50, 99);
    const auto b = generate_dataset(s, 50, 99);
    const auto c = generate_dataset(s, 50, 100);

    REQUIRE(a.size() == 50);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].query_id == std::to_string(i));
        CHECK(a[i].logged_ranking == b[i].logged_ranking);
        CHECK(a[i].clicks == b[i].clicks);
        CHECK(a[i].propensities == a.front().propensities);
        if (!(a[i].logged_ranking == c[i].logged_ranking) || a[i].clicks != c[i].clicks) {
            any_difference = true;
        }
    }
    CHECK(any_difference);
    CHECK_THROWS_AS(generate_dataset(s, 0, 1), ConfigError);
}

TEST_CASE("a never-swapping policy always logs the base ranking") {
    const Scenario s = toy_scenario(1.0, 3);
    const auto records = generate_dataset(s, 3, 8);
    for (const auto& record : records) {
        CHECK(record.logged_ranking == s.logging_base);
        CHECK(record.propensities->at(6, 0) == 1.0);
    }
}

TEST_CASE("logged click marginals match the closed form") {
    const Scenario s = toy_scenario(0.95, 1);
    const std::size_t draws = 100000;
    const auto records = generate_dataset(s, draws, 31);
    std::size_t clicks_rank0 = 0, clicks_rank3 = 0;
    for (const auto& record : records) {
        clicks_rank0 += static_cast<std::size_t>(record.clicks[0]);
        clicks_rank3 += static_cast<std::size_t>(record.clicks[3]);
    }
    // P(click at rank j) = curve[j] * sum_y P(y shown at j) rel(y); four
    // relevant items, none at base rank 0, one (item 1) at base rank 3.
    const double off = 0.05 / 9.0;
    const double p0 = 1.0 * (4.0 * off);
    const double p3 = 0.7 * (0.95 + 3.0 * off);
    const auto sigma = [&](double p) {
        return std::sqrt(p * (1.0 - p) / static_cast<double>(draws));
    };
    CHECK_THAT(static_cast<double>(clicks_rank0) / static_cast<double>(draws),
               WithinAbs(p0, 3.0 * sigma(p0)));
    CHECK_THAT(static_cast<double>(clicks_rank3) / static_cast<double>(draws),
               WithinAbs(p3, 3.0 * sigma(p3)));
}

TEST_CASE("true values of the built-in scenarios") {
    const Scenario toy = toy_scenario();
    CHECK(true_value(toy.target, toy.user) == 2.0);
    CHECK(true_value(toy.logging_base, toy.user) == 1.7);

    const Scenario mini = mini_scenario();
    CHECK(true_value(mini.target, mini.user) == 1.0);

    UserModel indifferent;
    indifferent.relevance = {0.0, 0.0};
    indifferent.true_curve = PositionBiasCurve({1.0, 0.5});
    CHECK(true_value(Ranking({1, 0}), indifferent) == 0.0);
    CHECK_THROWS_AS(true_value(Ranking({0}), indifferent), ConfigError);
}

TEST_CASE("curve powering is the misspecification knob") {
    const PositionBiasCurve curve({1.0, 0.5, 0.1});
    CHECK(power_curve(curve, 1.0) == curve);
    CHECK(power_curve(curve, 2.0).at(1) == 0.25);
    CHECK_THAT(power_curve(curve, 0.2).at(2), WithinAbs(0.6309573444801932, 1e-15));
    CHECK(power_curve(curve, 5.0).at(0) == 1.0);
    CHECK_THROWS_AS(power_curve(curve, 0.0), ConfigError);
}
