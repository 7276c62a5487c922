#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "interpol/estimator.hpp"
#include "interpol/simulation.hpp"
#include "interpol/stats.hpp"

namespace interpol {

struct ExperimentGrid {
    std::vector<double> exponents = {0.2, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
    std::vector<double> stay_probs = {0.5, 0.55, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
    std::vector<std::size_t> windows = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::size_t n_queries = 5000;
    std::size_t replications = 500;  // at least 2
    std::uint64_t base_seed = 1;
};

// Population (1/R) variance convention, so mse == bias^2 + variance is an
// algebraic identity rather than an approximation.
struct CellResult {
    double exponent = 1.0;
    double stay_prob = 0.95;
    std::size_t window = 0;
    double mse = 0.0;
    double bias = 0.0;
    double variance = 0.0;
    double mean_estimate = 0.0;
    double true_value = 0.0;
    std::size_t replications = 0;
    std::size_t n_queries = 0;
};

// One point estimate per seed: a fresh dataset of n_queries logged under
// stay_prob, evaluated with the interpolating estimator and the scenario's
// true curve raised to `exponent`.
inline std::vector<double> replicate_estimates(const Scenario& scenario, double exponent,
                                               double stay_prob, std::size_t window,
                                               std::size_t n_queries,
                                               std::span<const std::uint64_t> seeds) {
    Scenario cell_scenario = scenario;
    cell_scenario.stay_prob = stay_prob;

    EstimatorConfig config;
    config.family = EstimatorFamily::Interpol;
    config.window = window;
    config.curve = cell_scenario.user.true_curve.powered(exponent);

    TargetPolicy policy;
    policy.fixed = cell_scenario.target;

    std::vector<double> estimates;
    estimates.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
        const auto dataset = generate_dataset(cell_scenario, n_queries, seed);
        estimates.push_back(estimate(dataset, policy, config).point_estimate);
    }
    return estimates;
}

inline CellResult summarize_replications(const Scenario& scenario, double exponent,
                                         double stay_prob, std::size_t window,
                                         std::size_t n_queries,
                                         std::span<const double> estimates) {
    CellResult cell;
    cell.exponent = exponent;
    cell.stay_prob = stay_prob;
    cell.window = window;
    cell.replications = estimates.size();
    cell.n_queries = n_queries;
    cell.true_value = true_value(scenario.target, scenario.user);
    cell.mean_estimate = stats::mean(estimates);
    cell.bias = cell.mean_estimate - cell.true_value;
    cell.variance = stats::population_variance(estimates, cell.mean_estimate);
    // MSE accumulated directly against the truth, not as bias^2 + variance,
    // so the decomposition identity stays a real consistency check.
    stats::CompensatedSum squared_error;
    for (double e : estimates) {
        const double d = e - cell.true_value;
        squared_error.add(d * d);
    }
    cell.mse = squared_error.value() / static_cast<double>(estimates.size());
    return cell;
}

// R independent replications seeded base_seed + r.
inline CellResult run_cell(const Scenario& scenario, double exponent, double stay_prob,
                           std::size_t window, std::size_t n_queries, std::size_t replications,
                           std::uint64_t base_seed) {
    if (replications < 2) throw ConfigError("replications must be at least 2");
    std::vector<std::uint64_t> seeds(replications);
    for (std::size_t r = 0; r < replications; ++r) seeds[r] = base_seed + r;
    const auto estimates =
        replicate_estimates(scenario, exponent, stay_prob, window, n_queries, seeds);
    return summarize_replications(scenario, exponent, stay_prob, window, n_queries, estimates);
}

// Every (exponent, stay_prob, window) combination. Cells are independent and
// each is seeded from base_seed alone, so the result does not depend on the
// number of workers or on scheduling.
inline std::vector<CellResult> run_grid(const Scenario& scenario, const ExperimentGrid& grid,
                                        unsigned workers = 0) {
    if (grid.replications < 2) throw ConfigError("replications must be at least 2");
    struct CellSpec {
        double exponent;
        double stay_prob;
        std::size_t window;
    };
    std::vector<CellSpec> cells;
    cells.reserve(grid.exponents.size() * grid.stay_probs.size() * grid.windows.size());
    for (double exponent : grid.exponents) {
        for (double stay_prob : grid.stay_probs) {
            for (std::size_t window : grid.windows) {
                cells.push_back({exponent, stay_prob, window});
            }
        }
    }
    std::vector<CellResult> results(cells.size());
    if (cells.empty()) return results;

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(cells.size()));

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    const auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                results[i] = run_cell(scenario, cells[i].exponent, cells[i].stay_prob,
                                      cells[i].window, grid.n_queries, grid.replications,
                                      grid.base_seed);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& thread : pool) thread.join();
    }
    if (error) std::rethrow_exception(error);
    return results;
}

// Exact E[estimate] by enumerating every logging outcome and replacing each
// click with its expectation rel(y) * p_true[logged rank] -- valid because
// clicks enter the estimator additively and do not interact under the
// position-based model. With the true curve this returns the target policy's
// true value for every window size; with a misspecified curve it certifies
// the biased expectation.
inline double exhaustive_oracle(const Scenario& scenario, std::size_t window,
                                const PositionBiasCurve& estimator_curve) {
    scenario.validate();
    if (estimator_curve.size() != scenario.size()) {
        throw ConfigError("estimator curve length must equal the ranking length");
    }
    const std::size_t k = scenario.size();
    const SwapPolicy policy(scenario.logging_base, scenario.stay_prob, scenario.sampler);
    const RankPropensities propensities = policy.propensity_matrix();

    stats::CompensatedSum expectation;
    const auto accumulate_outcome = [&](const Ranking& logged, double outcome_prob) {
        if (!(outcome_prob > 0.0)) return;  // never touches the support
        double inner = 0.0;
        for (std::size_t logged_rank = 0; logged_rank < k; ++logged_rank) {
            const int item = logged.item_at(logged_rank);
            const double rel = scenario.user.relevance_of(item);
            if (rel == 0.0) continue;
            const std::size_t target_rank = scenario.target.rank_of(item);
            const double weight = interpol_weight(item, target_rank, logged_rank, window,
                                                  estimator_curve, propensities);
            inner += weight * rel * scenario.user.true_curve.at(logged_rank);
        }
        expectation.add(outcome_prob * inner);
    };

    if (k == 1) {
        accumulate_outcome(scenario.logging_base, 1.0);
        return expectation.value();
    }

    if (scenario.sampler == SamplerKind::CyclicShift) {
        const double off = (1.0 - scenario.stay_prob) / static_cast<double>(k - 1);
        for (std::size_t shift = 0; shift < k; ++shift) {
            std::vector<int> items(k);
            for (std::size_t r = 0; r < k; ++r) {
                items[(r + shift) % k] = scenario.logging_base.item_at(r);
            }
            accumulate_outcome(Ranking(std::move(items)),
                               shift == 0 ? scenario.stay_prob : off);
        }
        return expectation.value();
    }

    constexpr std::size_t kMaxEnumerableItems = 8;
    if (k > kMaxEnumerableItems) {
        throw ConfigError("exhaustive enumeration supports at most " +
                          std::to_string(kMaxEnumerableItems) +
                          " items with the identity-or-uniform sampler");
    }
    std::vector<int> items = scenario.logging_base.items();
    std::sort(items.begin(), items.end());
    double permutations = 1.0;
    for (std::size_t i = 2; i <= k; ++i) permutations *= static_cast<double>(i);
    const double gamma = policy.identity_mixture_weight();
    const double uniform_prob = (1.0 - gamma) / permutations;
    do {
        Ranking logged(items);
        const bool is_base = logged == scenario.logging_base;
        accumulate_outcome(logged, uniform_prob + (is_base ? gamma : 0.0));
    } while (std::next_permutation(items.begin(), items.end()));
    return expectation.value();
}

}  // namespace interpol
