#pragma once

#include <algorithm>
#include <cstddef>
#include <string>

#include "interpol/errors.hpp"
#include "interpol/types.hpp"

namespace interpol {

// Position-based weight: the examination-probability ratio between the
// target position and the logged position of an item.
inline double pbm_weight(std::size_t target_rank, std::size_t logged_rank,
                         const PositionBiasCurve& curve) {
    return curve.at(target_rank) / curve.at(logged_rank);
}

// Item-position weight: zero unless the logged rank equals the target rank,
// otherwise the inverse propensity of the item at that rank.
inline double ip_weight(int item, std::size_t target_rank, std::size_t logged_rank,
                        const RankPropensities& propensities) {
    if (logged_rank != target_rank) return 0.0;
    const double p = propensities.at(item, target_rank);
    if (!(p > 0.0)) {
        throw SupportViolation("item " + std::to_string(item) +
                               " has zero propensity at rank " + std::to_string(target_rank));
    }
    return 1.0 / p;
}

// Probability that the logging policy displays `item` within `window`
// positions of `target_rank`. The window is symmetric and clipped at the
// list edges; once it covers every rank, the row-sum invariant pins the
// value to exactly 1.
inline double window_probability(int item, std::size_t target_rank, std::size_t window,
                                 const RankPropensities& propensities) {
    const std::size_t k = propensities.size();
    if (target_rank >= k) throw std::out_of_range("target rank out of bounds");
    const std::size_t w = std::min(window, k - 1);
    const std::size_t lo = target_rank > w ? target_rank - w : 0;
    const std::size_t hi = std::min(k - 1, target_rank + w);
    if (lo == 0 && hi == k - 1) return 1.0;
    const auto row = propensities.row(item);
    double total = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) total += row[j];
    if (!(total > 0.0)) {
        throw SupportViolation("window of size " + std::to_string(window) + " around rank " +
                               std::to_string(target_rank) + " has zero probability for item " +
                               std::to_string(item));
    }
    return total;
}

// Interpolating weight: inverse probability of the window event times the
// residual position-bias ratio inside the window. A window of 0 reduces to
// the item-position weight, a window of K-1 or larger to the position-based
// weight.
inline double interpol_weight(int item, std::size_t target_rank, std::size_t logged_rank,
                              std::size_t window, const PositionBiasCurve& curve,
                              const RankPropensities& propensities) {
    const std::size_t gap =
        target_rank > logged_rank ? target_rank - logged_rank : logged_rank - target_rank;
    if (gap > window) return 0.0;
    return pbm_weight(target_rank, logged_rank, curve) /
           window_probability(item, target_rank, window, propensities);
}

}  // namespace interpol
