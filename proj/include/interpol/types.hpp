#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "interpol/errors.hpp"

namespace interpol {

// A displayed result list. items()[rank] is the item shown at `rank`;
// rank 0 is the top, most visible position.
class Ranking {
public:
    Ranking() = default;

    explicit Ranking(std::vector<int> items) : items_(std::move(items)) {
        for (int item : items_) {
            if (item < 0) throw DataError("ranking items must be non-negative");
        }
        std::vector<int> sorted = items_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw DataError("ranking is not a permutation: duplicate item");
        }
    }

    std::size_t size() const { return items_.size(); }

    int item_at(std::size_t rank) const {
        if (rank >= items_.size()) throw std::out_of_range("rank out of bounds for ranking");
        return items_[rank];
    }

    // Linear scan; result lists are short.
    std::size_t rank_of(int item) const {
        for (std::size_t k = 0; k < items_.size(); ++k) {
            if (items_[k] == item) return k;
        }
        throw DataError("item " + std::to_string(item) + " not in ranking");
    }

    bool contains(int item) const {
        return std::find(items_.begin(), items_.end(), item) != items_.end();
    }

    bool same_items(const Ranking& other) const {
        if (items_.size() != other.items_.size()) return false;
        std::vector<int> a = items_;
        std::vector<int> b = other.items_;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    }

    const std::vector<int>& items() const { return items_; }

    friend bool operator==(const Ranking&, const Ranking&) = default;

private:
    std::vector<int> items_;
};

// Per-rank examination probabilities. Entries are strictly positive so the
// ratio weights stay finite.
class PositionBiasCurve {
public:
    PositionBiasCurve() = default;

    explicit PositionBiasCurve(std::vector<double> probs) : probs_(std::move(probs)) {
        for (std::size_t k = 0; k < probs_.size(); ++k) {
            if (!(probs_[k] > 0.0) || probs_[k] > 1.0) {
                throw ConfigError("position bias curve entry " + std::to_string(k) +
                                  " must lie in (0, 1]");
            }
        }
    }

    std::size_t size() const { return probs_.size(); }

    double at(std::size_t rank) const {
        if (rank >= probs_.size()) throw std::out_of_range("rank out of bounds for curve");
        return probs_[rank];
    }

    // Componentwise power: exponents below 1 flatten the curve, above 1
    // steepen it.
    PositionBiasCurve powered(double exponent) const {
        if (!(exponent > 0.0)) throw ConfigError("curve exponent must be positive");
        std::vector<double> out(probs_.size());
        for (std::size_t k = 0; k < probs_.size(); ++k) {
            out[k] = std::pow(probs_[k], exponent);
        }
        return PositionBiasCurve(std::move(out));
    }

    // [K/K, (K-1)/K, ..., 1/K], the linearly decaying default.
    static PositionBiasCurve linear(std::size_t k) {
        std::vector<double> probs(k);
        for (std::size_t i = 0; i < k; ++i) {
            probs[i] = static_cast<double>(k - i) / static_cast<double>(k);
        }
        return PositionBiasCurve(std::move(probs));
    }

    const std::vector<double>& probs() const { return probs_; }

    friend bool operator==(const PositionBiasCurve&, const PositionBiasCurve&) = default;

private:
    std::vector<double> probs_;
};

// Marginal display distribution of a stochastic logging policy: one row per
// item, one column per rank. The policy shows every item at exactly one rank
// per impression, so rows and columns must each sum to one; checked at
// construction. Individual entries may be zero -- full support is only
// required where an entry is actually used as an IPS denominator.
class RankPropensities {
public:
    static constexpr double kStochasticTol = 1e-12;

    RankPropensities() = default;

    // `matrix` is row-major K x K; row i belongs to items[i].
    RankPropensities(std::vector<int> items, std::vector<double> matrix)
        : items_(std::move(items)), matrix_(std::move(matrix)) {
        const std::size_t k = items_.size();
        if (matrix_.size() != k * k) {
            throw DataError("propensity matrix must be K x K");
        }
        std::vector<int> sorted = items_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw DataError("duplicate item in propensity matrix");
        }
        for (double entry : matrix_) {
            if (!(entry >= 0.0) || entry > 1.0 + kStochasticTol) {
                throw DataError("propensity entries must lie in [0, 1]");
            }
        }
        for (std::size_t i = 0; i < k; ++i) {
            double row_sum = 0.0;
            double col_sum = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                row_sum += matrix_[i * k + j];
                col_sum += matrix_[j * k + i];
            }
            if (std::abs(row_sum - 1.0) > kStochasticTol) {
                throw DataError("propensity row " + std::to_string(i) + " does not sum to 1");
            }
            if (std::abs(col_sum - 1.0) > kStochasticTol) {
                throw DataError("propensity column " + std::to_string(i) + " does not sum to 1");
            }
        }
    }

    std::size_t size() const { return items_.size(); }

    double at(int item, std::size_t rank) const {
        if (rank >= size()) throw std::out_of_range("rank out of bounds for propensities");
        return matrix_[row_index(item) * size() + rank];
    }

    // Full rank distribution of one item.
    std::span<const double> row(int item) const {
        return {matrix_.data() + row_index(item) * size(), size()};
    }

    const std::vector<int>& items() const { return items_; }
    const std::vector<double>& matrix() const { return matrix_; }

    friend bool operator==(const RankPropensities&, const RankPropensities&) = default;

private:
    std::size_t row_index(int item) const {
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (items_[i] == item) return i;
        }
        throw DataError("item " + std::to_string(item) + " has no propensity row");
    }

    std::vector<int> items_;
    std::vector<double> matrix_;
};

// One logged query: what was shown and what got clicked. Propensities are
// shared across the records of a dataset; estimators that only need a
// position bias curve work without them.
struct ClickRecord {
    std::string query_id;
    Ranking logged_ranking;
    std::vector<int> clicks;  // 0/1, aligned with logged_ranking positions
    std::shared_ptr<const RankPropensities> propensities;

    void validate() const {
        if (clicks.size() != logged_ranking.size()) {
            throw DataError("clicks length != ranking length (query '" + query_id + "')");
        }
        for (int c : clicks) {
            if (c != 0 && c != 1) {
                throw DataError("click indicators must be 0 or 1 (query '" + query_id + "')");
            }
        }
        if (propensities && propensities->size() != logged_ranking.size()) {
            throw DataError("propensity matrix size mismatch (query '" + query_id + "')");
        }
    }
};

}  // namespace interpol
