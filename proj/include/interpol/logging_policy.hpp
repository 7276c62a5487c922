#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "interpol/errors.hpp"
#include "interpol/random.hpp"
#include "interpol/types.hpp"

namespace interpol {

// The stay-probability marginals alone do not pin down a joint distribution
// over permutations, so two exact-marginal joints are provided:
//   IdentityOrUniform -- keep the base order with mixture weight
//     gamma = (qK - 1)/(K - 1), else draw a uniformly random permutation.
//     Needs q >= 1/K for the mixture weight to be non-negative.
//   CyclicShift -- rotate every display position by a shared offset:
//     0 with probability q, each other offset with probability (1-q)/(K-1).
//     Valid for any q in [0, 1].
enum class SamplerKind { IdentityOrUniform, CyclicShift };

inline const char* to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::IdentityOrUniform: return "identity-or-uniform";
        case SamplerKind::CyclicShift: return "cyclic-shift";
    }
    return "?";
}

inline SamplerKind sampler_from_string(std::string_view name) {
    if (name == "identity-or-uniform") return SamplerKind::IdentityOrUniform;
    if (name == "cyclic-shift") return SamplerKind::CyclicShift;
    throw ConfigError("unknown sampler '" + std::string(name) + "'");
}

// Stochastic logging policy: every item keeps its base rank with probability
// stay_prob and lands on each other rank with probability
// (1 - stay_prob)/(K - 1).
class SwapPolicy {
public:
    SwapPolicy(Ranking base, double stay_prob,
               SamplerKind sampler = SamplerKind::IdentityOrUniform)
        : base_(std::move(base)), stay_prob_(stay_prob), sampler_(sampler) {
        const auto k = static_cast<double>(base_.size());
        if (base_.size() == 0) throw ConfigError("logging policy needs a non-empty base ranking");
        if (!(stay_prob_ >= 0.0) || stay_prob_ > 1.0) {
            throw ConfigError("stay_prob must lie in [0, 1]");
        }
        if (sampler_ == SamplerKind::IdentityOrUniform && base_.size() > 1 &&
            stay_prob_ * k < 1.0 - 1e-12) {
            throw ConfigError("identity-or-uniform sampler requires stay_prob >= 1/K");
        }
    }

    const Ranking& base() const { return base_; }
    double stay_prob() const { return stay_prob_; }
    SamplerKind sampler() const { return sampler_; }
    std::size_t size() const { return base_.size(); }

    // Mixture weight of the unchanged base ranking under IdentityOrUniform,
    // chosen so the per-item stay-probability marginals come out exactly.
    double identity_mixture_weight() const {
        if (base_.size() <= 1) return 1.0;
        const auto k = static_cast<double>(base_.size());
        return std::max(0.0, (stay_prob_ * k - 1.0) / (k - 1.0));
    }

    Ranking sample(rng::Engine& eng) const {
        const std::size_t k = size();
        if (k == 1) return base_;
        if (sampler_ == SamplerKind::IdentityOrUniform) {
            if (rng::uniform_unit(eng) < identity_mixture_weight()) return base_;
            std::vector<int> items = base_.items();
            rng::shuffle(items, eng);
            return Ranking(std::move(items));
        }
        std::size_t shift = 0;
        if (!(rng::uniform_unit(eng) < stay_prob_)) {
            shift = 1 + static_cast<std::size_t>(rng::uniform_below(eng, k - 1));
        }
        if (shift == 0) return base_;
        std::vector<int> items(k);
        for (std::size_t r = 0; r < k; ++r) items[(r + shift) % k] = base_.item_at(r);
        return Ranking(std::move(items));
    }

    // Closed-form marginals, identical for both samplers: stay_prob on the
    // base rank, (1 - stay_prob)/(K - 1) everywhere else.
    RankPropensities propensity_matrix() const {
        const std::size_t k = size();
        const double off =
            k == 1 ? 0.0 : (1.0 - stay_prob_) / static_cast<double>(k - 1);
        std::vector<double> matrix(k * k, off);
        for (std::size_t r = 0; r < k; ++r) {
            matrix[r * k + r] = k == 1 ? 1.0 : stay_prob_;
        }
        return RankPropensities(base_.items(), std::move(matrix));
    }

private:
    Ranking base_;
    double stay_prob_ = 1.0;
    SamplerKind sampler_ = SamplerKind::IdentityOrUniform;
};

}  // namespace interpol
