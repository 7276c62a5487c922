#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace interpol::stats {

// Neumaier-compensated accumulator. Keeps long sums of IPS terms accurate
// enough that the exact ground-truth checks and the mse = bias^2 + variance
// identity hold at tight tolerances.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double sum(std::span<const double> xs) {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

inline double mean(std::span<const double> xs) {
    return xs.empty() ? 0.0 : sum(xs) / static_cast<double>(xs.size());
}

// Population (1/N) variance around a precomputed mean.
inline double population_variance(std::span<const double> xs, double mean_value) {
    if (xs.empty()) return 0.0;
    CompensatedSum acc;
    for (double x : xs) {
        const double d = x - mean_value;
        acc.add(d * d);
    }
    return acc.value() / static_cast<double>(xs.size());
}

// Sample (1/(N-1)) standard deviation; zero for fewer than two points.
inline double sample_std(std::span<const double> xs, double mean_value) {
    if (xs.size() < 2) return 0.0;
    CompensatedSum acc;
    for (double x : xs) {
        const double d = x - mean_value;
        acc.add(d * d);
    }
    return std::sqrt(acc.value() / static_cast<double>(xs.size() - 1));
}

}  // namespace interpol::stats
