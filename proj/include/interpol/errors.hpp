#pragma once

#include <stdexcept>

namespace interpol {

// Error taxonomy mirrored by the CLI exit codes:
// ConfigError -> 2, DataError -> 3, SupportViolation -> 4.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An IPS denominator with zero probability mass; the estimate is undefined.
struct SupportViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace interpol
