#pragma once

// Umbrella header: counterfactual evaluation of ranking policies from logged
// clicks, with a window-interpolated propensity family that trades bias
// against variance between the position-based and item-position extremes.

#include "interpol/errors.hpp"
#include "interpol/estimator.hpp"
#include "interpol/experiments.hpp"
#include "interpol/io.hpp"
#include "interpol/logging_policy.hpp"
#include "interpol/plot.hpp"
#include "interpol/random.hpp"
#include "interpol/simulation.hpp"
#include "interpol/stats.hpp"
#include "interpol/types.hpp"
#include "interpol/weights.hpp"
