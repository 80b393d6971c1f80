#pragma once

#include "neuromaps/types.hpp"

namespace neuromaps::sdfit {

// Exact linear least squares on the charge form Q(W) = A·W = rheobase·W +
// rheobase·chronaxie; rss reported in threshold space.
SDFit fit_weiss(const std::vector<SDPoint>& points);

// Golden-section search over chronaxie in [0.1·min W, 10·max W] with the
// rheobase solved in closed form per candidate; rss in threshold space.
SDFit fit_lapicque(const std::vector<SDPoint>& points);

double predict_threshold(const SDFit& fit, double width_ms);

}  // namespace neuromaps::sdfit
