#include "neuromaps/sdfit.hpp"

#include <algorithm>
#include <cmath>

namespace neuromaps::sdfit {

namespace {

void check_points(const std::vector<SDPoint>& points) {
  if (points.size() < 2) throw insufficient_points_error("need at least 2 SD points");
  double min_w = points.front().width_ms, max_w = min_w;
  for (const auto& pt : points) {
    if (!(pt.width_ms > 0.0) || !(pt.threshold_vpp > 0.0))
      throw error("SD points must have positive width and threshold");
    min_w = std::min(min_w, pt.width_ms);
    max_w = std::max(max_w, pt.width_ms);
  }
  if (min_w == max_w) throw error("SD points need at least 2 distinct widths");
}

double weiss_rss(const std::vector<SDPoint>& points, double rheobase, double chronaxie) {
  double rss = 0.0;
  for (const auto& pt : points) {
    const double r = pt.threshold_vpp - rheobase * (1.0 + chronaxie / pt.width_ms);
    rss += r * r;
  }
  return rss;
}

double lapicque_regressor(double width_ms, double chronaxie_ms) {
  return 1.0 / (1.0 - std::exp2(-width_ms / chronaxie_ms));
}

// Closed-form rheobase and rss for a fixed Lapicque chronaxie.
std::pair<double, double> lapicque_profile(const std::vector<SDPoint>& points,
                                           double chronaxie_ms) {
  double num = 0.0, den = 0.0;
  for (const auto& pt : points) {
    const double g = lapicque_regressor(pt.width_ms, chronaxie_ms);
    num += pt.threshold_vpp * g;
    den += g * g;
  }
  const double rheobase = num / den;
  double rss = 0.0;
  for (const auto& pt : points) {
    const double r = pt.threshold_vpp - rheobase * lapicque_regressor(pt.width_ms, chronaxie_ms);
    rss += r * r;
  }
  return {rheobase, rss};
}

}  // namespace

SDFit fit_weiss(const std::vector<SDPoint>& points) {
  check_points(points);
  const auto n = static_cast<double>(points.size());

  double mw = 0.0, mq = 0.0;
  for (const auto& pt : points) {
    mw += pt.width_ms;
    mq += pt.threshold_vpp * pt.width_ms;
  }
  mw /= n;
  mq /= n;
  double sww = 0.0, swq = 0.0;
  for (const auto& pt : points) {
    const double dw = pt.width_ms - mw;
    sww += dw * dw;
    swq += dw * (pt.threshold_vpp * pt.width_ms - mq);
  }
  const double slope = swq / sww;       // rheobase
  const double intercept = mq - slope * mw;  // rheobase · chronaxie
  if (!(slope > 0.0) || !(intercept > 0.0)) throw error("model mismatch");

  SDFit fit;
  fit.model = SDModel::weiss;
  fit.rheobase_vpp = slope;
  fit.chronaxie_ms = intercept / slope;
  fit.n_points = static_cast<int>(points.size());
  fit.rss = weiss_rss(points, fit.rheobase_vpp, fit.chronaxie_ms);
  return fit;
}

SDFit fit_lapicque(const std::vector<SDPoint>& points) {
  check_points(points);

  double min_w = points.front().width_ms, max_w = min_w;
  for (const auto& pt : points) {
    min_w = std::min(min_w, pt.width_ms);
    max_w = std::max(max_w, pt.width_ms);
  }
  double a = 0.1 * min_w, b = 10.0 * max_w;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = lapicque_profile(points, c).second;
  double fd = lapicque_profile(points, d).second;
  while (b - a > 1e-6 * (0.5 * (a + b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = lapicque_profile(points, c).second;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = lapicque_profile(points, d).second;
    }
  }

  const double chronaxie = 0.5 * (a + b);
  const auto [rheobase, rss] = lapicque_profile(points, chronaxie);
  if (!(rheobase > 0.0) || !(chronaxie > 0.0)) throw error("model mismatch");

  SDFit fit;
  fit.model = SDModel::lapicque;
  fit.rheobase_vpp = rheobase;
  fit.chronaxie_ms = chronaxie;
  fit.rss = rss;
  fit.n_points = static_cast<int>(points.size());
  return fit;
}

double predict_threshold(const SDFit& fit, double width_ms) {
  if (!(width_ms > 0.0)) throw error("width_ms must be positive");
  if (fit.model == SDModel::weiss)
    return fit.rheobase_vpp * (1.0 + fit.chronaxie_ms / width_ms);
  return fit.rheobase_vpp / (1.0 - std::exp2(-width_ms / fit.chronaxie_ms));
}

}  // namespace neuromaps::sdfit
