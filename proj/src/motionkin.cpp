#include "neuromaps/motionkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace neuromaps::motionkin {

LengthsResult vector_lengths(const std::vector<TrajectoryFrame>& frames) {
  LengthsResult out;
  std::vector<double> t, htm, ttm;
  bool all_tails = true;
  double prev_t = -std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (!f.head || !f.mid) {
      out.rejected_frames.push_back(i);
      continue;
    }
    if (!(f.t_s > prev_t)) throw error("frame times must be strictly increasing");
    prev_t = f.t_s;
    t.push_back(f.t_s);
    htm.push_back((*f.head - *f.mid).norm());
    if (f.tail)
      ttm.push_back((*f.tail - *f.mid).norm());
    else
      all_tails = false;
  }

  const auto n = static_cast<Eigen::Index>(t.size());
  out.trace.t_s = Eigen::Map<const Signal>(t.data(), n);
  out.trace.htm_cm = Eigen::Map<const Signal>(htm.data(), n);
  if (all_tails && n > 0)
    out.trace.ttm_cm = Eigen::Map<const Signal>(ttm.data(), n);
  return out;
}

namespace {

// Prominence of a strict local extremum: distance to the highest base on
// either side, where a base is the extreme value between the candidate and the
// nearest point that tops it (or the trace edge).
double prominence_at(const Signal& x, Eigen::Index i, bool is_max) {
  const Eigen::Index n = x.size();
  const double sign = is_max ? 1.0 : -1.0;
  const double peak = sign * x[i];

  double left_base = peak, right_base = peak;
  for (Eigen::Index j = i - 1; j >= 0; --j) {
    const double v = sign * x[j];
    if (v > peak) break;
    left_base = std::min(left_base, v);
  }
  for (Eigen::Index j = i + 1; j < n; ++j) {
    const double v = sign * x[j];
    if (v > peak) break;
    right_base = std::min(right_base, v);
  }
  return peak - std::max(left_base, right_base);
}

}  // namespace

std::vector<Extremum> find_extrema(const Signal& t_s, const Signal& x, double min_prominence) {
  if (!(min_prominence > 0.0)) throw error("min_prominence must be positive");
  if (t_s.size() != x.size()) throw error("time and value series must align");

  std::vector<Extremum> out;
  for (Eigen::Index i = 1; i + 1 < x.size(); ++i) {
    const bool is_max = x[i] > x[i - 1] && x[i] > x[i + 1];
    const bool is_min = x[i] < x[i - 1] && x[i] < x[i + 1];
    if (!is_max && !is_min) continue;
    const double prom = prominence_at(x, i, is_max);
    if (prom < min_prominence) continue;
    out.push_back({t_s[i],
                   is_max ? ExtremumKind::expansion_max : ExtremumKind::contraction_min, x[i],
                   prom});
  }
  return out;
}

std::vector<Extremum> find_extrema(const MotionTrace& trace, double min_prominence) {
  return find_extrema(trace.t_s, trace.htm_cm, min_prominence);
}

double htm_ttm_correlation(const MotionTrace& trace) {
  if (!trace.ttm_cm) throw error("trace has no TtM series");
  const Signal& a = trace.htm_cm;
  const Signal& b = *trace.ttm_cm;
  if (a.size() != b.size()) throw error("HtM and TtM series must align");
  if (a.size() < 10) throw error("need at least 10 samples");

  const Signal da = a - a.mean();
  const Signal db = b - b.mean();
  const double va = (da * da).sum();
  const double vb = (db * db).sum();
  if (va == 0.0 || vb == 0.0) throw error("zero variance");
  return std::clamp((da * db).sum() / std::sqrt(va * vb), -1.0, 1.0);
}

PeristimulusAverage peristimulus_average(const Signal& t_s, const Signal& x,
                                         const std::vector<double>& stim_times_s,
                                         double window_s) {
  if (t_s.size() != x.size()) throw error("time and value series must align");
  if (t_s.size() < 2) throw error("trace too short");
  if (!(window_s > 0.0)) throw error("window_s must be positive");

  const double dt = (t_s[t_s.size() - 1] - t_s[0]) / static_cast<double>(t_s.size() - 1);
  const auto win = static_cast<Eigen::Index>(std::floor(window_s / dt)) + 1;

  PeristimulusAverage out;
  out.mean = Signal::Zero(win);
  for (double s : stim_times_s) {
    if (s < t_s[0]) continue;
    Eigen::Index i0 = 0;
    while (i0 < t_s.size() && t_s[i0] < s) ++i0;
    if (i0 + win > t_s.size()) continue;  // truncated at trace end
    out.mean += x.segment(i0, win);
    ++out.n_segments;
  }
  if (out.n_segments == 0) throw error("no usable segment");
  out.mean /= static_cast<double>(out.n_segments);
  out.offsets_s = Signal::LinSpaced(win, 0.0, static_cast<double>(win - 1) * dt);
  return out;
}

}  // namespace neuromaps::motionkin
