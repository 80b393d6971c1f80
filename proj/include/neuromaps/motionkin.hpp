#pragma once

#include "neuromaps/types.hpp"

namespace neuromaps::motionkin {

struct LengthsResult {
  MotionTrace trace;
  std::vector<std::size_t> rejected_frames;  // indices lacking a head or mid point
};

// HtM/TtM Euclidean lengths per frame. TtM is emitted only when every kept
// frame carries a tail point.
LengthsResult vector_lengths(const std::vector<TrajectoryFrame>& frames);

// Local extrema of x(t) with prominence >= min_prominence, sorted by time.
// Minima are contraction events, maxima expansion events.
std::vector<Extremum> find_extrema(const Signal& t_s, const Signal& x, double min_prominence);
std::vector<Extremum> find_extrema(const MotionTrace& trace, double min_prominence);

// Pearson r of HtM vs TtM at lag 0, clamped to [-1, 1].
double htm_ttm_correlation(const MotionTrace& trace);

struct PeristimulusAverage {
  Signal offsets_s;  // relative to stimulus onset
  Signal mean;
  int n_segments = 0;
};

// Mean of trace segments aligned to each stimulus over [0, window_s]; segments
// truncated by the trace end are excluded. Assumes uniform sampling.
PeristimulusAverage peristimulus_average(const Signal& t_s, const Signal& x,
                                         const std::vector<double>& stim_times_s,
                                         double window_s);

}  // namespace neuromaps::motionkin
