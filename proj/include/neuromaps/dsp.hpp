#pragma once

#include "neuromaps/types.hpp"

namespace neuromaps::dsp {

struct FilterSpec {
  enum class Kind { lowpass, notch };
  Kind kind = Kind::lowpass;
  double cutoff_hz = 50.0;   // lowpass
  double center_hz = 60.0;   // notch
  double q_factor = 30.0;    // notch
  int order = 4;             // lowpass; even, >= 2
  bool zero_phase = true;
};

struct Biquad {
  double b0, b1, b2, a1, a2;  // normalized (a0 = 1)
};

// Butterworth-response cascade (RBJ biquads, one per pole pair).
std::vector<Biquad> design_lowpass(double cutoff_hz, int order, double sample_rate_hz);
Biquad design_notch(double center_hz, double q_factor, double sample_rate_hz);

// Runs the cascade over the signal; zero_phase applies it forward-backward with
// odd-reflection padding and steady-state initial conditions.
Signal apply_cascade(const std::vector<Biquad>& sections, const Signal& x, bool zero_phase);

Signal lowpass(const Signal& x, const FilterSpec& spec, double sample_rate_hz);
Signal notch(const Signal& x, const FilterSpec& spec, double sample_rate_hz);

struct DetectParams {
  double k_mad = 5.0;
  double refractory_ms = 5.0;
  double edge_guard_s = 0.0;  // drop extrema this close to the record edges
};

// Threshold = k_mad · MAD/0.6745 (MAD-estimated sigma) about the channel
// median; events are strict local extrema beyond the threshold, with events
// closer than the refractory merged keeping the larger |peak|.
std::vector<SpikeEvent> detect_spikes(const Signal& x, double sample_rate_hz, double t0_s,
                                      int channel, const DetectParams& params);

// latency_s[pulse][channel-1]: first event in (t_pulse, t_pulse + period), if any.
using LatencyTable = std::vector<std::vector<std::optional<double>>>;
LatencyTable event_latencies(const std::vector<SpikeEvent>& events,
                             const std::vector<double>& stim_times_s, double period_s,
                             int n_channels);

// Least-squares line latency = intercept + distance/velocity over the channels
// that have a latency. Throws "insufficient channels" (< 2 usable) or
// "non-finite velocity" (slope <= 0).
VelocityEstimate estimate_velocity(const std::vector<std::optional<double>>& latencies_s,
                                   const std::vector<double>& positions_cm);

}  // namespace neuromaps::dsp
