#pragma once

#include "neuromaps/types.hpp"

namespace neuromaps::stimgen {

// Returns every violated invariant as a human-readable message; empty means ok.
// amplitude_vpp 0 is allowed (degenerate all-zero program); see generate_waveform.
std::vector<std::string> validate_params(const StimulusParams& p);

std::vector<double> pulse_onsets(const StimulusParams& p);

// One full sinusoid cycle per pulse: v(t) = (A/2)·sin(2π(t−t_k)/W) on [t_k, t_k+W),
// exactly zero elsewhere. Throws if params are invalid or duration_s does not
// cover every pulse.
SampledSignal generate_waveform(const StimulusParams& p, double sample_rate_hz,
                                double duration_s);

// Rectified area of one pulse, (A/2)·(2W/π) volt-seconds; the charge proxy used
// by the minimal-charge optimizer.
double pulse_charge(const StimulusParams& p);

}  // namespace neuromaps::stimgen
