#pragma once

#include "neuromaps/types.hpp"

#include <cstdint>

namespace neuromaps::wormsim {

// Strength-duration threshold for one fiber.
//   weiss:    A_th = rheobase · (1 + chronaxie/width)
//   lapicque: A_th = rheobase / (1 − 2^(−width/chronaxie))
double threshold_amplitude(const FiberParams& fiber, double width_ms, SDModel model);

// Integer spike staircase per pulse: n = min(floor(A/A_th), max_spikes_per_pulse),
// spikes spaced ap_width_ms apart from the pulse onset, per-spike amplitude
// ap_peak_uv · min(A/A_th, 2). Deterministic given seed.
EvokedActivity evoke_spikes(const WormModel& m, const StimulusParams& p, std::uint64_t seed);

// Escape-contraction rule for one pulse: at least two MGF spikes or at least
// three LGF spikes trigger a rapid shortening.
bool contraction_gate(int mgf_spikes, int lgf_spikes);

// HtM/TtM kinematics: per gated pulse, a critically damped dip
// (s/τ)·e^(1−s/τ) of peak contraction_gain_cm is subtracted from HtM;
// TtM mirrors the (clamped) HtM through antiphase_coupling; both lengths are
// clamped at 0.2·rest; measurement noise is added last.
MotionTrace kinematic_response(const WormModel& m, const EvokedActivity& evoked,
                               double duration_s, double sample_rate_hz,
                               std::uint64_t seed);

}  // namespace neuromaps::wormsim
