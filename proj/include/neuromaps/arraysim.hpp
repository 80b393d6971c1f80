#pragma once

#include "neuromaps/types.hpp"

namespace neuromaps::arraysim {

std::vector<std::string> validate_geometry(const ArrayGeometry& g);

// Distance of each pair center from the stimulation site:
// d_i = stim_to_first_cm + (i−1)·pitch_cm. Throws on invalid geometry.
std::vector<double> channel_positions(const ArrayGeometry& g);

// Full synthesis: fiber spike templates with conduction delay and distance
// decay, per-pulse slow wave, stimulation-artifact coupling, mains tone and
// Gaussian noise. MGF drives all pairs but the last; LGF drives the last pair
// with inverted polarity. MGF propagates from the stimulation site, LGF from
// the tail (body_length_cm).
MultiChannelRecording synthesize_recording(const WormModel& m, const EvokedActivity& evoked,
                                           const StimulusParams& p, const ArrayGeometry& g,
                                           const NoiseModel& noise, double duration_s,
                                           double sample_rate_hz);

}  // namespace neuromaps::arraysim
