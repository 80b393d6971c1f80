#pragma once

#include "neuromaps/config.hpp"
#include "neuromaps/dsp.hpp"
#include "neuromaps/looper.hpp"
#include "neuromaps/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace neuromaps::pipeline {

// Record length when sim.duration_s is unset: one second past the last pulse onset.
double auto_duration(const StimulusParams& p);
double duration_for(const config::RunConfig& c);

struct SimulationResult {
  std::uint64_t seed = 0;
  std::string fingerprint;
  double duration_s = 0.0;
  EvokedActivity evoked;
  MultiChannelRecording recording;  // raw synthesis
  std::vector<Signal> filtered;     // notch then lowpass, per channel
  std::vector<SpikeEvent> events;   // all channels, sorted by (t, channel)
  dsp::LatencyTable latencies;      // [pulse][channel-1]
  std::optional<VelocityEstimate> velocity;
  std::string velocity_error;
  MotionTrace motion;
  std::vector<TrajectoryFrame> trajectory;
  std::vector<Extremum> extrema;  // HtM, above the configured prominence
  std::optional<double> htm_ttm_r;
  nlohmann::json summary;
};

// stimgen -> wormsim -> arraysim -> dsp -> motionkin, all under one seed.
SimulationResult run_simulation(const config::RunConfig& c, std::uint64_t seed);

// Velocity fit over per-channel median first latencies.
std::vector<std::optional<double>> median_latencies(const dsp::LatencyTable& latencies,
                                                    int n_channels);

// Full-pipeline responder: synthesis, filtering and detection run every trial;
// `responded` follows the configured gate (motion extrema, or any detected
// event for the spikes gate). sim.duration_s is ignored so trial stimuli of
// any shape fit the record.
looper::Responder make_full_responder(const config::RunConfig& c);

// Direct-model responder: wormsim only (spike staircase + kinematics), no
// recording; the spikes gate then counts evoked spikes.
looper::Responder make_direct_responder(const config::RunConfig& c);

// First sample of each run of nonzero stimulus, for records without metadata;
// the onset is placed one sample before the first nonzero value.
std::vector<double> pulse_onsets_from_stim(const Signal& stim, double sample_rate_hz,
                                           double t0_s);

}  // namespace neuromaps::pipeline
