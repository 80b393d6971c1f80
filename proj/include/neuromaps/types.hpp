#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace neuromaps {

using Signal = Eigen::ArrayXd;

// ---- errors ----------------------------------------------------------------

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration; `field` is the dotted path of the offending entry.
struct config_error : error {
  config_error(std::string field_path, const std::string& what)
      : error(field_path + ": " + what), field(std::move(field_path)) {}
  std::string field;
};

// Malformed input file; `line` is the 1-based physical line number.
struct parse_error : error {
  parse_error(std::size_t line_no, const std::string& what)
      : error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
  std::size_t line;
};

struct io_error : error {
  using error::error;
};

struct insufficient_points_error : error {
  using error::error;
};

// ---- stimulation -----------------------------------------------------------

struct StimulusParams {
  double amplitude_vpp = 5.0;
  double pulse_width_ms = 3.33;  // one full bipolar cycle
  double burst_rate_hz = 1.0;
  int n_pulses = 3;
  double start_time_s = 0.5;
};

struct SampledSignal {
  double sample_rate_hz = 0.0;
  double t0_s = 0.0;
  Signal samples;

  double time_at(Eigen::Index i) const { return t0_s + static_cast<double>(i) / sample_rate_hz; }
};

// ---- worm physiology -------------------------------------------------------

enum class Fiber { mgf, lgf };
enum class Direction { head_to_tail, tail_to_head };
enum class SDModel { weiss, lapicque };

struct FiberParams {
  Fiber name = Fiber::mgf;
  double velocity_m_per_s = 32.2;
  Direction direction = Direction::head_to_tail;
  int polarity_sign = +1;
  double rheobase_vpp = 2.0;
  double chronaxie_ms = 3.33;
  double ap_peak_uv = 120.0;  // recorded peak at the stimulation site
  double ap_width_ms = 50.0;  // spike template width (one biphasic cycle)
};

struct SlowWaveParams {
  bool enabled = true;
  double onset_delay_ms = 100.0;
  double velocity_m_per_s = 1.0;
  double decay_per_cm = 0.6;
  double peak_uv = 9000.0;
  double width_ms = 10.0;  // gaussian sigma of the wave bump
};

struct WormModel {
  FiberParams mgf{Fiber::mgf, 32.2, Direction::head_to_tail, +1, 2.0, 3.33, 120.0, 50.0};
  FiberParams lgf{Fiber::lgf, 12.6, Direction::tail_to_head, -1, 2.0 / 3.0, 3.33, 80.0, 50.0};
  double body_length_cm = 10.0;
  double rest_htm_cm = 4.0;
  double rest_ttm_cm = 4.0;
  double contraction_gain_cm = 1.0;  // peak dip per contraction event
  double response_tau_s = 0.3;
  double antiphase_coupling = 1.0;       // in [0, 1]
  double motion_noise_sigma_cm = 0.05;   // tracker-style measurement noise
  double fiber_decay_per_cm = 0.05;      // spike amplitude decay along the body
  int max_spikes_per_pulse = 5;
  SDModel threshold_model = SDModel::weiss;  // law behind the spike staircase
  SlowWaveParams slow_wave;

  const FiberParams& fiber(Fiber f) const { return f == Fiber::mgf ? mgf : lgf; }
};

struct FiberSpikeTrain {
  Fiber fiber = Fiber::mgf;
  std::vector<double> spike_times_s;  // at the stimulation site, strictly increasing
  std::vector<double> amplitudes_uv;  // positive magnitudes, one per spike
};

// Per-pulse spike trains for both fibers, as evoked by one stimulation program.
struct EvokedActivity {
  std::vector<double> pulse_onsets_s;
  std::vector<FiberSpikeTrain> mgf;  // one entry per pulse
  std::vector<FiberSpikeTrain> lgf;
};

// ---- recording array -------------------------------------------------------

struct ArrayGeometry {
  int n_pairs = 4;
  double pair_spacing_cm = 1.0;
  double pitch_cm = 3.0;         // distance between adjacent pair centers
  double stim_to_first_cm = 2.0;  // stimulation site to pair-1 center
};

struct NoiseModel {
  double mains_hz = 60.0;
  double mains_uv = 20.0;
  double gaussian_sigma_uv = 2.0;
  double artifact_coupling = 5e-7;     // fraction of the stimulus reaching the array
  double artifact_decay_per_cm = 0.3;
  std::uint64_t rng_seed = 0;
};

struct RecordingMeta {
  std::string fingerprint;
  std::uint64_t seed = 0;
};

struct MultiChannelRecording {
  double sample_rate_hz = 0.0;
  double t0_s = 0.0;
  Signal stim;                   // volts
  std::vector<Signal> channels;  // microvolts, one per pair
  RecordingMeta meta;

  Eigen::Index n_samples() const { return stim.size(); }
  double time_at(Eigen::Index i) const { return t0_s + static_cast<double>(i) / sample_rate_hz; }
};

// ---- analysis results ------------------------------------------------------

struct SpikeEvent {
  double t_s = 0.0;
  int channel = 0;     // 1-based, matching the recording header
  double peak_uv = 0.0;  // magnitude; sign lives in polarity
  int polarity = +1;
};

struct VelocityEstimate {
  double velocity_m_per_s = 0.0;
  double intercept_s = 0.0;
  double r_squared = 0.0;
  int n_channels_used = 0;
};

struct SDPoint {
  double width_ms = 0.0;
  double threshold_vpp = 0.0;
};

struct SDFit {
  SDModel model = SDModel::weiss;
  double rheobase_vpp = 0.0;
  double chronaxie_ms = 0.0;
  double rss = 0.0;  // residual sum of squares in threshold space
  int n_points = 0;
};

// ---- motion ----------------------------------------------------------------

struct MotionTrace {
  Signal t_s;
  Signal htm_cm;
  std::optional<Signal> ttm_cm;  // tail sometimes out of view in imported data
};

struct TrajectoryFrame {
  double t_s = 0.0;
  std::optional<Eigen::Vector2d> head;
  std::optional<Eigen::Vector2d> mid;
  std::optional<Eigen::Vector2d> tail;
};

enum class ExtremumKind { contraction_min, expansion_max };

struct Extremum {
  double t_s = 0.0;
  ExtremumKind kind = ExtremumKind::contraction_min;
  double value = 0.0;
  double prominence = 0.0;
};

inline const char* to_string(ExtremumKind k) {
  return k == ExtremumKind::contraction_min ? "contraction_min" : "expansion_max";
}

inline const char* to_string(SDModel m) { return m == SDModel::weiss ? "weiss" : "lapicque"; }

inline const char* to_string(Fiber f) { return f == Fiber::mgf ? "MGF" : "LGF"; }

}  // namespace neuromaps
