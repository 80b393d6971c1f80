#pragma once

#include "neuromaps/dsp.hpp"
#include "neuromaps/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace neuromaps::config {

enum class SweepGate { motion, spikes };

std::string to_string(SweepGate g);

struct DspConfig {
  dsp::FilterSpec lowpass;
  dsp::FilterSpec notch;
  double k_mad = 5.0;
  double refractory_ms = 40.0;
  double edge_guard_s = 0.25;
  double min_prominence_cm = 0.4;  // 10% of the default rest length

  DspConfig();
  dsp::DetectParams detect_params() const;
};

struct SimConfig {
  double sample_rate_hz = 10000.0;
  double motion_rate_hz = 200.0;
  std::optional<double> duration_s;
};

struct GridConfig {
  std::vector<double> widths_ms;
  std::vector<double> amplitudes_vpp;
};

struct SdConfig {
  std::vector<double> widths_ms = {2.0, 2.5, 2.86, 3.33, 4.0, 5.0, 6.67};
  double bracket_lo_vpp = 0.5;
  double bracket_hi_vpp = 8.0;
  double tol_vpp = 0.05;
  double margin = 0.05;
  SweepGate gate = SweepGate::motion;
};

struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::string output_dir = "out";
  WormModel worm;
  ArrayGeometry geometry;
  NoiseModel noise;
  DspConfig dsp;
  SimConfig sim;
  StimulusParams stimulus;
  std::optional<GridConfig> grid;
  SdConfig sd;
};

RunConfig defaults();

RunConfig from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

RunConfig load_file(const std::string& path);

std::vector<std::string> validate(const RunConfig& c);
void validate_or_throw(const RunConfig& c);

bool is_noisy(const RunConfig& c);

std::uint64_t resolve_seed(const RunConfig& c, std::optional<std::uint64_t> cli_seed);

std::string fingerprint(const RunConfig& c);

}  // namespace neuromaps::config
