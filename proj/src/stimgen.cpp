#include "neuromaps/stimgen.hpp"

#include <cmath>

namespace neuromaps::stimgen {

std::vector<std::string> validate_params(const StimulusParams& p) {
  std::vector<std::string> v;
  if (!(p.amplitude_vpp >= 0.0) || !std::isfinite(p.amplitude_vpp))
    v.push_back("amplitude_vpp must be non-negative");
  if (!(p.pulse_width_ms > 0.0) || !std::isfinite(p.pulse_width_ms))
    v.push_back("pulse_width_ms must be positive");
  if (!(p.burst_rate_hz > 0.0) || !std::isfinite(p.burst_rate_hz))
    v.push_back("burst_rate_hz must be positive");
  if (p.n_pulses < 1) v.push_back("n_pulses must be at least 1");
  if (!std::isfinite(p.start_time_s) || p.start_time_s < 0.0)
    v.push_back("start_time_s must be non-negative");
  if (p.pulse_width_ms > 0.0 && p.burst_rate_hz > 0.0 &&
      !(p.pulse_width_ms / 1000.0 < 1.0 / p.burst_rate_hz))
    v.push_back("pulses overlap: pulse_width_ms/1000 must be < 1/burst_rate_hz");
  return v;
}

std::vector<double> pulse_onsets(const StimulusParams& p) {
  std::vector<double> t(static_cast<std::size_t>(p.n_pulses));
  for (int k = 0; k < p.n_pulses; ++k)
    t[static_cast<std::size_t>(k)] = p.start_time_s + k / p.burst_rate_hz;
  return t;
}

SampledSignal generate_waveform(const StimulusParams& p, double sample_rate_hz,
                                double duration_s) {
  if (auto violations = validate_params(p); !violations.empty()) {
    std::string msg = "invalid stimulus params";
    for (const auto& v : violations) msg += "; " + v;
    throw error(msg);
  }
  if (!(sample_rate_hz > 0.0)) throw error("sample_rate_hz must be positive");

  const double w_s = p.pulse_width_ms / 1000.0;
  const auto onsets = pulse_onsets(p);
  const double last_end = onsets.back() + w_s;
  if (duration_s < last_end)
    throw error("duration " + std::to_string(duration_s) + " s does not cover pulse " +
                std::to_string(p.n_pulses - 1) + " ending at " + std::to_string(last_end) + " s");

  const auto n = static_cast<Eigen::Index>(std::floor(duration_s * sample_rate_hz)) + 1;
  SampledSignal out;
  out.sample_rate_hz = sample_rate_hz;
  out.t0_s = 0.0;
  out.samples = Signal::Zero(n);

  const double peak = p.amplitude_vpp / 2.0;
  for (double t_k : onsets) {
    auto i0 = static_cast<Eigen::Index>(std::ceil(t_k * sample_rate_hz));
    if (i0 < 0) i0 = 0;
    for (Eigen::Index i = i0; i < n; ++i) {
      const double s = i / sample_rate_hz - t_k;
      if (s >= w_s) break;
      out.samples[i] = peak * std::sin(2.0 * M_PI * s / w_s);
    }
  }
  return out;
}

double pulse_charge(const StimulusParams& p) {
  if (auto violations = validate_params(p); !violations.empty()) {
    std::string msg = "invalid stimulus params";
    for (const auto& v : violations) msg += "; " + v;
    throw error(msg);
  }
  const double w_s = p.pulse_width_ms / 1000.0;
  return (p.amplitude_vpp / 2.0) * (2.0 * w_s / M_PI);
}

}  // namespace neuromaps::stimgen
