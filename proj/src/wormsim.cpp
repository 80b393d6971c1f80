#include "neuromaps/wormsim.hpp"

#include "neuromaps/rng.hpp"
#include "neuromaps/stimgen.hpp"

#include <algorithm>
#include <cmath>

namespace neuromaps::wormsim {

double threshold_amplitude(const FiberParams& fiber, double width_ms, SDModel model) {
  if (!(width_ms > 0.0)) throw error("width_ms must be positive");
  if (model == SDModel::weiss)
    return fiber.rheobase_vpp * (1.0 + fiber.chronaxie_ms / width_ms);
  return fiber.rheobase_vpp / (1.0 - std::exp2(-width_ms / fiber.chronaxie_ms));
}

namespace {

FiberSpikeTrain evoke_one(const FiberParams& fiber, const WormModel& m, double onset_s,
                          double amplitude_vpp, double width_ms) {
  FiberSpikeTrain train;
  train.fiber = fiber.name;
  if (amplitude_vpp <= 0.0) return train;

  const double a_th = threshold_amplitude(fiber, width_ms, m.threshold_model);
  const double ratio = amplitude_vpp / a_th;
  const int n = std::min(static_cast<int>(std::floor(ratio)), m.max_spikes_per_pulse);
  if (n < 1) return train;

  const double gain = std::min(ratio, 2.0);
  const double spacing_s = fiber.ap_width_ms / 1000.0;
  for (int j = 0; j < n; ++j) {
    train.spike_times_s.push_back(onset_s + j * spacing_s);
    train.amplitudes_uv.push_back(fiber.ap_peak_uv * gain);
  }
  return train;
}

}  // namespace

EvokedActivity evoke_spikes(const WormModel& m, const StimulusParams& p, std::uint64_t) {
  if (auto violations = stimgen::validate_params(p); !violations.empty()) {
    std::string msg = "invalid stimulus params";
    for (const auto& v : violations) msg += "; " + v;
    throw error(msg);
  }
  EvokedActivity out;
  out.pulse_onsets_s = stimgen::pulse_onsets(p);
  for (double onset : out.pulse_onsets_s) {
    out.mgf.push_back(evoke_one(m.mgf, m, onset, p.amplitude_vpp, p.pulse_width_ms));
    out.lgf.push_back(evoke_one(m.lgf, m, onset, p.amplitude_vpp, p.pulse_width_ms));
  }
  return out;
}

bool contraction_gate(int mgf_spikes, int lgf_spikes) {
  return mgf_spikes >= 2 || lgf_spikes >= 3;
}

MotionTrace kinematic_response(const WormModel& m, const EvokedActivity& evoked,
                               double duration_s, double sample_rate_hz,
                               std::uint64_t seed) {
  if (!(sample_rate_hz > 0.0)) throw error("sample_rate_hz must be positive");
  if (!(duration_s > 0.0)) throw error("duration_s must be positive");

  const auto n = static_cast<Eigen::Index>(std::floor(duration_s * sample_rate_hz)) + 1;
  MotionTrace trace;
  trace.t_s = Signal::LinSpaced(n, 0.0, static_cast<double>(n - 1) / sample_rate_hz);

  std::vector<double> events;
  for (std::size_t k = 0; k < evoked.pulse_onsets_s.size(); ++k) {
    const int mgf_n = static_cast<int>(evoked.mgf[k].spike_times_s.size());
    const int lgf_n = static_cast<int>(evoked.lgf[k].spike_times_s.size());
    if (contraction_gate(mgf_n, lgf_n)) events.push_back(evoked.pulse_onsets_s[k]);
  }

  const double tau = m.response_tau_s;
  Signal dip = Signal::Zero(n);
  for (double t_ev : events) {
    auto i0 = static_cast<Eigen::Index>(std::ceil(t_ev * sample_rate_hz));
    if (i0 < 0) i0 = 0;
    for (Eigen::Index i = i0; i < n; ++i) {
      const double s = trace.t_s[i] - t_ev;
      dip[i] += m.contraction_gain_cm * (s / tau) * std::exp(1.0 - s / tau);
    }
  }

  const double htm_floor = 0.2 * m.rest_htm_cm;
  const double ttm_floor = 0.2 * m.rest_ttm_cm;
  Signal htm = (m.rest_htm_cm - dip).max(htm_floor);
  Signal ttm = (m.rest_ttm_cm + m.antiphase_coupling * (m.rest_htm_cm - htm)).max(ttm_floor);

  if (m.motion_noise_sigma_cm > 0.0) {
    rng::Gaussian gh(rng::derive(seed, 0x68746d));  // "htm"
    rng::Gaussian gt(rng::derive(seed, 0x74746d));  // "ttm"
    for (Eigen::Index i = 0; i < n; ++i) {
      htm[i] += m.motion_noise_sigma_cm * gh();
      ttm[i] += m.motion_noise_sigma_cm * gt();
    }
  }

  trace.htm_cm = std::move(htm);
  trace.ttm_cm = std::move(ttm);
  return trace;
}

}  // namespace neuromaps::wormsim
