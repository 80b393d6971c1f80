#include "neuromaps/arraysim.hpp"

#include "neuromaps/rng.hpp"
#include "neuromaps/stimgen.hpp"

#include <cmath>

namespace neuromaps::arraysim {

std::vector<std::string> validate_geometry(const ArrayGeometry& g) {
  std::vector<std::string> v;
  if (g.n_pairs < 2) v.push_back("n_pairs must be at least 2");
  if (!(g.pair_spacing_cm > 0.0)) v.push_back("pair_spacing_cm must be positive");
  if (!(g.pitch_cm > 0.0)) v.push_back("pitch_cm must be positive");
  if (!(g.stim_to_first_cm > 0.0)) v.push_back("stim_to_first_cm must be positive");
  return v;
}

std::vector<double> channel_positions(const ArrayGeometry& g) {
  if (auto violations = validate_geometry(g); !violations.empty()) {
    std::string msg = "invalid geometry";
    for (const auto& v : violations) msg += "; " + v;
    throw error(msg);
  }
  std::vector<double> d(static_cast<std::size_t>(g.n_pairs));
  for (int i = 0; i < g.n_pairs; ++i)
    d[static_cast<std::size_t>(i)] = g.stim_to_first_cm + i * g.pitch_cm;
  return d;
}

namespace {

constexpr double kSlowWaveCut = 5.0;  // render the gaussian bump out to ±5σ

// Biphasic spike template: one sine cycle of width w with the recovery lobe
// scaled to 0.4 of the depolarization lobe, so the leading lobe (and hence the
// fiber's polarity sign) always dominates detection.
double ap_template(double s, double w) {
  if (s < 0.0 || s >= w) return 0.0;
  const double v = std::sin(2.0 * M_PI * s / w);
  return s < w / 2.0 ? v : 0.4 * v;
}

struct ClipCheck {
  double last_end_s = 0.0;
  std::string what;

  void cover(double end_s, const std::string& desc) {
    if (end_s > last_end_s) {
      last_end_s = end_s;
      what = desc;
    }
  }
};

}  // namespace

MultiChannelRecording synthesize_recording(const WormModel& m, const EvokedActivity& evoked,
                                           const StimulusParams& p, const ArrayGeometry& g,
                                           const NoiseModel& noise, double duration_s,
                                           double sample_rate_hz) {
  const auto positions = channel_positions(g);
  const double fs = sample_rate_hz;

  MultiChannelRecording rec;
  rec.sample_rate_hz = fs;
  rec.t0_s = 0.0;
  rec.stim = stimgen::generate_waveform(p, fs, duration_s).samples;
  const Eigen::Index n = rec.stim.size();
  rec.channels.assign(static_cast<std::size_t>(g.n_pairs), Signal::Zero(n));

  // Nothing physiological may extend past the record.
  ClipCheck clip;
  const double sw_sigma_s = m.slow_wave.width_ms / 1000.0;
  for (std::size_t ci = 0; ci < positions.size(); ++ci) {
    const double d = positions[ci];
    const bool is_lgf_channel = ci + 1 == positions.size();
    const FiberParams& fiber = is_lgf_channel ? m.lgf : m.mgf;
    const double travel_cm = is_lgf_channel ? std::abs(d - m.body_length_cm) : d;
    const auto& trains = is_lgf_channel ? evoked.lgf : evoked.mgf;
    for (const auto& train : trains)
      for (double ts : train.spike_times_s)
        clip.cover(ts + travel_cm / (100.0 * fiber.velocity_m_per_s) + fiber.ap_width_ms / 1000.0,
                   std::string(to_string(fiber.name)) + " spike on channel " +
                       std::to_string(ci + 1));
    if (m.slow_wave.enabled && p.amplitude_vpp > 0.0)
      for (double onset : evoked.pulse_onsets_s)
        clip.cover(onset + m.slow_wave.onset_delay_ms / 1000.0 +
                       d / (100.0 * m.slow_wave.velocity_m_per_s) + kSlowWaveCut * sw_sigma_s,
                   "slow wave on channel " + std::to_string(ci + 1));
  }
  if (clip.last_end_s > duration_s)
    throw error("duration " + std::to_string(duration_s) + " s clips " + clip.what +
                " ending at " + std::to_string(clip.last_end_s) + " s");

  for (std::size_t ci = 0; ci < positions.size(); ++ci) {
    Signal& ch = rec.channels[ci];
    const double d = positions[ci];
    const bool is_lgf_channel = ci + 1 == positions.size();
    const FiberParams& fiber = is_lgf_channel ? m.lgf : m.mgf;
    const double travel_cm = is_lgf_channel ? std::abs(d - m.body_length_cm) : d;
    const double fiber_decay = std::pow(1.0 - m.fiber_decay_per_cm, travel_cm);
    const double w_ap = fiber.ap_width_ms / 1000.0;

    const auto& trains = is_lgf_channel ? evoked.lgf : evoked.mgf;
    for (const auto& train : trains) {
      for (std::size_t si = 0; si < train.spike_times_s.size(); ++si) {
        const double arrival = train.spike_times_s[si] + travel_cm / (100.0 * fiber.velocity_m_per_s);
        const double amp = fiber.polarity_sign * train.amplitudes_uv[si] * fiber_decay;
        auto i0 = static_cast<Eigen::Index>(std::ceil(arrival * fs));
        if (i0 < 0) i0 = 0;
        for (Eigen::Index i = i0; i < n; ++i) {
          const double s = i / fs - arrival;
          if (s >= w_ap) break;
          ch[i] += amp * ap_template(s, w_ap);
        }
      }
    }

    if (m.slow_wave.enabled && p.amplitude_vpp > 0.0) {
      const double sw_amp = m.slow_wave.peak_uv * std::pow(1.0 - m.slow_wave.decay_per_cm, d);
      for (double onset : evoked.pulse_onsets_s) {
        const double arrival = onset + m.slow_wave.onset_delay_ms / 1000.0 +
                               d / (100.0 * m.slow_wave.velocity_m_per_s);
        auto i0 = static_cast<Eigen::Index>(std::ceil((arrival - kSlowWaveCut * sw_sigma_s) * fs));
        auto i1 = static_cast<Eigen::Index>(std::floor((arrival + kSlowWaveCut * sw_sigma_s) * fs));
        i0 = std::max<Eigen::Index>(i0, 0);
        i1 = std::min(i1, n - 1);
        for (Eigen::Index i = i0; i <= i1; ++i) {
          const double z = (i / fs - arrival) / sw_sigma_s;
          ch[i] += sw_amp * std::exp(-0.5 * z * z);
        }
      }
    }

    if (noise.artifact_coupling > 0.0) {
      const double k = noise.artifact_coupling * std::pow(1.0 - noise.artifact_decay_per_cm, d);
      ch += k * 1e6 * rec.stim;  // stimulus is in volts, channels in microvolts
    }

    if (noise.mains_uv > 0.0)
      for (Eigen::Index i = 0; i < n; ++i)
        ch[i] += noise.mains_uv * std::sin(2.0 * M_PI * noise.mains_hz * (i / fs));

    if (noise.gaussian_sigma_uv > 0.0) {
      rng::Gaussian gauss(rng::derive(noise.rng_seed, 0xC4A221 + ci));
      for (Eigen::Index i = 0; i < n; ++i) ch[i] += noise.gaussian_sigma_uv * gauss();
    }
  }

  return rec;
}

}  // namespace neuromaps::arraysim
