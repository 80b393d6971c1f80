#include "neuromaps/pipeline.hpp"

#include "neuromaps/arraysim.hpp"
#include "neuromaps/motionkin.hpp"
#include "neuromaps/stimgen.hpp"
#include "neuromaps/wormsim.hpp"

#include <algorithm>
#include <cmath>

namespace neuromaps::pipeline {

namespace {

using nlohmann::json;

int max_spikes_per_pulse(const std::vector<FiberSpikeTrain>& trains) {
  std::size_t n = 0;
  for (const auto& t : trains) n = std::max(n, t.spike_times_s.size());
  return static_cast<int>(n);
}

int count_contractions(const std::vector<Extremum>& extrema) {
  return static_cast<int>(std::count_if(extrema.begin(), extrema.end(), [](const Extremum& e) {
    return e.kind == ExtremumKind::contraction_min;
  }));
}

json summary_json(const config::RunConfig& c, const SimulationResult& r) {
  json s;
  s["fingerprint"] = r.fingerprint;
  s["seed"] = r.seed;
  s["duration_s"] = r.duration_s;
  s["stimulus"] = json{{"amplitude_vpp", c.stimulus.amplitude_vpp},
                       {"pulse_width_ms", c.stimulus.pulse_width_ms},
                       {"burst_rate_hz", c.stimulus.burst_rate_hz},
                       {"n_pulses", c.stimulus.n_pulses},
                       {"start_time_s", c.stimulus.start_time_s}};
  s["pulses_s"] = r.evoked.pulse_onsets_s;

  json evoked;
  std::vector<int> mgf, lgf;
  std::vector<bool> gate;
  for (std::size_t k = 0; k < r.evoked.pulse_onsets_s.size(); ++k) {
    mgf.push_back(static_cast<int>(r.evoked.mgf[k].spike_times_s.size()));
    lgf.push_back(static_cast<int>(r.evoked.lgf[k].spike_times_s.size()));
    gate.push_back(wormsim::contraction_gate(mgf.back(), lgf.back()));
  }
  evoked["mgf_spikes_per_pulse"] = mgf;
  evoked["lgf_spikes_per_pulse"] = lgf;
  evoked["contraction_per_pulse"] = gate;
  s["evoked"] = evoked;

  const auto positions = arraysim::channel_positions(c.geometry);
  const auto med = median_latencies(r.latencies, c.geometry.n_pairs);
  json channels = json::array();
  for (int ch = 1; ch <= c.geometry.n_pairs; ++ch) {
    json jc;
    jc["channel"] = ch;
    jc["position_cm"] = positions[static_cast<std::size_t>(ch - 1)];
    int n_events = 0;
    double max_peak = 0.0;
    for (const auto& e : r.events)
      if (e.channel == ch) {
        ++n_events;
        max_peak = std::max(max_peak, e.peak_uv);
      }
    jc["n_events"] = n_events;
    jc["max_peak_uv"] = n_events > 0 ? json(max_peak) : json(nullptr);
    json per_pulse = json::array();
    for (const auto& pulse : r.latencies) {
      const auto& lat = pulse[static_cast<std::size_t>(ch - 1)];
      per_pulse.push_back(lat ? json(*lat * 1e3) : json(nullptr));
    }
    jc["first_latency_ms"] = per_pulse;
    const auto& m = med[static_cast<std::size_t>(ch - 1)];
    jc["median_first_latency_ms"] = m ? json(*m * 1e3) : json(nullptr);
    channels.push_back(jc);
  }
  s["channels"] = channels;

  if (r.velocity)
    s["velocity"] = json{{"velocity_m_per_s", r.velocity->velocity_m_per_s},
                         {"intercept_ms", r.velocity->intercept_s * 1e3},
                         {"r_squared", r.velocity->r_squared},
                         {"n_channels_used", r.velocity->n_channels_used}};
  else
    s["velocity"] = json{{"error", r.velocity_error}};

  json extrema = json::array();
  for (const auto& e : r.extrema)
    extrema.push_back(json{{"t_s", e.t_s},
                           {"kind", to_string(e.kind)},
                           {"value_cm", e.value},
                           {"prominence_cm", e.prominence}});
  s["motion"] = json{{"min_htm_cm", r.motion.htm_cm.minCoeff()},
                     {"n_contraction_minima", count_contractions(r.extrema)},
                     {"n_extrema", static_cast<int>(r.extrema.size())},
                     {"htm_ttm_r", r.htm_ttm_r ? json(*r.htm_ttm_r) : json(nullptr)},
                     {"extrema", extrema}};
  return s;
}

}  // namespace

double auto_duration(const StimulusParams& p) {
  const int n = std::max(p.n_pulses, 1);
  return p.start_time_s + static_cast<double>(n - 1) / p.burst_rate_hz + 1.0;
}

double duration_for(const config::RunConfig& c) {
  return c.sim.duration_s ? *c.sim.duration_s : auto_duration(c.stimulus);
}

std::vector<std::optional<double>> median_latencies(const dsp::LatencyTable& latencies,
                                                    int n_channels) {
  std::vector<std::optional<double>> out(static_cast<std::size_t>(n_channels));
  for (int ch = 0; ch < n_channels; ++ch) {
    std::vector<double> vals;
    for (const auto& pulse : latencies)
      if (pulse[static_cast<std::size_t>(ch)]) vals.push_back(*pulse[static_cast<std::size_t>(ch)]);
    if (vals.empty()) continue;
    std::sort(vals.begin(), vals.end());
    const std::size_t n = vals.size();
    out[static_cast<std::size_t>(ch)] =
        n % 2 == 1 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
  }
  return out;
}

SimulationResult run_simulation(const config::RunConfig& c, std::uint64_t seed) {
  config::validate_or_throw(c);

  SimulationResult r;
  r.seed = seed;
  config::RunConfig effective = c;
  effective.seed = seed;
  r.fingerprint = config::fingerprint(effective);
  r.duration_s = duration_for(c);

  r.evoked = wormsim::evoke_spikes(c.worm, c.stimulus, seed);

  NoiseModel noise = c.noise;
  noise.rng_seed = seed;
  r.recording = arraysim::synthesize_recording(c.worm, r.evoked, c.stimulus, c.geometry, noise,
                                               r.duration_s, c.sim.sample_rate_hz);
  r.recording.meta = {r.fingerprint, seed};

  const double fs = c.sim.sample_rate_hz;
  r.filtered.reserve(r.recording.channels.size());
  for (const auto& ch : r.recording.channels) {
    Signal y = dsp::notch(ch, c.dsp.notch, fs);
    r.filtered.push_back(dsp::lowpass(y, c.dsp.lowpass, fs));
  }

  const auto dp = c.dsp.detect_params();
  for (std::size_t ci = 0; ci < r.filtered.size(); ++ci) {
    const auto ev =
        dsp::detect_spikes(r.filtered[ci], fs, r.recording.t0_s, static_cast<int>(ci) + 1, dp);
    r.events.insert(r.events.end(), ev.begin(), ev.end());
  }
  std::sort(r.events.begin(), r.events.end(), [](const SpikeEvent& a, const SpikeEvent& b) {
    return a.t_s != b.t_s ? a.t_s < b.t_s : a.channel < b.channel;
  });

  r.latencies = dsp::event_latencies(r.events, r.evoked.pulse_onsets_s,
                                     1.0 / c.stimulus.burst_rate_hz, c.geometry.n_pairs);
  try {
    r.velocity =
        dsp::estimate_velocity(median_latencies(r.latencies, c.geometry.n_pairs),
                               arraysim::channel_positions(c.geometry));
  } catch (const std::exception& e) {
    r.velocity_error = e.what();
  }

  r.motion = wormsim::kinematic_response(c.worm, r.evoked, r.duration_s, c.sim.motion_rate_hz, seed);
  r.trajectory.reserve(static_cast<std::size_t>(r.motion.t_s.size()));
  for (Eigen::Index i = 0; i < r.motion.t_s.size(); ++i) {
    TrajectoryFrame f;
    f.t_s = r.motion.t_s[i];
    f.head = Eigen::Vector2d(-r.motion.htm_cm[i], 0.0);
    f.mid = Eigen::Vector2d(0.0, 0.0);
    f.tail = Eigen::Vector2d((*r.motion.ttm_cm)[i], 0.0);
    r.trajectory.push_back(f);
  }
  r.extrema = motionkin::find_extrema(r.motion, c.dsp.min_prominence_cm);
  try {
    r.htm_ttm_r = motionkin::htm_ttm_correlation(r.motion);
  } catch (const std::exception&) {
    // constant series (e.g. amplitude 0, noise 0): correlation undefined
  }

  r.summary = summary_json(c, r);
  return r;
}

looper::Responder make_full_responder(const config::RunConfig& c) {
  config::RunConfig base = c;
  base.sim.duration_s.reset();
  return [base](const StimulusParams& p, std::uint64_t seed) {
    config::RunConfig cfg = base;
    cfg.stimulus = p;
    const SimulationResult r = run_simulation(cfg, seed);
    looper::Outcome o;
    o.mgf_spikes = max_spikes_per_pulse(r.evoked.mgf);
    o.lgf_spikes = max_spikes_per_pulse(r.evoked.lgf);
    o.n_contractions = count_contractions(r.extrema);
    o.min_htm_cm = r.motion.htm_cm.minCoeff();
    o.events_per_channel.assign(static_cast<std::size_t>(base.geometry.n_pairs), 0);
    o.peak_uv_per_channel.assign(static_cast<std::size_t>(base.geometry.n_pairs), 0.0);
    for (const auto& e : r.events) {
      auto ci = static_cast<std::size_t>(e.channel - 1);
      ++o.events_per_channel[ci];
      o.peak_uv_per_channel[ci] = std::max(o.peak_uv_per_channel[ci], e.peak_uv);
    }
    o.responded = base.sd.gate == config::SweepGate::motion ? o.n_contractions >= 1
                                                            : !r.events.empty();
    return o;
  };
}

looper::Responder make_direct_responder(const config::RunConfig& c) {
  config::RunConfig base = c;
  base.sim.duration_s.reset();
  return [base](const StimulusParams& p, std::uint64_t seed) {
    const EvokedActivity evoked = wormsim::evoke_spikes(base.worm, p, seed);
    const MotionTrace motion = wormsim::kinematic_response(base.worm, evoked, auto_duration(p),
                                                           base.sim.motion_rate_hz, seed);
    looper::Outcome o;
    o.mgf_spikes = max_spikes_per_pulse(evoked.mgf);
    o.lgf_spikes = max_spikes_per_pulse(evoked.lgf);
    o.n_contractions =
        count_contractions(motionkin::find_extrema(motion, base.dsp.min_prominence_cm));
    o.min_htm_cm = motion.htm_cm.minCoeff();
    o.responded = base.sd.gate == config::SweepGate::motion
                      ? o.n_contractions >= 1
                      : o.mgf_spikes > 0 || o.lgf_spikes > 0;
    return o;
  };
}

std::vector<double> pulse_onsets_from_stim(const Signal& stim, double sample_rate_hz,
                                           double t0_s) {
  // A mid-pulse zero crossing can round to exactly 0 in serialized data, so a
  // pulse only ends after a run of zeros.
  constexpr Eigen::Index kMinGap = 3;
  std::vector<double> onsets;
  bool in_pulse = false;
  Eigen::Index zeros = 0;
  for (Eigen::Index i = 0; i < stim.size(); ++i) {
    if (stim[i] != 0.0) {
      if (!in_pulse) {
        const Eigen::Index onset = i > 0 ? i - 1 : 0;
        onsets.push_back(t0_s + static_cast<double>(onset) / sample_rate_hz);
        in_pulse = true;
      }
      zeros = 0;
    } else if (in_pulse && ++zeros >= kMinGap) {
      in_pulse = false;
    }
  }
  return onsets;
}

}  // namespace neuromaps::pipeline
