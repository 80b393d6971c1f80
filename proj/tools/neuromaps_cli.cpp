#include "neuromaps/arraysim.hpp"
#include "neuromaps/config.hpp"
#include "neuromaps/io.hpp"
#include "neuromaps/looper.hpp"
#include "neuromaps/motionkin.hpp"
#include "neuromaps/pipeline.hpp"
#include "neuromaps/stimgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

using neuromaps::config::RunConfig;
using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--config", opts.config_path, "JSON run configuration");
  sub->add_option("--out", opts.out_dir, "output directory (overrides config output_dir)");
  sub->add_option("--seed", opts.seed, "seed override");
}

RunConfig load_config(const CommonOpts& opts) {
  RunConfig cfg = opts.config_path.empty() ? neuromaps::config::defaults()
                                           : neuromaps::config::load_file(opts.config_path);
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  return cfg;
}

std::string ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec)
    throw neuromaps::io_error("cannot create output directory " + cfg.output_dir + ": " +
                              ec.message());
  return cfg.output_dir;
}

neuromaps::RecordingMeta meta_for(const RunConfig& cfg, std::uint64_t seed) {
  RunConfig effective = cfg;
  effective.seed = seed;
  return {neuromaps::config::fingerprint(effective), seed};
}

json outcome_json(const neuromaps::looper::SweepCell& cell) {
  json j;
  j["width_ms"] = cell.width_ms;
  j["amplitude_vpp"] = cell.amplitude_vpp;
  j["cell_seed"] = cell.cell_seed;
  if (cell.outcome) {
    const auto& o = *cell.outcome;
    j["charge_vs"] = cell.charge_vs;
    j["responded"] = o.responded;
    j["mgf_spikes"] = o.mgf_spikes;
    j["lgf_spikes"] = o.lgf_spikes;
    j["events_per_channel"] = o.events_per_channel;
    j["peak_uv_per_channel"] = o.peak_uv_per_channel;
    j["min_htm_cm"] = o.min_htm_cm;
    j["n_contractions"] = o.n_contractions;
  } else {
    j["error"] = cell.error;
  }
  return j;
}

json fit_json(const std::optional<neuromaps::SDFit>& fit, const std::string& error) {
  if (!fit) return json{{"error", error}};
  return json{{"model", neuromaps::to_string(fit->model)},
              {"rheobase_vpp", fit->rheobase_vpp},
              {"chronaxie_ms", fit->chronaxie_ms},
              {"rss", fit->rss},
              {"n_points", fit->n_points}};
}

int cmd_simulate(const CommonOpts& opts) {
  RunConfig cfg = load_config(opts);
  neuromaps::config::validate_or_throw(cfg);
  const std::uint64_t seed = neuromaps::config::resolve_seed(cfg, opts.seed);
  const auto res = neuromaps::pipeline::run_simulation(cfg, seed);
  const std::string out = ensure_out_dir(cfg);
  neuromaps::io::write_recording_csv(out + "/recording.csv", res.recording);
  neuromaps::io::write_events_jsonl(out + "/events.jsonl", res.events, res.recording.meta);
  neuromaps::io::write_trajectory_csv(out + "/motion.csv", res.trajectory, &res.recording.meta);
  neuromaps::io::write_json_file(out + "/summary.json", res.summary);
  return 0;
}

int cmd_sweep(const CommonOpts& opts, int jobs) {
  RunConfig cfg = load_config(opts);
  if (!cfg.grid) throw neuromaps::config_error("grid", "sweep requires a grid section");
  neuromaps::config::validate_or_throw(cfg);
  const std::uint64_t seed = neuromaps::config::resolve_seed(cfg, opts.seed);

  const neuromaps::looper::TrialTemplate trial{cfg.stimulus.burst_rate_hz, cfg.stimulus.n_pulses,
                                               cfg.stimulus.start_time_s};
  const auto responder = neuromaps::pipeline::make_full_responder(cfg);
  const auto sweep = neuromaps::looper::grid_sweep(responder, cfg.grid->widths_ms,
                                                   cfg.grid->amplitudes_vpp, trial, seed, jobs);

  const auto meta = meta_for(cfg, seed);
  const std::string out = ensure_out_dir(cfg);
  neuromaps::io::write_sweep_csv(out + "/sweep.csv", sweep, cfg.geometry.n_pairs, meta);

  json cells = json::array();
  for (const auto& cell : sweep.cells) cells.push_back(outcome_json(cell));
  neuromaps::io::write_json_file(out + "/sweep.json", json{{"fingerprint", meta.fingerprint},
                                                           {"seed", meta.seed},
                                                           {"cells", cells}});
  return 0;
}

int cmd_map_sd(const CommonOpts& opts) {
  RunConfig cfg = load_config(opts);
  neuromaps::config::validate_or_throw(cfg);
  const std::uint64_t seed = neuromaps::config::resolve_seed(cfg, opts.seed);

  const neuromaps::looper::TrialTemplate trial{cfg.stimulus.burst_rate_hz, 1,
                                               cfg.stimulus.start_time_s};
  const auto responder = neuromaps::pipeline::make_full_responder(cfg);
  const auto map = neuromaps::looper::build_sd_map(responder, cfg.sd.widths_ms,
                                                   cfg.sd.bracket_lo_vpp, cfg.sd.bracket_hi_vpp,
                                                   cfg.sd.tol_vpp, trial, seed);

  const auto meta = meta_for(cfg, seed);
  const std::string out = ensure_out_dir(cfg);
  neuromaps::io::write_sd_csv(out + "/sd_points.csv", map.points, meta);

  json widths = json::array();
  for (const auto& w : map.widths) {
    json jw{{"width_ms", w.width_ms}, {"ok", w.ok}};
    if (w.ok) {
      jw["threshold_vpp"] = w.threshold_vpp;
      jw["n_evals"] = w.n_evals;
    } else {
      jw["error"] = w.error;
    }
    widths.push_back(jw);
  }

  // Charge at threshold·(1+margin) per width; same numbers the optimizer
  // produces, read straight off the map.
  json charge_table = json::array();
  json best_charge;
  for (const auto& p : map.points) {
    const double amplitude = p.threshold_vpp * (1.0 + cfg.sd.margin);
    const double charge = neuromaps::stimgen::pulse_charge(trial.make(p.width_ms, amplitude));
    charge_table.push_back(json{{"width_ms", p.width_ms},
                                {"amplitude_vpp", amplitude},
                                {"charge_vs", charge}});
    if (best_charge.is_null() || charge < best_charge["charge_vs"].get<double>())
      best_charge = charge_table.back();
  }

  json fit;
  fit["fingerprint"] = meta.fingerprint;
  fit["seed"] = meta.seed;
  json points = json::array();
  for (const auto& p : map.points)
    points.push_back(json{{"width_ms", p.width_ms}, {"threshold_vpp", p.threshold_vpp}});
  fit["points"] = points;
  fit["widths"] = widths;
  fit["weiss"] = fit_json(map.weiss, map.weiss_error);
  fit["lapicque"] = fit_json(map.lapicque, map.lapicque_error);
  fit["best_model"] = neuromaps::to_string(map.best_model);
  fit["ground_truth"] = json{{"rheobase_vpp", cfg.worm.mgf.rheobase_vpp},
                             {"chronaxie_ms", cfg.worm.mgf.chronaxie_ms},
                             {"threshold_model", neuromaps::to_string(cfg.worm.threshold_model)}};
  fit["min_charge"] = json{{"margin", cfg.sd.margin},
                           {"best", best_charge},
                           {"table", charge_table}};
  neuromaps::io::write_json_file(out + "/sd_fit.json", fit);
  return 0;
}

json analyze_recording(const RunConfig& cfg, const std::string& path, const std::string& out) {
  const auto rec = neuromaps::io::read_recording_csv(path);
  const double fs = rec.sample_rate_hz;
  const int n_channels = static_cast<int>(rec.channels.size());

  std::vector<neuromaps::SpikeEvent> events;
  try {
    for (int ch = 0; ch < n_channels; ++ch) {
      neuromaps::Signal y = neuromaps::dsp::notch(rec.channels[static_cast<std::size_t>(ch)],
                                                  cfg.dsp.notch, fs);
      y = neuromaps::dsp::lowpass(y, cfg.dsp.lowpass, fs);
      const auto ev =
          neuromaps::dsp::detect_spikes(y, fs, rec.t0_s, ch + 1, cfg.dsp.detect_params());
      events.insert(events.end(), ev.begin(), ev.end());
    }
  } catch (const neuromaps::config_error&) {
    throw;
  } catch (const neuromaps::error& e) {
    throw neuromaps::config_error("dsp", std::string(e.what()) + " (for this recording)");
  }
  std::sort(events.begin(), events.end(),
            [](const neuromaps::SpikeEvent& a, const neuromaps::SpikeEvent& b) {
              return a.t_s != b.t_s ? a.t_s < b.t_s : a.channel < b.channel;
            });
  neuromaps::io::write_events_jsonl(out + "/events.jsonl", events, rec.meta);

  const auto onsets = neuromaps::pipeline::pulse_onsets_from_stim(rec.stim, fs, rec.t0_s);
  double period = 0.0;
  if (onsets.size() >= 2) {
    std::vector<double> diffs;
    for (std::size_t i = 1; i < onsets.size(); ++i) diffs.push_back(onsets[i] - onsets[i - 1]);
    std::sort(diffs.begin(), diffs.end());
    period = diffs[diffs.size() / 2];
  } else if (onsets.size() == 1) {
    period = rec.time_at(rec.n_samples() - 1) - onsets.front();
  }

  json j;
  j["source"] = path;
  j["fingerprint"] = rec.meta.fingerprint;
  j["seed"] = rec.meta.seed;
  j["sample_rate_hz"] = fs;
  j["n_samples"] = rec.n_samples();
  j["n_channels"] = n_channels;
  j["pulses_s"] = onsets;

  json jevents = json::array();
  for (const auto& e : events)
    jevents.push_back(json{{"t", e.t_s},
                           {"channel", e.channel},
                           {"peak_uv", e.peak_uv},
                           {"polarity", e.polarity}});
  j["events"] = jevents;

  if (!onsets.empty() && period > 0.0) {
    const auto latencies = neuromaps::dsp::event_latencies(events, onsets, period, n_channels);
    const auto med = neuromaps::pipeline::median_latencies(latencies, n_channels);
    json jch = json::array();
    neuromaps::ArrayGeometry g = cfg.geometry;
    g.n_pairs = n_channels;
    const auto positions = neuromaps::arraysim::channel_positions(g);
    for (int ch = 1; ch <= n_channels; ++ch) {
      const auto& m = med[static_cast<std::size_t>(ch - 1)];
      int n_events = 0;
      for (const auto& e : events)
        if (e.channel == ch) ++n_events;
      jch.push_back(json{{"channel", ch},
                         {"position_cm", positions[static_cast<std::size_t>(ch - 1)]},
                         {"n_events", n_events},
                         {"median_first_latency_ms", m ? json(*m * 1e3) : json(nullptr)}});
    }
    j["channels"] = jch;
    try {
      const auto v = neuromaps::dsp::estimate_velocity(med, positions);
      j["velocity"] = json{{"velocity_m_per_s", v.velocity_m_per_s},
                           {"intercept_ms", v.intercept_s * 1e3},
                           {"r_squared", v.r_squared},
                           {"n_channels_used", v.n_channels_used}};
    } catch (const neuromaps::error& e) {
      j["velocity"] = json{{"error", e.what()}};
    }
  } else {
    j["velocity"] = json{{"error", "no stimulus pulses found in the stim column"}};
  }
  return j;
}

json analyze_trajectory(const RunConfig& cfg, const std::string& path) {
  const auto frames = neuromaps::io::read_trajectory_csv(path);
  const auto lengths = neuromaps::motionkin::vector_lengths(frames);
  const auto extrema =
      neuromaps::motionkin::find_extrema(lengths.trace, cfg.dsp.min_prominence_cm);

  json j;
  j["source"] = path;
  j["n_frames"] = frames.size();
  j["rejected_frames"] = lengths.rejected_frames;
  j["has_ttm"] = lengths.trace.ttm_cm.has_value();

  json jex = json::array();
  int n_contractions = 0;
  for (const auto& e : extrema) {
    if (e.kind == neuromaps::ExtremumKind::contraction_min) ++n_contractions;
    jex.push_back(json{{"t_s", e.t_s},
                       {"kind", neuromaps::to_string(e.kind)},
                       {"value", e.value},
                       {"prominence", e.prominence}});
  }
  json motion;
  motion["min_htm"] = lengths.trace.htm_cm.size() > 0 ? json(lengths.trace.htm_cm.minCoeff())
                                                      : json(nullptr);
  motion["n_contraction_minima"] = n_contractions;
  motion["n_extrema"] = extrema.size();
  motion["extrema"] = jex;
  if (lengths.trace.ttm_cm) {
    try {
      motion["htm_ttm_r"] = neuromaps::motionkin::htm_ttm_correlation(lengths.trace);
    } catch (const neuromaps::error& e) {
      motion["htm_ttm_r"] = nullptr;
      motion["htm_ttm_r_error"] = e.what();
    }
  }
  j["motion"] = motion;
  return j;
}

int cmd_analyze(const CommonOpts& opts, const std::string& recording_path,
                const std::string& trajectory_path) {
  RunConfig cfg = load_config(opts);
  neuromaps::config::validate_or_throw(cfg);
  const std::string out = ensure_out_dir(cfg);
  json j;
  if (!recording_path.empty())
    j = analyze_recording(cfg, recording_path, out);
  else
    j = analyze_trajectory(cfg, trajectory_path);
  neuromaps::io::write_json_file(out + "/analysis.json", j);
  return 0;
}

int report(const std::exception& e, int code, const json& extra = json::object()) {
  json j{{"code", code}, {"error", e.what()}};
  j.update(extra);
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"earthworm stimulation-response simulator and analysis toolkit"};
  app.require_subcommand(1);

  CommonOpts sim_opts, sweep_opts, sd_opts, an_opts;
  int jobs = 1;
  std::string recording_path, trajectory_path;

  auto* sim = app.add_subcommand("simulate", "run one stimulation program end to end");
  add_common(sim, sim_opts);

  auto* sweep = app.add_subcommand("sweep", "evaluate a (width, amplitude) grid");
  add_common(sweep, sweep_opts);
  sweep->add_option("--jobs", jobs, "worker threads for sweep cells")->check(CLI::PositiveNumber);

  auto* sd = app.add_subcommand("map-sd", "bisect thresholds per width and fit SD models");
  add_common(sd, sd_opts);

  auto* an = app.add_subcommand("analyze", "offline analysis of a recording or trajectory CSV");
  add_common(an, an_opts);
  auto* rec_opt = an->add_option("--recording", recording_path, "recording CSV to analyze");
  auto* traj_opt = an->add_option("--trajectory", trajectory_path, "trajectory CSV to analyze");
  rec_opt->excludes(traj_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, jobs);
    if (sd->parsed()) return cmd_map_sd(sd_opts);
    if (an->parsed()) {
      if (recording_path.empty() == trajectory_path.empty())
        throw neuromaps::config_error("analyze",
                                      "exactly one of --recording/--trajectory is required");
      return cmd_analyze(an_opts, recording_path, trajectory_path);
    }
    return 1;
  } catch (const neuromaps::config_error& e) {
    return report(e, 2, {{"field", e.field}});
  } catch (const neuromaps::parse_error& e) {
    return report(e, 2, {{"line", e.line}});
  } catch (const neuromaps::insufficient_points_error& e) {
    return report(e, 4);
  } catch (const neuromaps::io_error& e) {
    return report(e, 3);
  } catch (const std::exception& e) {
    return report(e, 1);
  }
}
