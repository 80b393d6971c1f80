#include "neuromaps/config.hpp"

#include "neuromaps/arraysim.hpp"
#include "neuromaps/rng.hpp"
#include "neuromaps/stimgen.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace neuromaps::config {

namespace {

using nlohmann::json;

std::string joined(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string display(const std::string& path) { return path.empty() ? "(root)" : path; }

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw config_error(display(path), "expected a JSON object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) throw config_error(joined(path, item.key()), "unknown field");
  }
}

void read_double(const json& o, const std::string& path, const char* key, double& out) {
  if (!o.contains(key)) return;
  const json& v = o.at(key);
  if (!v.is_number()) throw config_error(joined(path, key), "expected a number");
  out = v.get<double>();
}

void read_int(const json& o, const std::string& path, const char* key, int& out) {
  if (!o.contains(key)) return;
  const json& v = o.at(key);
  if (!v.is_number_integer()) throw config_error(joined(path, key), "expected an integer");
  out = v.get<int>();
}

void read_bool(const json& o, const std::string& path, const char* key, bool& out) {
  if (!o.contains(key)) return;
  const json& v = o.at(key);
  if (!v.is_boolean()) throw config_error(joined(path, key), "expected a boolean");
  out = v.get<bool>();
}

void read_string(const json& o, const std::string& path, const char* key, std::string& out) {
  if (!o.contains(key)) return;
  const json& v = o.at(key);
  if (!v.is_string()) throw config_error(joined(path, key), "expected a string");
  out = v.get<std::string>();
}

void read_seed(const json& o, const std::string& path, const char* key,
               std::optional<std::uint64_t>& out) {
  if (!o.contains(key)) return;
  const json& v = o.at(key);
  if (v.is_null()) return;
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<std::int64_t>() < 0))
    throw config_error(joined(path, key), "expected a non-negative integer");
  out = v.get<std::uint64_t>();
}

void read_double_array(const json& o, const std::string& path, const char* key,
                       std::vector<double>& out) {
  if (!o.contains(key)) return;
  const json& v = o.at(key);
  if (!v.is_array()) throw config_error(joined(path, key), "expected an array of numbers");
  std::vector<double> vals;
  vals.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw config_error(joined(path, key) + "[" + std::to_string(i) + "]", "expected a number");
    vals.push_back(v[i].get<double>());
  }
  out = std::move(vals);
}

Direction parse_direction(const std::string& s, const std::string& path) {
  if (s == "head_to_tail") return Direction::head_to_tail;
  if (s == "tail_to_head") return Direction::tail_to_head;
  throw config_error(path, "expected \"head_to_tail\" or \"tail_to_head\"");
}

SDModel parse_model(const std::string& s, const std::string& path) {
  if (s == "weiss") return SDModel::weiss;
  if (s == "lapicque") return SDModel::lapicque;
  throw config_error(path, "expected \"weiss\" or \"lapicque\"");
}

SweepGate parse_gate(const std::string& s, const std::string& path) {
  if (s == "motion") return SweepGate::motion;
  if (s == "spikes") return SweepGate::spikes;
  throw config_error(path, "expected \"motion\" or \"spikes\"");
}

void parse_fiber(const json& j, const std::string& path, FiberParams& f) {
  expect_object(j, path);
  check_keys(j, path,
             {"velocity_m_per_s", "direction", "polarity_sign", "rheobase_vpp", "chronaxie_ms",
              "ap_peak_uv", "ap_width_ms"});
  read_double(j, path, "velocity_m_per_s", f.velocity_m_per_s);
  if (j.contains("direction")) {
    std::string s;
    read_string(j, path, "direction", s);
    f.direction = parse_direction(s, joined(path, "direction"));
  }
  read_int(j, path, "polarity_sign", f.polarity_sign);
  read_double(j, path, "rheobase_vpp", f.rheobase_vpp);
  read_double(j, path, "chronaxie_ms", f.chronaxie_ms);
  read_double(j, path, "ap_peak_uv", f.ap_peak_uv);
  read_double(j, path, "ap_width_ms", f.ap_width_ms);
}

void parse_slow_wave(const json& j, const std::string& path, SlowWaveParams& sw) {
  expect_object(j, path);
  check_keys(j, path,
             {"enabled", "onset_delay_ms", "velocity_m_per_s", "decay_per_cm", "peak_uv",
              "width_ms"});
  read_bool(j, path, "enabled", sw.enabled);
  read_double(j, path, "onset_delay_ms", sw.onset_delay_ms);
  read_double(j, path, "velocity_m_per_s", sw.velocity_m_per_s);
  read_double(j, path, "decay_per_cm", sw.decay_per_cm);
  read_double(j, path, "peak_uv", sw.peak_uv);
  read_double(j, path, "width_ms", sw.width_ms);
}

void parse_worm(const json& j, const std::string& path, WormModel& w) {
  expect_object(j, path);
  check_keys(j, path,
             {"mgf", "lgf", "body_length_cm", "rest_htm_cm", "rest_ttm_cm", "contraction_gain_cm",
              "response_tau_s", "antiphase_coupling", "motion_noise_sigma_cm",
              "fiber_decay_per_cm", "max_spikes_per_pulse", "threshold_model", "slow_wave"});
  if (j.contains("mgf")) parse_fiber(j.at("mgf"), joined(path, "mgf"), w.mgf);
  if (j.contains("lgf")) parse_fiber(j.at("lgf"), joined(path, "lgf"), w.lgf);
  read_double(j, path, "body_length_cm", w.body_length_cm);
  read_double(j, path, "rest_htm_cm", w.rest_htm_cm);
  read_double(j, path, "rest_ttm_cm", w.rest_ttm_cm);
  read_double(j, path, "contraction_gain_cm", w.contraction_gain_cm);
  read_double(j, path, "response_tau_s", w.response_tau_s);
  read_double(j, path, "antiphase_coupling", w.antiphase_coupling);
  read_double(j, path, "motion_noise_sigma_cm", w.motion_noise_sigma_cm);
  read_double(j, path, "fiber_decay_per_cm", w.fiber_decay_per_cm);
  read_int(j, path, "max_spikes_per_pulse", w.max_spikes_per_pulse);
  if (j.contains("threshold_model")) {
    std::string s;
    read_string(j, path, "threshold_model", s);
    w.threshold_model = parse_model(s, joined(path, "threshold_model"));
  }
  if (j.contains("slow_wave")) parse_slow_wave(j.at("slow_wave"), joined(path, "slow_wave"), w.slow_wave);
}

void parse_geometry(const json& j, const std::string& path, ArrayGeometry& g) {
  expect_object(j, path);
  check_keys(j, path, {"n_pairs", "pair_spacing_cm", "pitch_cm", "stim_to_first_cm"});
  read_int(j, path, "n_pairs", g.n_pairs);
  read_double(j, path, "pair_spacing_cm", g.pair_spacing_cm);
  read_double(j, path, "pitch_cm", g.pitch_cm);
  read_double(j, path, "stim_to_first_cm", g.stim_to_first_cm);
}

void parse_noise(const json& j, const std::string& path, NoiseModel& n) {
  expect_object(j, path);
  check_keys(j, path,
             {"mains_hz", "mains_uv", "gaussian_sigma_uv", "artifact_coupling",
              "artifact_decay_per_cm"});
  read_double(j, path, "mains_hz", n.mains_hz);
  read_double(j, path, "mains_uv", n.mains_uv);
  read_double(j, path, "gaussian_sigma_uv", n.gaussian_sigma_uv);
  read_double(j, path, "artifact_coupling", n.artifact_coupling);
  read_double(j, path, "artifact_decay_per_cm", n.artifact_decay_per_cm);
}

void parse_dsp(const json& j, const std::string& path, DspConfig& d) {
  expect_object(j, path);
  check_keys(j, path,
             {"lowpass", "notch", "k_mad", "refractory_ms", "edge_guard_s", "min_prominence_cm"});
  if (j.contains("lowpass")) {
    const std::string p = joined(path, "lowpass");
    const json& lp = j.at("lowpass");
    expect_object(lp, p);
    check_keys(lp, p, {"cutoff_hz", "order", "zero_phase"});
    read_double(lp, p, "cutoff_hz", d.lowpass.cutoff_hz);
    read_int(lp, p, "order", d.lowpass.order);
    read_bool(lp, p, "zero_phase", d.lowpass.zero_phase);
  }
  if (j.contains("notch")) {
    const std::string p = joined(path, "notch");
    const json& nt = j.at("notch");
    expect_object(nt, p);
    check_keys(nt, p, {"center_hz", "q_factor", "zero_phase"});
    read_double(nt, p, "center_hz", d.notch.center_hz);
    read_double(nt, p, "q_factor", d.notch.q_factor);
    read_bool(nt, p, "zero_phase", d.notch.zero_phase);
  }
  read_double(j, path, "k_mad", d.k_mad);
  read_double(j, path, "refractory_ms", d.refractory_ms);
  read_double(j, path, "edge_guard_s", d.edge_guard_s);
  read_double(j, path, "min_prominence_cm", d.min_prominence_cm);
}

void parse_sim(const json& j, const std::string& path, SimConfig& s) {
  expect_object(j, path);
  check_keys(j, path, {"sample_rate_hz", "motion_rate_hz", "duration_s"});
  read_double(j, path, "sample_rate_hz", s.sample_rate_hz);
  read_double(j, path, "motion_rate_hz", s.motion_rate_hz);
  if (j.contains("duration_s") && !j.at("duration_s").is_null()) {
    double d = 0.0;
    read_double(j, path, "duration_s", d);
    s.duration_s = d;
  }
}

void parse_stimulus(const json& j, const std::string& path, StimulusParams& p) {
  expect_object(j, path);
  check_keys(j, path,
             {"amplitude_vpp", "pulse_width_ms", "burst_rate_hz", "n_pulses", "start_time_s"});
  read_double(j, path, "amplitude_vpp", p.amplitude_vpp);
  read_double(j, path, "pulse_width_ms", p.pulse_width_ms);
  read_double(j, path, "burst_rate_hz", p.burst_rate_hz);
  read_int(j, path, "n_pulses", p.n_pulses);
  read_double(j, path, "start_time_s", p.start_time_s);
}

void parse_grid(const json& j, const std::string& path, GridConfig& g) {
  expect_object(j, path);
  check_keys(j, path, {"widths_ms", "amplitudes_vpp"});
  read_double_array(j, path, "widths_ms", g.widths_ms);
  read_double_array(j, path, "amplitudes_vpp", g.amplitudes_vpp);
}

void parse_sd(const json& j, const std::string& path, SdConfig& s) {
  expect_object(j, path);
  check_keys(j, path,
             {"widths_ms", "bracket_lo_vpp", "bracket_hi_vpp", "tol_vpp", "margin", "gate"});
  read_double_array(j, path, "widths_ms", s.widths_ms);
  read_double(j, path, "bracket_lo_vpp", s.bracket_lo_vpp);
  read_double(j, path, "bracket_hi_vpp", s.bracket_hi_vpp);
  read_double(j, path, "tol_vpp", s.tol_vpp);
  read_double(j, path, "margin", s.margin);
  if (j.contains("gate")) {
    std::string g;
    read_string(j, path, "gate", g);
    s.gate = parse_gate(g, joined(path, "gate"));
  }
}

json fiber_json(const FiberParams& f) {
  return json{{"velocity_m_per_s", f.velocity_m_per_s},
              {"direction", f.direction == Direction::head_to_tail ? "head_to_tail" : "tail_to_head"},
              {"polarity_sign", f.polarity_sign},
              {"rheobase_vpp", f.rheobase_vpp},
              {"chronaxie_ms", f.chronaxie_ms},
              {"ap_peak_uv", f.ap_peak_uv},
              {"ap_width_ms", f.ap_width_ms}};
}

void check_positive(std::vector<std::string>& out, const std::string& path, double v) {
  if (!(v > 0.0)) out.push_back(path + " must be positive");
}

void check_non_negative(std::vector<std::string>& out, const std::string& path, double v) {
  if (!(v >= 0.0)) out.push_back(path + " must be non-negative");
}

void check_unit_fraction(std::vector<std::string>& out, const std::string& path, double v) {
  if (!(v >= 0.0 && v < 1.0)) out.push_back(path + " must lie in [0, 1)");
}

void validate_fiber(std::vector<std::string>& out, const std::string& path, const FiberParams& f) {
  check_positive(out, path + ".velocity_m_per_s", f.velocity_m_per_s);
  if (f.polarity_sign != 1 && f.polarity_sign != -1)
    out.push_back(path + ".polarity_sign must be +1 or -1");
  check_positive(out, path + ".rheobase_vpp", f.rheobase_vpp);
  check_positive(out, path + ".chronaxie_ms", f.chronaxie_ms);
  check_positive(out, path + ".ap_peak_uv", f.ap_peak_uv);
  check_positive(out, path + ".ap_width_ms", f.ap_width_ms);
}

}  // namespace

std::string to_string(SweepGate g) { return g == SweepGate::motion ? "motion" : "spikes"; }

DspConfig::DspConfig() {
  lowpass.kind = dsp::FilterSpec::Kind::lowpass;
  lowpass.cutoff_hz = 50.0;
  lowpass.order = 4;
  lowpass.zero_phase = true;
  notch.kind = dsp::FilterSpec::Kind::notch;
  notch.center_hz = 60.0;
  notch.q_factor = 30.0;
  notch.zero_phase = true;
}

dsp::DetectParams DspConfig::detect_params() const {
  return {k_mad, refractory_ms, edge_guard_s};
}

RunConfig defaults() {
  RunConfig c;
  c.seed = 42;
  return c;
}

RunConfig from_json(const nlohmann::json& j) {
  expect_object(j, "");
  check_keys(j, "",
             {"seed", "output_dir", "worm", "geometry", "noise", "dsp", "sim", "stimulus", "grid",
              "sd"});
  RunConfig c;
  read_seed(j, "", "seed", c.seed);
  read_string(j, "", "output_dir", c.output_dir);
  if (j.contains("worm")) parse_worm(j.at("worm"), "worm", c.worm);
  if (j.contains("geometry")) parse_geometry(j.at("geometry"), "geometry", c.geometry);
  if (j.contains("noise")) parse_noise(j.at("noise"), "noise", c.noise);
  if (j.contains("dsp")) parse_dsp(j.at("dsp"), "dsp", c.dsp);
  if (j.contains("sim")) parse_sim(j.at("sim"), "sim", c.sim);
  if (j.contains("stimulus")) parse_stimulus(j.at("stimulus"), "stimulus", c.stimulus);
  if (j.contains("grid")) {
    GridConfig g;
    parse_grid(j.at("grid"), "grid", g);
    c.grid = std::move(g);
  }
  if (j.contains("sd")) parse_sd(j.at("sd"), "sd", c.sd);
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  json j;
  if (c.seed) j["seed"] = *c.seed;
  j["output_dir"] = c.output_dir;
  j["worm"] = json{{"mgf", fiber_json(c.worm.mgf)},
                   {"lgf", fiber_json(c.worm.lgf)},
                   {"body_length_cm", c.worm.body_length_cm},
                   {"rest_htm_cm", c.worm.rest_htm_cm},
                   {"rest_ttm_cm", c.worm.rest_ttm_cm},
                   {"contraction_gain_cm", c.worm.contraction_gain_cm},
                   {"response_tau_s", c.worm.response_tau_s},
                   {"antiphase_coupling", c.worm.antiphase_coupling},
                   {"motion_noise_sigma_cm", c.worm.motion_noise_sigma_cm},
                   {"fiber_decay_per_cm", c.worm.fiber_decay_per_cm},
                   {"max_spikes_per_pulse", c.worm.max_spikes_per_pulse},
                   {"threshold_model", to_string(c.worm.threshold_model)},
                   {"slow_wave", json{{"enabled", c.worm.slow_wave.enabled},
                                      {"onset_delay_ms", c.worm.slow_wave.onset_delay_ms},
                                      {"velocity_m_per_s", c.worm.slow_wave.velocity_m_per_s},
                                      {"decay_per_cm", c.worm.slow_wave.decay_per_cm},
                                      {"peak_uv", c.worm.slow_wave.peak_uv},
                                      {"width_ms", c.worm.slow_wave.width_ms}}}};
  j["geometry"] = json{{"n_pairs", c.geometry.n_pairs},
                       {"pair_spacing_cm", c.geometry.pair_spacing_cm},
                       {"pitch_cm", c.geometry.pitch_cm},
                       {"stim_to_first_cm", c.geometry.stim_to_first_cm}};
  j["noise"] = json{{"mains_hz", c.noise.mains_hz},
                    {"mains_uv", c.noise.mains_uv},
                    {"gaussian_sigma_uv", c.noise.gaussian_sigma_uv},
                    {"artifact_coupling", c.noise.artifact_coupling},
                    {"artifact_decay_per_cm", c.noise.artifact_decay_per_cm}};
  j["dsp"] = json{{"lowpass", json{{"cutoff_hz", c.dsp.lowpass.cutoff_hz},
                                   {"order", c.dsp.lowpass.order},
                                   {"zero_phase", c.dsp.lowpass.zero_phase}}},
                  {"notch", json{{"center_hz", c.dsp.notch.center_hz},
                                 {"q_factor", c.dsp.notch.q_factor},
                                 {"zero_phase", c.dsp.notch.zero_phase}}},
                  {"k_mad", c.dsp.k_mad},
                  {"refractory_ms", c.dsp.refractory_ms},
                  {"edge_guard_s", c.dsp.edge_guard_s},
                  {"min_prominence_cm", c.dsp.min_prominence_cm}};
  j["sim"] = json{{"sample_rate_hz", c.sim.sample_rate_hz},
                  {"motion_rate_hz", c.sim.motion_rate_hz}};
  if (c.sim.duration_s) j["sim"]["duration_s"] = *c.sim.duration_s;
  j["stimulus"] = json{{"amplitude_vpp", c.stimulus.amplitude_vpp},
                       {"pulse_width_ms", c.stimulus.pulse_width_ms},
                       {"burst_rate_hz", c.stimulus.burst_rate_hz},
                       {"n_pulses", c.stimulus.n_pulses},
                       {"start_time_s", c.stimulus.start_time_s}};
  if (c.grid)
    j["grid"] = json{{"widths_ms", c.grid->widths_ms}, {"amplitudes_vpp", c.grid->amplitudes_vpp}};
  j["sd"] = json{{"widths_ms", c.sd.widths_ms},
                 {"bracket_lo_vpp", c.sd.bracket_lo_vpp},
                 {"bracket_hi_vpp", c.sd.bracket_hi_vpp},
                 {"tol_vpp", c.sd.tol_vpp},
                 {"margin", c.sd.margin},
                 {"gate", to_string(c.sd.gate)}};
  return j;
}

RunConfig load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("cannot read config file: " + path);
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t upto = std::min(e.byte, text.size());
    for (std::size_t i = 0; i < upto; ++i)
      if (text[i] == '\n') ++line;
    throw parse_error(line, std::string("invalid JSON: ") + e.what());
  }
  return from_json(j);
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> out;

  validate_fiber(out, "worm.mgf", c.worm.mgf);
  validate_fiber(out, "worm.lgf", c.worm.lgf);
  check_positive(out, "worm.body_length_cm", c.worm.body_length_cm);
  check_positive(out, "worm.rest_htm_cm", c.worm.rest_htm_cm);
  check_positive(out, "worm.rest_ttm_cm", c.worm.rest_ttm_cm);
  check_non_negative(out, "worm.contraction_gain_cm", c.worm.contraction_gain_cm);
  check_positive(out, "worm.response_tau_s", c.worm.response_tau_s);
  if (!(c.worm.antiphase_coupling >= 0.0 && c.worm.antiphase_coupling <= 1.0))
    out.push_back("worm.antiphase_coupling must lie in [0, 1]");
  check_non_negative(out, "worm.motion_noise_sigma_cm", c.worm.motion_noise_sigma_cm);
  check_unit_fraction(out, "worm.fiber_decay_per_cm", c.worm.fiber_decay_per_cm);
  if (c.worm.max_spikes_per_pulse < 1) out.push_back("worm.max_spikes_per_pulse must be >= 1");
  check_non_negative(out, "worm.slow_wave.onset_delay_ms", c.worm.slow_wave.onset_delay_ms);
  check_positive(out, "worm.slow_wave.velocity_m_per_s", c.worm.slow_wave.velocity_m_per_s);
  check_unit_fraction(out, "worm.slow_wave.decay_per_cm", c.worm.slow_wave.decay_per_cm);
  check_non_negative(out, "worm.slow_wave.peak_uv", c.worm.slow_wave.peak_uv);
  check_positive(out, "worm.slow_wave.width_ms", c.worm.slow_wave.width_ms);

  for (const auto& v : arraysim::validate_geometry(c.geometry)) out.push_back("geometry." + v);

  if (c.noise.mains_hz != 50.0 && c.noise.mains_hz != 60.0)
    out.push_back("noise.mains_hz must be 50 or 60");
  check_non_negative(out, "noise.mains_uv", c.noise.mains_uv);
  check_non_negative(out, "noise.gaussian_sigma_uv", c.noise.gaussian_sigma_uv);
  check_non_negative(out, "noise.artifact_coupling", c.noise.artifact_coupling);
  check_unit_fraction(out, "noise.artifact_decay_per_cm", c.noise.artifact_decay_per_cm);

  check_positive(out, "sim.sample_rate_hz", c.sim.sample_rate_hz);
  check_positive(out, "sim.motion_rate_hz", c.sim.motion_rate_hz);
  if (c.sim.duration_s) check_positive(out, "sim.duration_s", *c.sim.duration_s);

  if (!(c.dsp.lowpass.cutoff_hz > 0.0 && c.dsp.lowpass.cutoff_hz < 0.5 * c.sim.sample_rate_hz))
    out.push_back("dsp.lowpass.cutoff_hz must lie in (0, sim.sample_rate_hz / 2)");
  if (c.dsp.lowpass.order < 2 || c.dsp.lowpass.order % 2 != 0)
    out.push_back("dsp.lowpass.order must be even and >= 2");
  if (!(c.dsp.notch.center_hz > 0.0 && c.dsp.notch.center_hz < 0.5 * c.sim.sample_rate_hz))
    out.push_back("dsp.notch.center_hz must lie in (0, sim.sample_rate_hz / 2)");
  check_positive(out, "dsp.notch.q_factor", c.dsp.notch.q_factor);
  check_positive(out, "dsp.k_mad", c.dsp.k_mad);
  check_non_negative(out, "dsp.refractory_ms", c.dsp.refractory_ms);
  check_non_negative(out, "dsp.edge_guard_s", c.dsp.edge_guard_s);
  check_positive(out, "dsp.min_prominence_cm", c.dsp.min_prominence_cm);

  for (const auto& v : stimgen::validate_params(c.stimulus)) out.push_back("stimulus." + v);

  if (c.grid) {
    if (c.grid->widths_ms.empty()) out.push_back("grid.widths_ms must be non-empty");
    if (c.grid->amplitudes_vpp.empty()) out.push_back("grid.amplitudes_vpp must be non-empty");
    for (double w : c.grid->widths_ms)
      if (!(w > 0.0)) {
        out.push_back("grid.widths_ms entries must be positive");
        break;
      }
    for (double a : c.grid->amplitudes_vpp)
      if (!(a >= 0.0)) {
        out.push_back("grid.amplitudes_vpp entries must be non-negative");
        break;
      }
  }

  if (c.sd.widths_ms.empty()) out.push_back("sd.widths_ms must be non-empty");
  for (double w : c.sd.widths_ms)
    if (!(w > 0.0)) {
      out.push_back("sd.widths_ms entries must be positive");
      break;
    }
  if (!(c.sd.bracket_lo_vpp >= 0.0)) out.push_back("sd.bracket_lo_vpp must be non-negative");
  if (!(c.sd.bracket_lo_vpp < c.sd.bracket_hi_vpp))
    out.push_back("sd.bracket_lo_vpp must be below sd.bracket_hi_vpp");
  check_positive(out, "sd.tol_vpp", c.sd.tol_vpp);
  check_non_negative(out, "sd.margin", c.sd.margin);

  return out;
}

void validate_or_throw(const RunConfig& c) {
  const auto violations = validate(c);
  if (violations.empty()) return;
  std::string field = violations.front().substr(0, violations.front().find(' '));
  std::string msg = "invalid config";
  for (const auto& v : violations) msg += "; " + v;
  throw config_error(field, msg);
}

bool is_noisy(const RunConfig& c) {
  return c.noise.gaussian_sigma_uv > 0.0 || c.worm.motion_noise_sigma_cm > 0.0;
}

std::uint64_t resolve_seed(const RunConfig& c, std::optional<std::uint64_t> cli_seed) {
  if (cli_seed) return *cli_seed;
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("NEUROMAPS_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw config_error("seed", std::string("NEUROMAPS_SEED is not an integer: ") + env);
    return static_cast<std::uint64_t>(v);
  }
  if (is_noisy(c))
    throw config_error("seed", "seed required for a noisy run (set seed, --seed, or NEUROMAPS_SEED)");
  return 0;
}

std::string fingerprint(const RunConfig& c) {
  json j = to_json(c);
  j.erase("output_dir");  // destination is not part of the experiment
  const std::string dump = j.dump();
  const std::uint64_t h = rng::fnv1a(dump.data(), dump.size());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace neuromaps::config
