#include "neuromaps/config.hpp"
#include "neuromaps/io.hpp"

#include "neuromaps/arraysim.hpp"
#include "neuromaps/wormsim.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace neuromaps;
using nlohmann::json;

namespace {

std::string tmp_path(const std::string& name) {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / "neuromaps_unit";
    std::filesystem::create_directories(d);
    return d;
  }();
  return (dir / name).string();
}

std::string write_tmp(const std::string& name, const std::string& text) {
  const auto path = tmp_path(name);
  std::ofstream(path) << text;
  return path;
}

bool contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("defaults are valid, noisy, and serialization round trips") {
  const auto cfg = config::defaults();
  CHECK(config::validate(cfg).empty());
  CHECK(config::is_noisy(cfg));

  const json j = config::to_json(cfg);
  const auto back = config::from_json(j);
  CHECK(config::to_json(back) == j);
  CHECK(config::fingerprint(back) == config::fingerprint(cfg));
}

TEST_CASE("quiet configs are recognized") {
  auto cfg = config::defaults();
  cfg.noise.gaussian_sigma_uv = 0.0;
  CHECK(config::is_noisy(cfg));  // motion tracker noise still on
  cfg.worm.motion_noise_sigma_cm = 0.0;
  CHECK_FALSE(config::is_noisy(cfg));
}

TEST_CASE("unknown fields are rejected with their dotted path") {
  json j = config::to_json(config::defaults());
  j["bogus"] = 1;
  CHECK_THROWS_AS(config::from_json(j), config_error);
  try {
    config::from_json(j);
  } catch (const config_error& e) {
    CHECK(e.field == "bogus");
  }

  json nested = config::to_json(config::defaults());
  nested["worm"]["mgf"]["crhonaxie_ms"] = 3.0;
  try {
    config::from_json(nested);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.field == "worm.mgf.crhonaxie_ms");
  }
}

TEST_CASE("wrong types are rejected with their dotted path") {
  json j = config::to_json(config::defaults());
  j["sim"]["sample_rate_hz"] = "fast";
  try {
    config::from_json(j);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.field == "sim.sample_rate_hz");
  }
}

TEST_CASE("enumerations parse strictly") {
  json j = config::to_json(config::defaults());
  j["worm"]["mgf"]["direction"] = "sideways";
  try {
    config::from_json(j);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.field == "worm.mgf.direction");
  }

  json g = config::to_json(config::defaults());
  g["sd"]["gate"] = "vibes";
  CHECK_THROWS_AS(config::from_json(g), config_error);
}

TEST_CASE("semantic validation lists every violation with its path") {
  auto cfg = config::defaults();
  cfg.noise.mains_hz = 55.0;
  cfg.worm.antiphase_coupling = 1.5;
  cfg.dsp.lowpass.cutoff_hz = 6000.0;  // >= nyquist at 10 kHz
  cfg.stimulus.n_pulses = 0;
  cfg.sd.bracket_lo_vpp = 9.0;

  const auto v = config::validate(cfg);
  CHECK(v.size() == 5);
  CHECK(contains(v, "noise.mains_hz"));
  CHECK(contains(v, "worm.antiphase_coupling"));
  CHECK(contains(v, "dsp.lowpass.cutoff_hz"));
  CHECK(contains(v, "stimulus.n_pulses"));
  CHECK(contains(v, "sd.bracket_lo_vpp"));

  try {
    config::validate_or_throw(cfg);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.field == "worm.antiphase_coupling");  // first violation in listing order
    CHECK(std::string(e.what()).find("invalid config") != std::string::npos);
  }
}

TEST_CASE("seed resolution precedence") {
  auto cfg = config::defaults();  // defaults carry seed 42
  unsetenv("NEUROMAPS_SEED");

  CHECK(config::resolve_seed(cfg, 9) == 9);
  CHECK(config::resolve_seed(cfg, std::nullopt) == 42);

  cfg.seed.reset();
  setenv("NEUROMAPS_SEED", "1234", 1);
  CHECK(config::resolve_seed(cfg, std::nullopt) == 1234);
  CHECK(config::resolve_seed(cfg, 9) == 9);

  setenv("NEUROMAPS_SEED", "12x", 1);
  try {
    config::resolve_seed(cfg, std::nullopt);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.field == "seed");
  }

  unsetenv("NEUROMAPS_SEED");
  try {
    config::resolve_seed(cfg, std::nullopt);  // noisy run with no seed anywhere
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.field == "seed");
    CHECK(std::string(e.what()).find("seed required") != std::string::npos);
  }

  cfg.noise.gaussian_sigma_uv = 0.0;
  cfg.worm.motion_noise_sigma_cm = 0.0;
  CHECK(config::resolve_seed(cfg, std::nullopt) == 0);  // quiet runs default quietly
}

TEST_CASE("fingerprint tracks the experiment, not the destination") {
  auto cfg = config::defaults();
  const auto base = config::fingerprint(cfg);
  CHECK(base.size() == 16);
  CHECK(base.find_first_not_of("0123456789abcdef") == std::string::npos);

  cfg.output_dir = "elsewhere";
  CHECK(config::fingerprint(cfg) == base);

  cfg.seed = 43;
  const auto reseeded = config::fingerprint(cfg);
  CHECK(reseeded != base);

  cfg.seed = 42;
  cfg.worm.mgf.rheobase_vpp = 2.5;
  CHECK(config::fingerprint(cfg) != base);
  cfg.worm.mgf.rheobase_vpp = 2.0;
  CHECK(config::fingerprint(cfg) == base);
}

TEST_CASE("config files load with line-accurate errors") {
  CHECK_THROWS_AS(config::load_file(tmp_path("nope.json")), io_error);

  const auto bad = write_tmp("bad.json", "{\n  \"seed\": 1,\n  \"worm\": oops\n}\n");
  try {
    config::load_file(bad);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("invalid JSON") != std::string::npos);
  }

  const auto good = write_tmp("good.json", "{\"seed\": 7, \"stimulus\": {\"amplitude_vpp\": 6.5}}");
  const auto cfg = config::load_file(good);
  CHECK(cfg.seed == 7);
  CHECK(cfg.stimulus.amplitude_vpp == 6.5);
  CHECK(cfg.worm.mgf.rheobase_vpp == 2.0);  // untouched fields keep defaults
}

TEST_CASE("recording csv round trips to write precision") {
  WormModel m;
  m.slow_wave.enabled = false;
  StimulusParams p;
  p.amplitude_vpp = 4.0;
  p.n_pulses = 1;
  NoiseModel noise;
  noise.rng_seed = 9;
  auto rec = arraysim::synthesize_recording(m, wormsim::evoke_spikes(m, p, 9), p, ArrayGeometry{},
                                            noise, 1.2, 1000.0);
  rec.meta.fingerprint = "00ff00ff00ff00ff";
  rec.meta.seed = 9;

  const auto path = tmp_path("rec.csv");
  io::write_recording_csv(path, rec);
  const auto back = io::read_recording_csv(path);

  CHECK(back.meta.fingerprint == rec.meta.fingerprint);
  CHECK(back.meta.seed == 9);
  CHECK(back.sample_rate_hz == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(back.t0_s == 0.0);
  REQUIRE(back.channels.size() == 4);
  REQUIRE(back.n_samples() == rec.n_samples());
  CHECK((back.stim - rec.stim).abs().maxCoeff() <= 5e-7);
  for (std::size_t c = 0; c < 4; ++c)
    CHECK((back.channels[c] - rec.channels[c]).abs().maxCoeff() <= 5e-7);
}

TEST_CASE("recording csv without metadata infers the sample rate") {
  const auto path = write_tmp("plain.csv",
                              "t,stim,ch1,ch2\n"
                              "0.000,0.0,1.0,2.0\n"
                              "0.002,0.0,1.5,2.5\n"
                              "0.004,1.0,2.0,3.0\n");
  const auto rec = io::read_recording_csv(path);
  CHECK(rec.sample_rate_hz == doctest::Approx(500.0).epsilon(1e-9));
  CHECK(rec.channels.size() == 2);
  CHECK(rec.meta.fingerprint.empty());
  CHECK(rec.channels[1][2] == 3.0);
}

TEST_CASE("recording csv reader errors carry line numbers") {
  try {
    io::read_recording_csv(write_tmp("empty.csv", ""));
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 1);
    CHECK(std::string(e.what()).find("header") != std::string::npos);
  }

  try {
    io::read_recording_csv(write_tmp("badhdr.csv", "time,volts\n0,0\n"));
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 1);
  }

  try {
    io::read_recording_csv(write_tmp("short.csv", "t,stim,ch1\n0.0,0.0,1.0\n0.1,0.0\n"));
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("fields") != std::string::npos);
  }

  try {
    io::read_recording_csv(write_tmp("nan.csv", "t,stim,ch1\n0.0,0.0,1.0\n0.1,zap,2.0\n"));
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("number") != std::string::npos);
  }

  try {
    io::read_recording_csv(write_tmp("onerow.csv", "t,stim,ch1\n0.0,0.0,1.0\n"));
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(std::string(e.what()).find("sample rate") != std::string::npos);
  }
}

TEST_CASE("trajectory csv round trips at nanometre precision") {
  std::vector<TrajectoryFrame> frames;
  for (int i = 0; i < 5; ++i) {
    TrajectoryFrame f;
    f.t_s = 0.005 * i;
    f.head = Eigen::Vector2d(-4.0 + 1e-7 * i, 0.123456789);
    f.mid = Eigen::Vector2d(0.0, 0.0);
    if (i != 2) f.tail = Eigen::Vector2d(4.0, -0.5 * i);
    frames.push_back(f);
  }

  const auto path = tmp_path("traj.csv");
  io::write_trajectory_csv(path, frames);
  const auto back = io::read_trajectory_csv(path);

  REQUIRE(back.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(back[i].t_s == doctest::Approx(frames[i].t_s).epsilon(1e-9));
    CHECK((*back[i].head - *frames[i].head).norm() <= 2e-9);
    CHECK(back[i].tail.has_value() == frames[i].tail.has_value());
  }
  CHECK_FALSE(back[2].tail.has_value());
}

TEST_CASE("trajectory csv omits tail columns when nothing is tail-tracked") {
  std::vector<TrajectoryFrame> frames;
  TrajectoryFrame f;
  f.t_s = 0.0;
  f.head = Eigen::Vector2d(1.0, 2.0);
  f.mid = Eigen::Vector2d(0.0, 0.0);
  frames.push_back(f);

  const auto path = tmp_path("traj_notail.csv");
  io::write_trajectory_csv(path, frames);
  const auto text = io::read_text_file(path);
  CHECK(text.find("tail_x") == std::string::npos);
  CHECK_FALSE(io::read_trajectory_csv(path)[0].tail.has_value());
}

TEST_CASE("trajectory csv keeps partially tracked frames but not half points") {
  const auto path = write_tmp("traj_half.csv",
                              "t,head_x,head_y,mid_x,mid_y\n"
                              "0.0,,,0.0,0.0\n"
                              "0.1,1.0,2.0,0.0,0.0\n");
  const auto frames = io::read_trajectory_csv(path);
  REQUIRE(frames.size() == 2);
  CHECK_FALSE(frames[0].head.has_value());
  CHECK(frames[0].mid.has_value());

  const auto bad = write_tmp("traj_bad.csv",
                             "t,head_x,head_y,mid_x,mid_y\n"
                             "0.0,1.0,,0.0,0.0\n");
  try {
    io::read_trajectory_csv(bad);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("half-tracked") != std::string::npos);
  }
}

TEST_CASE("events jsonl round trips exactly") {
  const std::vector<SpikeEvent> events{{0.513275, 1, 104.25, +1}, {0.51455, 4, 73.0, -1}};
  RecordingMeta meta{"abcdef0123456789", 5};

  const auto path = tmp_path("events.jsonl");
  io::write_events_jsonl(path, events, meta);
  const auto back = io::read_events_jsonl(path);

  REQUIRE(back.size() == 2);
  CHECK(back[0].t_s == events[0].t_s);  // doubles survive json verbatim
  CHECK(back[0].peak_uv == events[0].peak_uv);
  CHECK(back[0].channel == 1);
  CHECK(back[0].polarity == +1);
  CHECK(back[1].channel == 4);
  CHECK(back[1].polarity == -1);

  const auto text = io::read_text_file(path);
  CHECK(text.find("fingerprint") != std::string::npos);
  CHECK(text.find("abcdef0123456789") != std::string::npos);
}

TEST_CASE("events jsonl rejects corrupt records") {
  const auto path = write_tmp("events_bad.jsonl",
                              "{\"fingerprint\":\"x\",\"seed\":1}\n"
                              "{\"t\":0.1,\"channel\":1,\"peak_uv\":5.0,\"polarity\":1}\n"
                              "{\"t\":0.2,\"channel\":1}\n");
  try {
    io::read_events_jsonl(path);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("sd table csv round trips") {
  const std::vector<SDPoint> pts{{2.0, 5.33}, {3.33, 4.000001}, {6.67, 2.9985}};
  const auto path = tmp_path("sd.csv");
  io::write_sd_csv(path, pts, RecordingMeta{"feedbeeffeedbeef", 3});
  const auto back = io::read_sd_csv(path);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].width_ms == doctest::Approx(pts[i].width_ms).epsilon(1e-9));
    CHECK(back[i].threshold_vpp == doctest::Approx(pts[i].threshold_vpp).epsilon(1e-9));
  }

  try {
    io::read_sd_csv(write_tmp("sd_bad.csv", "width_ms,threshold_vpp\n2.0\n"));
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("sweep csv lays out one row per cell with in-row errors") {
  looper::SweepResult sweep;
  looper::SweepCell ok;
  ok.width_ms = 3.33;
  ok.amplitude_vpp = 5.0;
  ok.cell_seed = 77;
  ok.charge_vs = 0.0053;
  looper::Outcome out;
  out.responded = true;
  out.mgf_spikes = 1;
  out.lgf_spikes = 3;
  out.n_contractions = 1;
  out.min_htm_cm = 3.0;
  out.events_per_channel = {2, 1};
  out.peak_uv_per_channel = {104.5, 60.25};
  ok.outcome = out;

  looper::SweepCell bad;
  bad.width_ms = 3.33;
  bad.amplitude_vpp = 9.0;
  bad.cell_seed = 78;
  bad.error = "electrode fell off, again";

  sweep.cells = {ok, bad};
  const auto path = tmp_path("sweep.csv");
  io::write_sweep_csv(path, sweep, 2, RecordingMeta{"0123456789abcdef", 42});
  const auto text = io::read_text_file(path);

  CHECK(text.find("width_ms,amplitude_vpp,responded,charge_vs,mgf_spikes,lgf_spikes,"
                  "events_ch1,events_ch2,peak_uv_ch1,peak_uv_ch2,min_htm_cm,n_contractions,"
                  "cell_seed,error") != std::string::npos);
  CHECK(text.find("electrode fell off") != std::string::npos);

  // every data row has the full column count
  std::size_t lines = 0, commas_expected = 13;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++lines;
    CHECK(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) >= commas_expected);
  }
  CHECK(lines == 3);  // header + 2 cells
}
