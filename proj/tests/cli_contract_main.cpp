// End-to-end checks of the command line contract: exit codes, artifact layout,
// seed resolution and the JSON error envelope, all through the real binary.

#include "neuromaps/config.hpp"
#include "neuromaps/io.hpp"

#include <json.hpp>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Harness {
  std::string cli;
  fs::path configs;
  fs::path tmp;
  int checks = 0, failures = 0;
  int next_dir = 0;

  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok) ++failures;
    std::printf("%s - %s\n", ok ? "ok" : "FAIL", what.c_str());
  }

  fs::path fresh_dir(const std::string& tag) {
    fs::path p = tmp / (tag + "_" + std::to_string(next_dir++));
    fs::remove_all(p);
    return p;
  }

  // Runs the CLI with `args`, returns the exit code; stderr lands in `err`.
  int run(const std::string& args, std::string* err = nullptr) {
    const fs::path err_path = tmp / "stderr.txt";
    const std::string cmd =
        cli + " " + args + " >/dev/null 2>" + err_path.string();
    const int status = std::system(cmd.c_str());
    if (err) {
      std::ifstream in(err_path);
      err->assign(std::istreambuf_iterator<char>(in), {});
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  json read_json(const fs::path& p) {
    return json::parse(neuromaps::io::read_text_file(p.string()));
  }

  json stderr_json(const std::string& err) {
    return json::parse(err.empty() ? "{}" : err.substr(0, err.find('\n')));
  }

  fs::path write_config(const std::string& name, const json& j) {
    const fs::path p = tmp / name;
    neuromaps::io::write_json_file(p.string(), j);
    return p;
  }
};

// Scans the leading metadata block (comment lines / first JSONL record).
bool header_contains(const fs::path& p, const std::string& needle) {
  std::ifstream in(p);
  std::string line;
  for (int i = 0; i < 3 && std::getline(in, line); ++i)
    if (line.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  Harness h;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") h.cli = argv[i + 1];
    if (std::string(argv[i]) == "--configs") h.configs = argv[i + 1];
  }
  if (h.cli.empty() || h.configs.empty()) {
    std::fprintf(stderr, "usage: cli_contract_tests --cli <binary> --configs <dir>\n");
    return 2;
  }
  h.tmp = fs::temp_directory_path() / "neuromaps_cli_contract";
  fs::remove_all(h.tmp);
  fs::create_directories(h.tmp);
  unsetenv("NEUROMAPS_SEED");

  const json default_cfg = h.read_json(h.configs / "default.json");

  // ---- bundled configs parse, validate, and match built-in defaults --------
  for (const char* name : {"default.json", "high_amplitude.json", "amplitude_series.json",
                           "width_series.json", "sd_map.json"}) {
    bool ok = true;
    std::string why;
    try {
      neuromaps::config::validate_or_throw(
          neuromaps::config::load_file((h.configs / name).string()));
    } catch (const std::exception& e) {
      ok = false;
      why = e.what();
    }
    h.check(ok, std::string("bundled config validates: ") + name + (ok ? "" : " (" + why + ")"));
  }
  {
    auto stock = neuromaps::config::defaults();
    stock.seed = 42;
    const auto loaded = neuromaps::config::load_file((h.configs / "default.json").string());
    h.check(neuromaps::config::fingerprint(loaded) == neuromaps::config::fingerprint(stock),
            "default.json fingerprints identically to built-in defaults with seed 42");
  }

  // ---- simulate happy path ---------------------------------------------------
  const fs::path sim_out = h.fresh_dir("sim");
  {
    const int rc = h.run("simulate --config " + (h.configs / "default.json").string() + " --out " +
                         sim_out.string());
    h.check(rc == 0, "simulate with bundled defaults exits 0");
    bool all = true;
    for (const char* f : {"recording.csv", "events.jsonl", "motion.csv", "summary.json"})
      all = all && fs::exists(sim_out / f);
    h.check(all, "simulate writes recording.csv, events.jsonl, motion.csv, summary.json");

    const json s = h.read_json(sim_out / "summary.json");
    h.check(s["seed"] == 42, "summary embeds the config seed");
    const std::string fp = s["fingerprint"];
    h.check(fp.size() == 16, "summary embeds a 16-hex-digit fingerprint");
    bool evoked = true;
    for (int ch = 0; ch < 3; ++ch)
      evoked = evoked && s["channels"][ch]["n_events"].get<int>() >= 1;
    h.check(evoked, "default stimulus evokes at least one event on each of ch1-3");
    h.check(header_contains(sim_out / "recording.csv", fp) &&
                header_contains(sim_out / "events.jsonl", fp) &&
                header_contains(sim_out / "motion.csv", fp),
            "every artifact embeds the same fingerprint");
  }

  // ---- zero amplitude is quiet ------------------------------------------------
  {
    json cfg = default_cfg;
    cfg["stimulus"]["amplitude_vpp"] = 0.0;
    const fs::path out = h.fresh_dir("quiet");
    const int rc =
        h.run("simulate --config " + h.write_config("quiet.json", cfg).string() + " --out " +
              out.string());
    const json s = h.read_json(out / "summary.json");
    int total = 0;
    for (const auto& ch : s["channels"]) total += ch["n_events"].get<int>();
    h.check(rc == 0 && total == 0 && s["motion"]["n_extrema"] == 0 &&
                s["velocity"].contains("error"),
            "zero-amplitude run reports zero events, zero extrema, and no velocity");
  }

  // ---- seed resolution ----------------------------------------------------------
  {
    json cfg = default_cfg;
    cfg.erase("seed");
    const fs::path cfg_path = h.write_config("noseed.json", cfg);

    std::string err;
    int rc = h.run("simulate --config " + cfg_path.string() + " --out " +
                       h.fresh_dir("seedless").string(),
                   &err);
    json e = h.stderr_json(err);
    h.check(rc == 2 && e["field"] == "seed",
            "noisy config without any seed exits 2 with field \"seed\"");

    setenv("NEUROMAPS_SEED", "7", 1);
    const fs::path env_out = h.fresh_dir("envseed");
    rc = h.run("simulate --config " + cfg_path.string() + " --out " + env_out.string());
    h.check(rc == 0 && h.read_json(env_out / "summary.json")["seed"] == 7,
            "NEUROMAPS_SEED supplies the seed when the config omits it");

    const fs::path cli_out = h.fresh_dir("cliseed");
    rc = h.run("simulate --config " + cfg_path.string() + " --seed 9 --out " + cli_out.string());
    h.check(rc == 0 && h.read_json(cli_out / "summary.json")["seed"] == 9,
            "--seed beats NEUROMAPS_SEED");

    setenv("NEUROMAPS_SEED", "12x", 1);
    rc = h.run("simulate --config " + cfg_path.string() + " --out " +
                   h.fresh_dir("badenv").string(),
               &err);
    e = h.stderr_json(err);
    h.check(rc == 2 && e["field"] == "seed", "malformed NEUROMAPS_SEED exits 2");
    unsetenv("NEUROMAPS_SEED");

    const fs::path cfg_seed_out = h.fresh_dir("cfgseed");
    rc = h.run("simulate --config " + (h.configs / "default.json").string() + " --seed 9 --out " +
               cfg_seed_out.string());
    h.check(rc == 0 && h.read_json(cfg_seed_out / "summary.json")["seed"] == 9,
            "--seed beats the config seed");
  }

  // ---- error envelope and exit codes ---------------------------------------------
  {
    json cfg = default_cfg;
    cfg["worm"]["bogus"] = 1;
    std::string err;
    const fs::path out = h.fresh_dir("badkey");
    const int rc = h.run("simulate --config " + h.write_config("badkey.json", cfg).string() +
                             " --out " + out.string(),
                         &err);
    const json e = h.stderr_json(err);
    h.check(rc == 2 && e["field"] == "worm.bogus" && e["code"] == 2,
            "unknown config key exits 2 naming the dotted path");
    h.check(!fs::exists(out / "summary.json"), "failed run writes no artifacts");
  }
  {
    std::string err;
    const int rc = h.run("simulate --config " + (h.tmp / "no_such.json").string() + " --out " +
                             h.fresh_dir("noconfig").string(),
                         &err);
    h.check(rc == 3 && h.stderr_json(err)["code"] == 3, "missing config file exits 3");
  }
  {
    json cfg = default_cfg;
    cfg["sd"]["widths_ms"] = json::array({3.33});
    std::string err;
    const int rc = h.run("map-sd --config " + h.write_config("onewidth.json", cfg).string() +
                             " --out " + h.fresh_dir("onewidth").string(),
                         &err);
    h.check(rc == 4 && h.stderr_json(err)["code"] == 4,
            "map-sd with a single width exits 4 (insufficient points)");
  }
  {
    const fs::path empty = h.tmp / "empty.csv";
    std::ofstream(empty).close();
    std::string err;
    const int rc = h.run("analyze --recording " + empty.string() + " --out " +
                             h.fresh_dir("emptyrec").string(),
                         &err);
    const json e = h.stderr_json(err);
    h.check(rc == 2 && e["code"] == 2 && e.contains("line"),
            "analyze on an empty recording exits 2 with a line number");
  }
  {
    std::string err;
    const int rc = h.run("analyze --out " + h.fresh_dir("noinput").string(), &err);
    h.check(rc == 2 && h.stderr_json(err)["field"] == "analyze",
            "analyze without --recording/--trajectory exits 2");
  }

  // ---- sweep ------------------------------------------------------------------------
  {
    const fs::path out = h.fresh_dir("sweep");
    const int rc = h.run("sweep --config " +
                         (h.configs / "amplitude_series.json").string() + " --out " +
                         out.string());
    h.check(rc == 0, "amplitude sweep exits 0");
    const json s = h.read_json(out / "sweep.json");
    const auto& cells = s["cells"];
    bool shape = cells.size() == 4 && s.contains("fingerprint") && s.contains("seed");
    h.check(shape, "sweep.json carries fingerprint, seed, and one cell per grid point");
    // 3.33 ms gate threshold is 4 Vpp: 2 Vpp stays subthreshold, the rest respond.
    const bool expect[4] = {false, true, true, true};
    bool flags = true;
    for (int i = 0; i < 4; ++i)
      flags = flags && cells[i]["responded"].get<bool>() == expect[i];
    h.check(flags, "sweep responded flags follow the 4 Vpp motion threshold at 3.33 ms");
    h.check(fs::exists(out / "sweep.csv") && header_contains(out / "sweep.csv", "fingerprint"),
            "sweep.csv written with metadata header");
  }
  {
    json cfg = default_cfg;
    cfg["grid"] = json{{"widths_ms", json::array({3.33, 1500.0})},
                       {"amplitudes_vpp", json::array({5.0})}};
    const fs::path out = h.fresh_dir("sweepfail");
    const int rc = h.run("sweep --config " + h.write_config("sweepfail.json", cfg).string() +
                         " --out " + out.string());
    const json s = h.read_json(out / "sweep.json");
    int ok_cells = 0, err_cells = 0;
    for (const auto& c : s["cells"]) {
      if (c.contains("error"))
        ++err_cells;
      else
        ++ok_cells;
    }
    h.check(rc == 0 && ok_cells == 1 && err_cells == 1,
            "a cell whose stimulus cannot be built fails in-row while the sweep exits 0");
  }

  // ---- map-sd -------------------------------------------------------------------------
  std::vector<double> coarse_thresholds;
  {
    const fs::path out = h.fresh_dir("sdmap");
    const int rc = h.run("map-sd --config " + (h.configs / "sd_map.json").string() + " --out " +
                         out.string());
    h.check(rc == 0, "map-sd with bundled config exits 0");
    const json s = h.read_json(out / "sd_fit.json");
    const double rheo = s["weiss"]["rheobase_vpp"];
    const double chron = s["weiss"]["chronaxie_ms"];
    h.check(std::abs(rheo - 2.0) / 2.0 <= 0.02 && std::abs(chron - 3.33) / 3.33 <= 0.05 &&
                s["best_model"] == "weiss",
            "map-sd fit lands on the configured worm (weiss preferred)");
    h.check(s["min_charge"]["best"]["width_ms"] == 2.0,
            "minimum-charge table picks the shortest width");
    h.check(fs::exists(out / "sd_points.csv") &&
                header_contains(out / "sd_points.csv", s["fingerprint"].get<std::string>()),
            "sd_points.csv embeds the run fingerprint");
    for (const auto& p : s["points"]) coarse_thresholds.push_back(p["threshold_vpp"]);
  }
  {
    json cfg = h.read_json(h.configs / "sd_map.json");
    cfg["sd"]["tol_vpp"] = 0.025;
    const fs::path out = h.fresh_dir("sdmap_fine");
    const int rc = h.run("map-sd --config " + h.write_config("sd_fine.json", cfg).string() +
                         " --out " + out.string());
    const json s = h.read_json(out / "sd_fit.json");
    bool close = rc == 0 && s["points"].size() == coarse_thresholds.size();
    for (std::size_t i = 0; close && i < coarse_thresholds.size(); ++i)
      close = std::abs(s["points"][i]["threshold_vpp"].get<double>() - coarse_thresholds[i]) <=
              0.05;
    h.check(close, "halving the tolerance moves each threshold by at most the old tolerance");
  }

  // ---- analyze round trips ---------------------------------------------------------------
  {
    json cfg = default_cfg;
    cfg["stimulus"] = json{{"amplitude_vpp", 0.5},
                           {"pulse_width_ms", 6.67},
                           {"burst_rate_hz", 1.0},
                           {"n_pulses", 3},
                           {"start_time_s", 0.5}};
    cfg["seed"] = 7;
    const fs::path gen = h.fresh_dir("slowwave");
    h.run("simulate --config " + h.write_config("slowwave.json", cfg).string() + " --out " +
          gen.string());

    const fs::path out = h.fresh_dir("analysis");
    const int rc = h.run("analyze --recording " + (gen / "recording.csv").string() + " --out " +
                         out.string());
    h.check(rc == 0, "analyze on a generated recording exits 0");
    const json a = h.read_json(out / "analysis.json");
    const double v = a["velocity"]["velocity_m_per_s"];
    h.check(std::abs(v - 1.0) <= 0.05,
            "analyze recovers the 1 m/s slow wave from the recording alone");
    h.check(a["seed"] == 7 && a["fingerprint"].get<std::string>().size() == 16 &&
                fs::exists(out / "events.jsonl"),
            "analysis carries the source metadata and re-exports events");

    const fs::path traj_out = h.fresh_dir("trajectory");
    const int rc2 = h.run("analyze --trajectory " + (gen / "motion.csv").string() + " --out " +
                          traj_out.string());
    const json t = h.read_json(traj_out / "analysis.json");
    h.check(rc2 == 0 && t["has_ttm"] == true && t["motion"]["htm_ttm_r"].is_number(),
            "trajectory analysis includes the head/tail correlation when TtM is tracked");
  }

  std::printf("%d checks, %d failures\n", h.checks, h.failures);
  return h.failures == 0 ? 0 : 1;
}
