#include "neuromaps/looper.hpp"

#include "neuromaps/rng.hpp"
#include "neuromaps/sdfit.hpp"
#include "neuromaps/stimgen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace neuromaps::looper {

namespace {

std::string trace_to_string(const std::vector<std::pair<double, bool>>& trace) {
  std::ostringstream os;
  for (const auto& [a, r] : trace) os << " (" << a << (r ? ",true)" : ",false)");
  return os.str();
}

}  // namespace

ThresholdResult find_threshold(const Responder& responder, double width_ms, double a_lo,
                               double a_hi, double tol_vpp, const TrialTemplate& trial,
                               std::uint64_t seed) {
  if (!(tol_vpp > 0.0)) throw error("tol_vpp must be positive");
  if (!(a_lo < a_hi)) throw error("bracket invalid: a_lo must be below a_hi");

  ThresholdResult res;
  double min_true = std::numeric_limits<double>::infinity();
  double max_false = -std::numeric_limits<double>::infinity();

  auto eval = [&](double amplitude) {
    const bool r = responder(trial.make(width_ms, amplitude), seed).responded;
    ++res.n_evals;
    res.trace.emplace_back(amplitude, r);
    if (r)
      min_true = std::min(min_true, amplitude);
    else
      max_false = std::max(max_false, amplitude);
    if (max_false > min_true)
      throw error("non-monotone response detected:" + trace_to_string(res.trace));
    return r;
  };

  if (eval(a_lo)) throw error("bracket invalid: responder already true at lower bound");
  if (!eval(a_hi)) throw error("bracket invalid: responder false at upper bound");

  double lo = a_lo, hi = a_hi;
  while (hi - lo > tol_vpp) {
    const double mid = 0.5 * (lo + hi);
    if (eval(mid))
      hi = mid;
    else
      lo = mid;
  }
  res.threshold_vpp = 0.5 * (lo + hi);
  return res;
}

SweepResult grid_sweep(const Responder& responder, std::vector<double> widths_ms,
                       std::vector<double> amplitudes_vpp, const TrialTemplate& trial,
                       std::uint64_t master_seed, int jobs) {
  if (widths_ms.empty() || amplitudes_vpp.empty()) throw error("empty sweep grid");
  std::sort(widths_ms.begin(), widths_ms.end());
  std::sort(amplitudes_vpp.begin(), amplitudes_vpp.end());

  SweepResult result;
  for (double w : widths_ms)
    for (double a : amplitudes_vpp) {
      SweepCell cell;
      cell.width_ms = w;
      cell.amplitude_vpp = a;
      cell.cell_seed = rng::cell_seed(master_seed, w, a);
      result.cells.push_back(cell);
    }

  auto run_cell = [&](SweepCell& cell) {
    try {
      const StimulusParams params = trial.make(cell.width_ms, cell.amplitude_vpp);
      if (auto violations = stimgen::validate_params(params); !violations.empty()) {
        std::string msg = "invalid cell";
        for (const auto& v : violations) msg += "; " + v;
        throw error(msg);
      }
      cell.charge_vs = stimgen::pulse_charge(params);
      cell.outcome = responder(params, cell.cell_seed);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  const int n_workers =
      std::clamp(jobs, 1, static_cast<int>(result.cells.size()));
  if (n_workers == 1) {
    for (auto& cell : result.cells) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w)
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < result.cells.size(); i = next.fetch_add(1))
          run_cell(result.cells[i]);
      });
    for (auto& th : workers) th.join();
  }
  return result;
}

SDMapResult build_sd_map(const Responder& responder, const std::vector<double>& widths_ms,
                         double a_lo, double a_hi, double tol_vpp, const TrialTemplate& trial,
                         std::uint64_t master_seed) {
  if (widths_ms.empty()) throw error("no widths given");

  SDMapResult map;
  std::vector<double> widths = widths_ms;
  std::sort(widths.begin(), widths.end());
  for (double w : widths) {
    WidthOutcome wo;
    wo.width_ms = w;
    try {
      const auto th =
          find_threshold(responder, w, a_lo, a_hi, tol_vpp, trial, rng::cell_seed(master_seed, w, 0.0));
      wo.ok = true;
      wo.threshold_vpp = th.threshold_vpp;
      wo.n_evals = th.n_evals;
      map.points.push_back({w, th.threshold_vpp});
    } catch (const std::exception& e) {
      wo.error = e.what();
    }
    map.widths.push_back(wo);
  }

  if (map.points.size() < 2)
    throw insufficient_points_error("insufficient points: only " +
                                    std::to_string(map.points.size()) +
                                    " widths produced thresholds");

  try {
    map.weiss = sdfit::fit_weiss(map.points);
  } catch (const std::exception& e) {
    map.weiss_error = e.what();
  }
  try {
    map.lapicque = sdfit::fit_lapicque(map.points);
  } catch (const std::exception& e) {
    map.lapicque_error = e.what();
  }
  if (!map.weiss && !map.lapicque)
    throw error("both SD fits failed: weiss: " + map.weiss_error +
                "; lapicque: " + map.lapicque_error);

  if (map.weiss && map.lapicque)
    map.best_model = map.weiss->rss <= map.lapicque->rss ? SDModel::weiss : SDModel::lapicque;
  else
    map.best_model = map.weiss ? SDModel::weiss : SDModel::lapicque;
  return map;
}

MinChargeResult optimize_min_charge(const Responder& responder,
                                    const std::vector<double>& widths_ms, double a_lo,
                                    double a_hi, double tol_vpp, double margin,
                                    const TrialTemplate& trial, std::uint64_t master_seed) {
  if (widths_ms.empty()) throw error("no widths given");
  if (margin < 0.0) throw error("margin must be non-negative");

  MinChargeResult out;
  bool have_best = false;
  std::vector<double> widths = widths_ms;
  std::sort(widths.begin(), widths.end());
  for (double w : widths) {
    ChargeRow row;
    row.width_ms = w;
    try {
      const auto th =
          find_threshold(responder, w, a_lo, a_hi, tol_vpp, trial, rng::cell_seed(master_seed, w, 0.0));
      row.threshold_vpp = th.threshold_vpp;
      row.amplitude_vpp = th.threshold_vpp * (1.0 + margin);
      row.charge_vs = stimgen::pulse_charge(trial.make(w, row.amplitude_vpp));
      if (!have_best || row.charge_vs < out.charge_vs) {
        have_best = true;
        out.charge_vs = row.charge_vs;
        out.best = trial.make(w, row.amplitude_vpp);
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    out.table.push_back(row);
  }
  if (!have_best) throw error("no responsive width");
  return out;
}

}  // namespace neuromaps::looper
