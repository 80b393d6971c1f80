#pragma once

#include "neuromaps/types.hpp"

#include <cstdint>
#include <functional>
#include <utility>

namespace neuromaps::looper {

// What one stimulation trial produced. Recording-side fields stay empty for
// responders that do not synthesize a recording.
struct Outcome {
  bool responded = false;
  int mgf_spikes = 0;  // max spike count in any single pulse
  int lgf_spikes = 0;
  int n_contractions = 0;
  double min_htm_cm = 0.0;
  std::vector<int> events_per_channel;
  std::vector<double> peak_uv_per_channel;
};

// Deterministic for a fixed seed.
using Responder = std::function<Outcome(const StimulusParams&, std::uint64_t seed)>;

// Burst shape shared by every trial of a search or sweep; width and amplitude
// are the coordinates being explored.
struct TrialTemplate {
  double burst_rate_hz = 1.0;
  int n_pulses = 1;
  double start_time_s = 0.5;

  StimulusParams make(double width_ms, double amplitude_vpp) const {
    return {amplitude_vpp, width_ms, burst_rate_hz, n_pulses, start_time_s};
  }
};

struct ThresholdResult {
  double threshold_vpp = 0.0;
  int n_evals = 0;
  std::vector<std::pair<double, bool>> trace;  // (amplitude, responded) per eval
};

// Bisection for the response threshold. Requires responder(a_lo) false and
// responder(a_hi) true; uses <= ceil(log2((a_hi−a_lo)/tol)) + 2 evaluations and
// returns the midpoint of the final bracket. The same seed is used for every
// evaluation, so one search sees one frozen noise realization.
ThresholdResult find_threshold(const Responder& responder, double width_ms, double a_lo,
                               double a_hi, double tol_vpp, const TrialTemplate& trial,
                               std::uint64_t seed);

struct SweepCell {
  double width_ms = 0.0;
  double amplitude_vpp = 0.0;
  std::uint64_t cell_seed = 0;
  double charge_vs = 0.0;
  std::optional<Outcome> outcome;  // absent when the cell failed
  std::string error;               // per-cell failure; never aborts the sweep
};

struct SweepResult {
  std::vector<SweepCell> cells;  // sorted by (width, amplitude)
};

SweepResult grid_sweep(const Responder& responder, std::vector<double> widths_ms,
                       std::vector<double> amplitudes_vpp, const TrialTemplate& trial,
                       std::uint64_t master_seed, int jobs = 1);

struct WidthOutcome {
  double width_ms = 0.0;
  bool ok = false;
  double threshold_vpp = 0.0;
  int n_evals = 0;
  std::string error;
};

struct SDMapResult {
  std::vector<SDPoint> points;
  std::vector<WidthOutcome> widths;
  std::optional<SDFit> weiss;
  std::optional<SDFit> lapicque;
  std::string weiss_error;
  std::string lapicque_error;
  SDModel best_model = SDModel::weiss;  // smallest rss among the fits present
};

// Threshold per width via bisection, then both SD fits. Throws
// insufficient_points_error when fewer than 2 widths produce thresholds.
SDMapResult build_sd_map(const Responder& responder, const std::vector<double>& widths_ms,
                         double a_lo, double a_hi, double tol_vpp, const TrialTemplate& trial,
                         std::uint64_t master_seed);

struct ChargeRow {
  double width_ms = 0.0;
  double threshold_vpp = 0.0;
  double amplitude_vpp = 0.0;  // threshold · (1 + margin)
  double charge_vs = 0.0;
  std::string error;
};

struct MinChargeResult {
  StimulusParams best;
  double charge_vs = 0.0;
  std::vector<ChargeRow> table;
};

// Minimal-charge stimulus subject to responding: charge evaluated at each
// width's threshold lifted by the suprathreshold margin.
MinChargeResult optimize_min_charge(const Responder& responder,
                                    const std::vector<double>& widths_ms, double a_lo,
                                    double a_hi, double tol_vpp, double margin,
                                    const TrialTemplate& trial, std::uint64_t master_seed);

}  // namespace neuromaps::looper
