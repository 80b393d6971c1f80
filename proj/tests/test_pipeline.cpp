#include "neuromaps/pipeline.hpp"

#include "neuromaps/stimgen.hpp"

#include <doctest.h>

using namespace neuromaps;

TEST_CASE("record length covers the last pulse plus a settling second") {
  StimulusParams p;  // 3 pulses at 1 Hz from 0.5 s
  CHECK(pipeline::auto_duration(p) == doctest::Approx(3.5).epsilon(1e-12));
  p.n_pulses = 1;
  CHECK(pipeline::auto_duration(p) == doctest::Approx(1.5).epsilon(1e-12));

  auto cfg = config::defaults();
  CHECK(pipeline::duration_for(cfg) == doctest::Approx(3.5).epsilon(1e-12));
  cfg.sim.duration_s = 9.0;
  CHECK(pipeline::duration_for(cfg) == 9.0);
}

TEST_CASE("a default run produces spikes, events and contractions end to end") {
  const auto cfg = config::defaults();
  const auto r = pipeline::run_simulation(cfg, 42);

  CHECK(r.seed == 42);
  CHECK(r.fingerprint == config::fingerprint(cfg));
  CHECK(r.duration_s == doctest::Approx(3.5));
  REQUIRE(r.recording.channels.size() == 4);
  CHECK(r.recording.n_samples() == 35001);
  REQUIRE(r.filtered.size() == 4);

  // 5 Vpp / 3.33 ms: 1 MGF + 3 LGF spikes per pulse, every pulse gated
  REQUIRE(r.evoked.mgf.size() == 3);
  CHECK(r.evoked.mgf[0].spike_times_s.size() == 1);
  CHECK(r.evoked.lgf[0].spike_times_s.size() == 3);

  // all four channels see events, and the table is time-sorted
  std::vector<int> per_channel(5, 0);
  for (const auto& e : r.events) ++per_channel[static_cast<std::size_t>(e.channel)];
  for (int c = 1; c <= 4; ++c) CHECK(per_channel[static_cast<std::size_t>(c)] > 0);
  for (std::size_t i = 1; i < r.events.size(); ++i) CHECK(r.events[i].t_s >= r.events[i - 1].t_s);

  // one contraction per gated pulse at the default prominence
  int minima = 0;
  for (const auto& e : r.extrema) minima += e.kind == ExtremumKind::contraction_min;
  CHECK(minima == 3);
  REQUIRE(r.htm_ttm_r.has_value());
  CHECK(*r.htm_ttm_r >= -1.0);
  CHECK(*r.htm_ttm_r <= -0.5);  // antiphase by construction

  // summary carries the provenance and per-channel geometry
  CHECK(r.summary.at("seed") == 42);
  CHECK(r.summary.at("fingerprint") == r.fingerprint);
  CHECK(r.summary.at("channels").size() == 4);
  CHECK(r.summary.at("channels")[0].at("position_cm") == 2.0);
  CHECK(r.trajectory.size() == r.motion.t_s.size());
}

TEST_CASE("the same seed reproduces a run bit for bit") {
  const auto cfg = config::defaults();
  const auto a = pipeline::run_simulation(cfg, 7);
  const auto b = pipeline::run_simulation(cfg, 7);
  const auto c = pipeline::run_simulation(cfg, 8);

  CHECK(a.summary.dump() == b.summary.dump());
  CHECK((a.recording.channels[0] == b.recording.channels[0]).all());
  CHECK((a.motion.htm_cm == b.motion.htm_cm).all());
  CHECK((a.recording.channels[0] != c.recording.channels[0]).any());
}

TEST_CASE("zero amplitude is a quiet, motionless run") {
  auto cfg = config::defaults();
  cfg.stimulus.amplitude_vpp = 0.0;
  const auto r = pipeline::run_simulation(cfg, 1);
  CHECK(r.events.empty());
  CHECK(r.extrema.empty());
  CHECK(r.evoked.mgf[0].spike_times_s.empty());
  CHECK_FALSE(r.velocity.has_value());
  CHECK(!r.velocity_error.empty());
}

TEST_CASE("median latencies aggregate per channel across pulses") {
  dsp::LatencyTable table{{0.013, std::nullopt},
                          {0.016, 0.5},
                          {0.011, std::nullopt}};
  const auto med = pipeline::median_latencies(table, 2);
  REQUIRE(med.size() == 2);
  CHECK(*med[0] == doctest::Approx(0.013).epsilon(1e-12));
  CHECK(*med[1] == doctest::Approx(0.5).epsilon(1e-12));

  dsp::LatencyTable even{{0.010, std::nullopt}, {0.020, std::nullopt}};
  CHECK(*pipeline::median_latencies(even, 2)[0] == doctest::Approx(0.015).epsilon(1e-12));
  CHECK_FALSE(pipeline::median_latencies(even, 2)[1].has_value());
}

TEST_CASE("pulse onsets recover from the stimulus column alone") {
  StimulusParams p;  // 3 pulses
  const auto wf = stimgen::generate_waveform(p, 10000.0, 3.6);
  const auto onsets = pipeline::pulse_onsets_from_stim(wf.samples, 10000.0, 0.0);
  REQUIRE(onsets.size() == 3);
  CHECK(onsets[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(onsets[1] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(onsets[2] == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("a lone zero sample does not split a pulse") {
  Signal stim = Signal::Zero(100);
  stim[10] = 1.0;
  stim[11] = 2.0;
  stim[12] = 0.0;  // serialized zero crossing
  stim[13] = -2.0;
  stim[14] = -1.0;
  stim[50] = 1.0;
  stim[51] = 1.0;
  const auto onsets = pipeline::pulse_onsets_from_stim(stim, 100.0, 0.0);
  REQUIRE(onsets.size() == 2);
  CHECK(onsets[0] == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(onsets[1] == doctest::Approx(0.49).epsilon(1e-12));
}

TEST_CASE("the spike gate and the motion gate disagree below the contraction threshold") {
  auto spikes_cfg = config::defaults();
  spikes_cfg.sd.gate = config::SweepGate::spikes;
  auto motion_cfg = config::defaults();

  const auto by_spikes = pipeline::make_direct_responder(spikes_cfg);
  const auto by_motion = pipeline::make_direct_responder(motion_cfg);

  looper::TrialTemplate trial;
  const auto p = trial.make(3.33, 2.0);  // one LGF spike, no contraction
  CHECK(by_spikes(p, 3).responded);
  CHECK_FALSE(by_motion(p, 3).responded);
}
