#pragma once

#include "neuromaps/looper.hpp"
#include "neuromaps/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace neuromaps::io {

// Recording CSV: provenance comments, a `#units` line, header `t,stim,ch1..chN`,
// then one `%.6f` row per sample.
void write_recording_csv(const std::string& path, const MultiChannelRecording& rec);
MultiChannelRecording read_recording_csv(const std::string& path);

// Trajectory CSV: header `t,head_x,head_y,mid_x,mid_y[,tail_x,tail_y]`, `%.9f`
// cells, blank cells for untracked points. Tail columns appear when any frame
// has a tail point.
void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryFrame>& frames,
                          const RecordingMeta* meta = nullptr);
std::vector<TrajectoryFrame> read_trajectory_csv(const std::string& path);

// Events as JSON lines {"t":s,"channel":i,"peak_uv":x,"polarity":±1}; first
// line carries {"fingerprint","seed"}.
void write_events_jsonl(const std::string& path, const std::vector<SpikeEvent>& events,
                        const RecordingMeta& meta);
std::vector<SpikeEvent> read_events_jsonl(const std::string& path);

// SD table CSV: header `width_ms,threshold_vpp`.
void write_sd_csv(const std::string& path, const std::vector<SDPoint>& points,
                  const RecordingMeta& meta);
std::vector<SDPoint> read_sd_csv(const std::string& path);

// Sweep CSV: one row per cell, sorted by (width, amplitude); per-channel
// columns sized by `n_channels`; failed cells keep their error in-row.
void write_sweep_csv(const std::string& path, const looper::SweepResult& sweep, int n_channels,
                     const RecordingMeta& meta);

void write_json_file(const std::string& path, const nlohmann::json& j);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace neuromaps::io
