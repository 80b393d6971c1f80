#include "neuromaps/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace neuromaps::io {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  return in;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_number(const std::string& field, std::size_t line_no, const char* what) {
  const char* s = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw parse_error(line_no, std::string("expected a number for ") + what + ", got \"" + field +
                                   "\"");
  return v;
}

// Strips a trailing '\r' so CRLF exports parse cleanly.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

// Pulls `key=value` out of a comment line, if present.
bool comment_value(const std::string& line, const std::string& key, std::string& out) {
  const std::string needle = key + "=";
  const auto pos = line.find(needle);
  if (pos == std::string::npos) return false;
  auto end = line.find(' ', pos + needle.size());
  if (end == std::string::npos) end = line.size();
  out = line.substr(pos + needle.size(), end - (pos + needle.size()));
  return true;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

void write_recording_csv(const std::string& path, const MultiChannelRecording& rec) {
  auto out = open_out(path);
  out << "# neuromaps recording\n";
  out << "# fingerprint=" << rec.meta.fingerprint << " seed=" << rec.meta.seed << "\n";
  out << "# sample_rate_hz=" << fmt("%.6f", rec.sample_rate_hz) << " t0_s="
      << fmt("%.6f", rec.t0_s) << "\n";
  out << "#units t=s,stim=V,ch=uV\n";
  out << "t,stim";
  for (std::size_t c = 0; c < rec.channels.size(); ++c) out << ",ch" << c + 1;
  out << "\n";
  for (Eigen::Index i = 0; i < rec.n_samples(); ++i) {
    out << fmt("%.6f", rec.time_at(i)) << ',' << fmt("%.6f", rec.stim[i]);
    for (const auto& ch : rec.channels) out << ',' << fmt("%.6f", ch[i]);
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

MultiChannelRecording read_recording_csv(const std::string& path) {
  auto in = open_in(path);
  MultiChannelRecording rec;
  std::string line;
  std::size_t line_no = 0;
  bool have_fs = false;

  // comments + header
  std::vector<std::string> header;
  while (true) {
    if (!next_line(in, line)) throw parse_error(line_no == 0 ? 1 : line_no, "missing header row");
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string v;
      if (comment_value(line, "fingerprint", v)) rec.meta.fingerprint = v;
      if (comment_value(line, "seed", v)) rec.meta.seed = std::strtoull(v.c_str(), nullptr, 10);
      if (comment_value(line, "sample_rate_hz", v)) {
        rec.sample_rate_hz = parse_number(v, line_no, "sample_rate_hz");
        have_fs = true;
      }
      continue;
    }
    header = split_csv(line);
    break;
  }
  if (header.size() < 3 || header[0] != "t" || header[1] != "stim")
    throw parse_error(line_no, "expected header t,stim,ch1,...");
  for (std::size_t c = 2; c < header.size(); ++c)
    if (header[c] != "ch" + std::to_string(c - 1))
      throw parse_error(line_no, "expected channel column ch" + std::to_string(c - 1) + ", got \"" +
                                     header[c] + "\"");
  const std::size_t n_channels = header.size() - 2;

  std::vector<double> t;
  std::vector<double> stim;
  std::vector<std::vector<double>> chans(n_channels);
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size())
      throw parse_error(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
    t.push_back(parse_number(fields[0], line_no, "t"));
    stim.push_back(parse_number(fields[1], line_no, "stim"));
    for (std::size_t c = 0; c < n_channels; ++c)
      chans[c].push_back(parse_number(fields[c + 2], line_no, header[c + 2].c_str()));
  }
  if (t.empty()) throw parse_error(line_no + 1, "no data rows");
  if (!have_fs && t.size() < 2)
    throw parse_error(line_no, "need at least 2 rows to infer the sample rate");

  rec.t0_s = t.front();
  if (!have_fs) rec.sample_rate_hz = 1.0 / (t[1] - t[0]);
  if (!(rec.sample_rate_hz > 0.0) || !std::isfinite(rec.sample_rate_hz))
    throw parse_error(line_no, "non-increasing time column");

  const auto n = static_cast<Eigen::Index>(t.size());
  rec.stim = Eigen::Map<const Signal>(stim.data(), n);
  rec.channels.reserve(n_channels);
  for (auto& ch : chans) rec.channels.push_back(Eigen::Map<const Signal>(ch.data(), n));
  return rec;
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryFrame>& frames,
                          const RecordingMeta* meta) {
  auto out = open_out(path);
  out << "# neuromaps trajectory\n";
  if (meta) out << "# fingerprint=" << meta->fingerprint << " seed=" << meta->seed << "\n";
  const bool with_tail =
      std::any_of(frames.begin(), frames.end(), [](const auto& f) { return f.tail.has_value(); });
  out << "t,head_x,head_y,mid_x,mid_y";
  if (with_tail) out << ",tail_x,tail_y";
  out << "\n";
  auto cell = [&](const std::optional<Eigen::Vector2d>& p) {
    if (!p) {
      out << ",,";
      return;
    }
    out << ',' << fmt("%.9f", p->x()) << ',' << fmt("%.9f", p->y());
  };
  for (const auto& f : frames) {
    out << fmt("%.9f", f.t_s);
    cell(f.head);
    cell(f.mid);
    if (with_tail) cell(f.tail);
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

std::vector<TrajectoryFrame> read_trajectory_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (true) {
    if (!next_line(in, line)) throw parse_error(line_no == 0 ? 1 : line_no, "missing header row");
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  const std::vector<std::string> base = {"t", "head_x", "head_y", "mid_x", "mid_y"};
  const std::vector<std::string> tail = {"tail_x", "tail_y"};
  bool with_tail = false;
  if (header.size() == base.size() + tail.size())
    with_tail = true;
  else if (header.size() != base.size())
    throw parse_error(line_no, "expected header t,head_x,head_y,mid_x,mid_y[,tail_x,tail_y]");
  for (std::size_t i = 0; i < base.size(); ++i)
    if (header[i] != base[i])
      throw parse_error(line_no, "expected column " + base[i] + ", got \"" + header[i] + "\"");
  if (with_tail)
    for (std::size_t i = 0; i < tail.size(); ++i)
      if (header[base.size() + i] != tail[i])
        throw parse_error(line_no,
                          "expected column " + tail[i] + ", got \"" + header[base.size() + i] + "\"");

  std::vector<TrajectoryFrame> frames;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size())
      throw parse_error(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
    TrajectoryFrame f;
    f.t_s = parse_number(fields[0], line_no, "t");
    auto point = [&](std::size_t ix, const char* wx,
                     const char* wy) -> std::optional<Eigen::Vector2d> {
      const bool bx = fields[ix].empty(), by = fields[ix + 1].empty();
      if (bx && by) return std::nullopt;
      if (bx || by)
        throw parse_error(line_no, std::string("half-tracked point: one of ") + wx + "/" + wy +
                                       " is blank");
      return Eigen::Vector2d(parse_number(fields[ix], line_no, wx),
                             parse_number(fields[ix + 1], line_no, wy));
    };
    f.head = point(1, "head_x", "head_y");
    f.mid = point(3, "mid_x", "mid_y");
    if (with_tail) f.tail = point(5, "tail_x", "tail_y");
    frames.push_back(std::move(f));
  }
  if (frames.empty()) throw parse_error(line_no + 1, "no data rows");
  return frames;
}

void write_events_jsonl(const std::string& path, const std::vector<SpikeEvent>& events,
                        const RecordingMeta& meta) {
  auto out = open_out(path);
  out << json{{"fingerprint", meta.fingerprint}, {"seed", meta.seed}}.dump() << '\n';
  for (const auto& e : events)
    out << json{{"t", e.t_s}, {"channel", e.channel}, {"peak_uv", e.peak_uv},
                {"polarity", e.polarity}}
               .dump()
        << '\n';
  if (!out) throw io_error("write failed: " + path);
}

std::vector<SpikeEvent> read_events_jsonl(const std::string& path) {
  auto in = open_in(path);
  std::vector<SpikeEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw parse_error(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (j.contains("fingerprint")) continue;
    try {
      SpikeEvent e;
      e.t_s = j.at("t").get<double>();
      e.channel = j.at("channel").get<int>();
      e.peak_uv = j.at("peak_uv").get<double>();
      e.polarity = j.at("polarity").get<int>();
      events.push_back(e);
    } catch (const json::exception& e) {
      throw parse_error(line_no, std::string("bad event record: ") + e.what());
    }
  }
  return events;
}

void write_sd_csv(const std::string& path, const std::vector<SDPoint>& points,
                  const RecordingMeta& meta) {
  auto out = open_out(path);
  out << "# neuromaps sd map\n";
  out << "# fingerprint=" << meta.fingerprint << " seed=" << meta.seed << "\n";
  out << "width_ms,threshold_vpp\n";
  for (const auto& p : points)
    out << fmt("%.6f", p.width_ms) << ',' << fmt("%.6f", p.threshold_vpp) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

std::vector<SDPoint> read_sd_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (true) {
    if (!next_line(in, line)) throw parse_error(line_no == 0 ? 1 : line_no, "missing header row");
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  if (header.size() != 2 || header[0] != "width_ms" || header[1] != "threshold_vpp")
    throw parse_error(line_no, "expected header width_ms,threshold_vpp");
  std::vector<SDPoint> points;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2)
      throw parse_error(line_no, "expected 2 fields, got " + std::to_string(fields.size()));
    points.push_back({parse_number(fields[0], line_no, "width_ms"),
                      parse_number(fields[1], line_no, "threshold_vpp")});
  }
  return points;
}

void write_sweep_csv(const std::string& path, const looper::SweepResult& sweep, int n_channels,
                     const RecordingMeta& meta) {
  auto out = open_out(path);
  out << "# neuromaps sweep\n";
  out << "# fingerprint=" << meta.fingerprint << " seed=" << meta.seed << "\n";
  out << "width_ms,amplitude_vpp,responded,charge_vs,mgf_spikes,lgf_spikes";
  for (int c = 1; c <= n_channels; ++c) out << ",events_ch" << c;
  for (int c = 1; c <= n_channels; ++c) out << ",peak_uv_ch" << c;
  out << ",min_htm_cm,n_contractions,cell_seed,error\n";
  for (const auto& cell : sweep.cells) {
    out << fmt("%.6f", cell.width_ms) << ',' << fmt("%.6f", cell.amplitude_vpp);
    if (cell.outcome) {
      const auto& o = *cell.outcome;
      out << ',' << (o.responded ? 1 : 0) << ',' << fmt("%.9f", cell.charge_vs) << ','
          << o.mgf_spikes << ',' << o.lgf_spikes;
      for (int c = 0; c < n_channels; ++c) {
        out << ',';
        if (c < static_cast<int>(o.events_per_channel.size())) out << o.events_per_channel[c];
      }
      for (int c = 0; c < n_channels; ++c) {
        out << ',';
        if (c < static_cast<int>(o.peak_uv_per_channel.size()))
          out << fmt("%.6f", o.peak_uv_per_channel[c]);
      }
      out << ',' << fmt("%.6f", o.min_htm_cm) << ',' << o.n_contractions;
    } else {
      out << ",,,,";
      for (int c = 0; c < 2 * n_channels; ++c) out << ',';
      out << ",,";
    }
    out << ',' << cell.cell_seed << ',' << csv_escape(cell.error) << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

void write_text_file(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw io_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("cannot read: " + path);
  return buf.str();
}

}  // namespace neuromaps::io
