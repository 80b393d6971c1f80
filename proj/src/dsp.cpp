#include "neuromaps/dsp.hpp"

#include <algorithm>
#include <cmath>

namespace neuromaps::dsp {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid) - 1, v.end());
  return 0.5 * (v[mid - 1] + hi);
}

// Steady-state filter state for a constant input equal to x0 (lfilter_zi).
struct BiquadState {
  double z1, z2;

  BiquadState(const Biquad& s, double x0) {
    const double y = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    z1 = (y - s.b0) * x0;
    z2 = (s.b2 - s.a2 * y) * x0;
  }
};

void run_section(const Biquad& s, double* x, Eigen::Index n) {
  BiquadState st(s, n > 0 ? x[0] : 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double in = x[i];
    const double y = s.b0 * in + st.z1;
    st.z1 = s.b1 * in - s.a1 * y + st.z2;
    st.z2 = s.b2 * in - s.a2 * y;
    x[i] = y;
  }
}

}  // namespace

std::vector<Biquad> design_lowpass(double cutoff_hz, int order, double sample_rate_hz) {
  if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate_hz / 2.0)
    throw error("lowpass cutoff must lie in (0, sample_rate/2)");
  if (order < 2 || order % 2 != 0) throw error("lowpass order must be even and >= 2");

  const double w0 = 2.0 * M_PI * cutoff_hz / sample_rate_hz;
  const double cw = std::cos(w0);
  const double sw = std::sin(w0);

  std::vector<Biquad> sections;
  for (int k = 0; k < order / 2; ++k) {
    const double q = 1.0 / (2.0 * std::cos((2 * k + 1) * M_PI / (2.0 * order)));
    const double alpha = sw / (2.0 * q);
    const double a0 = 1.0 + alpha;
    sections.push_back({(1.0 - cw) / 2.0 / a0, (1.0 - cw) / a0, (1.0 - cw) / 2.0 / a0,
                        -2.0 * cw / a0, (1.0 - alpha) / a0});
  }
  return sections;
}

Biquad design_notch(double center_hz, double q_factor, double sample_rate_hz) {
  if (!(center_hz > 0.0) || center_hz >= sample_rate_hz / 2.0)
    throw error("notch center must lie in (0, sample_rate/2)");
  if (!(q_factor > 0.0)) throw error("notch q_factor must be positive");

  const double w0 = 2.0 * M_PI * center_hz / sample_rate_hz;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * q_factor);
  const double a0 = 1.0 + alpha;
  return {1.0 / a0, -2.0 * cw / a0, 1.0 / a0, -2.0 * cw / a0, (1.0 - alpha) / a0};
}

Signal apply_cascade(const std::vector<Biquad>& sections, const Signal& x, bool zero_phase) {
  const Eigen::Index n = x.size();
  if (n == 0) return x;

  if (!zero_phase) {
    Signal y = x;
    for (const auto& s : sections) run_section(s, y.data(), n);
    return y;
  }

  const Eigen::Index padlen = 3 * (2 * static_cast<Eigen::Index>(sections.size()) + 1);
  if (n <= padlen) throw error("signal too short for zero-phase filtering");

  Signal ext(n + 2 * padlen);
  for (Eigen::Index i = 0; i < padlen; ++i) ext[i] = 2.0 * x[0] - x[padlen - i];
  ext.segment(padlen, n) = x;
  for (Eigen::Index i = 0; i < padlen; ++i)
    ext[padlen + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  for (const auto& s : sections) run_section(s, ext.data(), ext.size());
  ext.reverseInPlace();
  for (const auto& s : sections) run_section(s, ext.data(), ext.size());
  ext.reverseInPlace();

  return ext.segment(padlen, n);
}

Signal lowpass(const Signal& x, const FilterSpec& spec, double sample_rate_hz) {
  return apply_cascade(design_lowpass(spec.cutoff_hz, spec.order, sample_rate_hz), x,
                       spec.zero_phase);
}

Signal notch(const Signal& x, const FilterSpec& spec, double sample_rate_hz) {
  return apply_cascade({design_notch(spec.center_hz, spec.q_factor, sample_rate_hz)}, x,
                       spec.zero_phase);
}

std::vector<SpikeEvent> detect_spikes(const Signal& x, double sample_rate_hz, double t0_s,
                                      int channel, const DetectParams& params) {
  if (!(params.k_mad > 0.0)) throw error("k_mad must be positive");
  const Eigen::Index n = x.size();
  if (n < 3) return {};

  std::vector<double> buf(x.data(), x.data() + n);
  const double med = median_of(buf);
  for (auto& v : buf) v = std::abs(v - med);
  const double mad = median_of(std::move(buf));
  const double thr = params.k_mad * mad / 0.6745;

  const auto guard = static_cast<Eigen::Index>(std::ceil(params.edge_guard_s * sample_rate_hz));
  const Eigen::Index lo = std::max<Eigen::Index>(1, guard);
  const Eigen::Index hi = std::min(n - 2, n - 1 - guard);
  const double refractory_s = params.refractory_ms / 1000.0;

  std::vector<SpikeEvent> events;
  for (Eigen::Index i = lo; i <= hi; ++i) {
    const double d = x[i] - med;
    const bool is_max = d > thr && d > x[i - 1] - med && d > x[i + 1] - med;
    const bool is_min = d < -thr && d < x[i - 1] - med && d < x[i + 1] - med;
    if (!is_max && !is_min) continue;

    SpikeEvent ev{t0_s + static_cast<double>(i) / sample_rate_hz, channel, std::abs(d),
                  d > 0 ? +1 : -1};
    if (!events.empty() && ev.t_s - events.back().t_s < refractory_s) {
      if (ev.peak_uv > events.back().peak_uv) events.back() = ev;
    } else {
      events.push_back(ev);
    }
  }
  return events;
}

LatencyTable event_latencies(const std::vector<SpikeEvent>& events,
                             const std::vector<double>& stim_times_s, double period_s,
                             int n_channels) {
  LatencyTable table(stim_times_s.size(),
                     std::vector<std::optional<double>>(static_cast<std::size_t>(n_channels)));
  for (std::size_t k = 0; k < stim_times_s.size(); ++k) {
    const double t_pulse = stim_times_s[k];
    for (const auto& ev : events) {
      if (ev.channel < 1 || ev.channel > n_channels) continue;
      if (ev.t_s <= t_pulse || ev.t_s >= t_pulse + period_s) continue;
      auto& slot = table[k][static_cast<std::size_t>(ev.channel - 1)];
      if (!slot || ev.t_s - t_pulse < *slot) slot = ev.t_s - t_pulse;
    }
  }
  return table;
}

VelocityEstimate estimate_velocity(const std::vector<std::optional<double>>& latencies_s,
                                   const std::vector<double>& positions_cm) {
  if (latencies_s.size() != positions_cm.size())
    throw error("latencies and positions must align");

  std::vector<double> x, y;
  for (std::size_t i = 0; i < latencies_s.size(); ++i) {
    if (latencies_s[i]) {
      x.push_back(positions_cm[i]);
      y.push_back(*latencies_s[i]);
    }
  }
  const auto n = static_cast<int>(x.size());
  if (n < 2) throw error("insufficient channels");

  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[static_cast<std::size_t>(i)];
    my += y[static_cast<std::size_t>(i)];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[static_cast<std::size_t>(i)] - mx;
    const double dy = y[static_cast<std::size_t>(i)] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw error("non-finite velocity");
  const double slope = sxy / sxx;  // seconds per cm
  if (!(slope > 0.0) || !std::isfinite(slope)) throw error("non-finite velocity");

  VelocityEstimate est;
  est.velocity_m_per_s = 1.0 / (100.0 * slope);
  est.intercept_s = my - slope * mx;
  est.n_channels_used = n;
  const double ss_res = syy - slope * sxy;
  est.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return est;
}

}  // namespace neuromaps::dsp
