#include "neuromaps/rng.hpp"

#include <cmath>
#include <cstring>

namespace neuromaps::rng {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t cell_seed(std::uint64_t master_seed, double width_ms, double amplitude_vpp) {
  std::uint64_t h = fnv1a(&master_seed, sizeof master_seed);
  std::uint64_t bits = 0;
  std::memcpy(&bits, &width_ms, sizeof bits);
  h = fnv1a(&bits, sizeof bits, h);
  std::memcpy(&bits, &amplitude_vpp, sizeof bits);
  h = fnv1a(&bits, sizeof bits, h);
  return h;
}

double Gaussian::uniform01() {
  // 53 random bits into (0, 1]; never returns 0, so log() below is safe.
  return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
}

double Gaussian::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace neuromaps::rng
