#pragma once

#include <cstdint>
#include <random>

namespace neuromaps::rng {

// splitmix64; used to derive independent stream seeds from one master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) ^ splitmix64(tag));
}

constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001B3ull;

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = kFnvOffset);

// Per-cell seed for sweep grids: hash(master_seed, width, amplitude) over the
// raw double bit patterns, so cells are schedule-independent.
std::uint64_t cell_seed(std::uint64_t master_seed, double width_ms, double amplitude_vpp);

// Standard-normal generator: mt19937_64 + Box-Muller. std::normal_distribution
// is not algorithm-pinned by the standard; this one is reproducible anywhere
// the same libm rounds the same way.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : eng_(seed) {}

  double operator()();

 private:
  double uniform01();  // in (0, 1]

  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace neuromaps::rng
