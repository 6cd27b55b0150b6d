#pragma once

// Counter-free deterministic random stream based on splitmix64. Streams
// can be split by index, so per-node work (theta grids, replicas) draws
// from independent substreams and results do not depend on thread count.

#include <cmath>
#include <cstdint>

namespace ucd {

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (one value per call, no cached state).
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  // Derived substream; deterministic function of (state, index).
  RngStream split(std::uint64_t index) const {
    RngStream mixer(state_ ^ (0xd1342543de82ef95ULL * (index + 1)));
    return RngStream(mixer.next_u64());
  }

 private:
  std::uint64_t state_;
};

}  // namespace ucd
