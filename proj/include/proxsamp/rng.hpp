// Deterministic random streams. The sampler contract requires bit-identical
// trajectories per seed and one independent stream per chain, so we carry our
// own generator instead of the implementation-defined std distributions.
#pragma once

#include <cstdint>
#include <cmath>
#include <cstddef>
#include <vector>

namespace proxsamp {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace detail

// xoshiro256++ with splitmix64 seeding; streams are derived from
// (seed, stream id) so chains can be advanced independently.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t sm = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    for (auto& w : s_) w = detail::splitmix64(sm);
    has_spare_ = false;
    spare_ = 0.0;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method (cached spare).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  std::uint64_t s_[4];
  bool has_spare_;
  double spare_;
};

// One splittable stream per chain, all derived from the run seed.
class ChainRngPool {
 public:
  ChainRngPool(std::uint64_t seed, std::size_t chains) {
    streams_.reserve(chains);
    for (std::size_t c = 0; c < chains; ++c) streams_.emplace_back(seed, c);
  }
  Rng& stream(std::size_t chain) { return streams_[chain]; }
  std::size_t size() const { return streams_.size(); }

 private:
  std::vector<Rng> streams_;
};

}  // namespace proxsamp
