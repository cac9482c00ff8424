#pragma once

#include <cmath>
#include <cstdint>

namespace zerostats {

// Seedable, splittable random stream (xoshiro256++ seeded through splitmix64).
// Gaussian draws use the Marsaglia polar method with a cached spare, so a
// stream is fully deterministic given (seed) or (seed, stream_index).
// Every sampling operation in the library takes one of these explicitly.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) { seed_state(seed); }

  // Independent stream derived from (seed, index); used to hand one stream
  // to each Monte-Carlo worker.
  static RngStream derive(std::uint64_t seed, std::uint64_t index) {
    RngStream r(seed ^ (0x9e3779b97f4a7c15ULL + index * 0xbf58476d1ce4e5b9ULL));
    // decorrelate nearby indices
    for (int i = 0; i < 4; ++i) r.next_u64();
    return r;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in (0,1), 53-bit resolution, never exactly 0.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform in (-1,1).
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  // Standard normal draw.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, r2;
    do {
      u = uniform_pm1();
      v = uniform_pm1();
      r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r2) / r2);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  void seed_state(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) {
      // splitmix64
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      s = z ^ (z >> 31);
    }
  }

  std::uint64_t s_[4]{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace zerostats
