#pragma once

#include <cmath>
#include <cstdint>

namespace hyq {

/// Counter-based random stream keyed by (seed, path, step). Streams are
/// stateless functions of the key plus a local draw counter, so paths and
/// steps can be generated in any order (or in parallel) with bit-identical
/// results. Mixing is the splitmix64 finalizer over the keyed counter.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
    key_ = mix(mix(mix(0x9e3779b97f4a7c15ull ^ seed) + path) + step);
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

  /// Uniform on (0, 1), never returning an exact endpoint.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (explicit formulas, platform independent).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 6.283185307179586476925286766559 * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Poisson count by multiplicative inversion; large means are split into
  /// chunks (<= 25) and summed, which is exact by Poisson additivity.
  int poisson(double mean) {
    int total = 0;
    while (mean > 25.0) {
      total += poisson_small(25.0);
      mean -= 25.0;
    }
    return total + poisson_small(mean);
  }

 private:
  int poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double p = uniform();
    while (p > limit) {
      ++k;
      p *= uniform();
    }
    return k;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hyq
