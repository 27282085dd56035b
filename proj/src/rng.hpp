#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace uwb::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// mt19937_64 engine output is specified by the standard; the std::
// distributions are not, so the draws here are hand-rolled to keep
// generated datasets reproducible across toolchains.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t uniform_int(std::uint64_t n) {  // [0, n), unbiased
    const std::uint64_t bound = n * (UINT64_MAX / n);
    std::uint64_t x = engine_();
    while (x >= bound) x = engine_();
    return x % n;
  }

  double normal() {  // Box-Muller, pairs cached
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace uwb::detail
