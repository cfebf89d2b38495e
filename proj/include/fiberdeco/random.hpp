#pragma once

#include <cstdint>
#include <random>

#include "fiberdeco/polarization.hpp"

namespace fiberdeco {

// Deterministic, portable randomness. The engine is std::mt19937_64 (its
// output stream is specified by the standard, so seeds reproduce across
// platforms); distributions are hand-rolled because the standard library
// distributions are not portable across implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(two_pi_ * u2);
    have_spare_ = true;
    return r * std::cos(two_pi_ * u2);
  }

  /// Uniform point on the unit sphere (Marsaglia 1972 rejection method).
  Stokesd unit_sphere() {
    for (;;) {
      const double x1 = uniform(-1.0, 1.0);
      const double x2 = uniform(-1.0, 1.0);
      const double s = x1 * x1 + x2 * x2;
      if (s >= 1.0 || s == 0.0) continue;
      const double f = 2.0 * std::sqrt(1.0 - s);
      return Stokesd(x1 * f, x2 * f, 1.0 - 2.0 * s);
    }
  }

  /// Jones vector uniform on the Poincaré sphere.
  Jonesd jones() { return jones_from_poincare<double>(unit_sphere()); }

  std::uint64_t raw() { return engine_(); }

 private:
  static constexpr double two_pi_ = 6.283185307179586476925286766559;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fiberdeco
