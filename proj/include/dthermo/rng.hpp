#pragma once

#include <cmath>
#include <cstdint>

// Counter-style seeded RNG used by the synthetic photon pipeline. Every
// (seed, slot, bin) tuple owns an independent generator, so draws do not
// depend on evaluation order and parallel runs reproduce serial ones.
namespace dthermo::rng {

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in (0, 1); never returns 0 so log() is safe
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }
};

// combine a base seed with stream coordinates
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  SplitMix64 g(seed ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xc2b2ae3d27d4eb4fULL));
  g.next();
  return g.next();
}

inline double normal(SplitMix64& g) {
  // Box-Muller, one branch used per call
  double u1 = g.uniform();
  double u2 = g.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

namespace detail {

// Knuth multiplication method, exact for small means
inline std::uint64_t poisson_knuth(SplitMix64& g, double lambda) {
  const double limit = std::exp(-lambda);
  std::uint64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= g.uniform();
  } while (p > limit);
  return k - 1;
}

// Hormann's PTRS transformed-rejection sampler, exact for lambda >~ 10
inline std::uint64_t poisson_ptrs(SplitMix64& g, double lambda) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = g.uniform() - 0.5;
    double v = g.uniform();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        kf * loglam - lambda - std::lgamma(kf + 1.0)) {
      return static_cast<std::uint64_t>(kf);
    }
  }
}

}  // namespace detail

// Poisson sampler: exact up to lambda = 1e5, Gaussian tail above (relative
// error there is < 1e-3 of the standard deviation, far below anything the
// count statistics in this package resolve).
inline std::uint64_t poisson(SplitMix64& g, double lambda) {
  if (lambda <= 0.0) return 0;
  if (lambda < 10.0) return detail::poisson_knuth(g, lambda);
  if (lambda <= 1e5) return detail::poisson_ptrs(g, lambda);
  double k = std::round(lambda + std::sqrt(lambda) * normal(g));
  return k < 0.0 ? 0 : static_cast<std::uint64_t>(k);
}

}  // namespace dthermo::rng
