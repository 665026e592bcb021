// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "rixskit/errors.hpp"

namespace rixs {

namespace detail {

// splitmix64 finalizer; used both for seed scrambling and for deriving
// per-frame child streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Independent stream for frame `index` of a scan seeded with `parent`.
// Deterministic, collision-resistant enough for the small index ranges here.
inline std::uint64_t child_seed(std::uint64_t parent, std::uint64_t index) {
  return detail::splitmix64(detail::splitmix64(parent) ^
                            detail::splitmix64(index + 0x51ed2701a9e35b1fULL));
}

// Counting RNG with a fully specified engine so that streams are identical
// across platforms and standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(detail::splitmix64(seed)) {}

  // Uniform in [0, 1) with 53 random bits; avoids the distribution classes,
  // whose outputs are implementation-defined.
  double uniform() {
    return double(eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    // Marsaglia polar method; consumes a variable but deterministic number
    // of uniforms.
    for (;;) {
      double u = 2.0 * uniform() - 1.0;
      double v = 2.0 * uniform() - 1.0;
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  // Poisson sample. Inversion by sequential search below lambda = 10,
  // Hormann's PTRS transformed rejection above; both use only uniform()
  // so results are reproducible everywhere.
  std::uint64_t poisson(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw InvalidParameter("poisson: lambda must be finite and >= 0");
    if (lambda == 0.0) return 0;
    if (lambda < 10.0) return poisson_inversion(lambda);
    return poisson_ptrs(lambda);
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::uint64_t poisson_inversion(double lambda) {
    double p = std::exp(-lambda);
    double cdf = p;
    double u = uniform();
    std::uint64_t k = 0;
    while (u > cdf) {
      ++k;
      p *= lambda / double(k);
      cdf += p;
      if (k > 2000) break;  // numerically impossible for lambda < 10
    }
    return k;
  }

  std::uint64_t poisson_ptrs(double lambda) {
    // W. Hormann, "The transformed rejection method for generating Poisson
    // random variables" (PTRS).
    const double slam = std::sqrt(lambda);
    const double llam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      double u = uniform() - 0.5;
      double v = uniform();
      double us = 0.5 - std::abs(u);
      double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
      if (us >= 0.07 && v <= vr) return std::uint64_t(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
          kf * llam - lambda - std::lgamma(kf + 1.0)) {
        return std::uint64_t(kf);
      }
    }
  }

  std::mt19937_64 eng_;
};

}  // namespace rixs
