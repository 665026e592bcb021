// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "rixskit/errors.hpp"
#include "rixskit/grid.hpp"

namespace rixs {

// Parameters of the generalized Kramers-Heisenberg kernel linking an XAS
// profile to off-resonant emission at fixed incident energy w1. E is the
// photoelectron-scale absorption energy, measured from the initial-state
// ionization threshold.
struct ReconstructionParams {
  double e_i = 0.0;      // initial-state (2p) binding energy, eV
  double e_f = 0.0;      // final-state (3d) binding energy, eV
  double gamma_i = 0.0;  // initial-state FWHM, eV
  double w1 = 0.0;       // fixed incident energy, eV

  void validate() const {
    if (!std::isfinite(e_i) || !std::isfinite(e_f) || !std::isfinite(gamma_i) ||
        !std::isfinite(w1))
      throw InvalidParameter("reconstruction parameters must be finite");
    if (!(gamma_i > 0.0)) throw InvalidParameter("gamma_i must be > 0");
    if (!(e_i > e_f) || !(e_f > 0.0))
      throw InvalidParameter("binding energies must satisfy e_i > e_f > 0");
    if (!(w1 > 0.0)) throw InvalidParameter("w1 must be > 0");
  }

  // True when w1 sits safely below the ionization threshold; callers warn
  // (not fail) otherwise.
  bool off_resonant(double margin_gammas = 3.0) const {
    return w1 < e_i - margin_gammas * gamma_i;
  }
};

inline double kernel_weight(double E, const ReconstructionParams& p,
                            double w2) {
  p.validate();
  double det = E + p.e_i - p.w1;
  return (w2 / p.w1) * (p.e_i - p.e_f) * (E + p.e_i) /
         (det * det + 0.25 * p.gamma_i * p.gamma_i);
}

// Emission predicted from an absorption profile: the energy-conservation
// delta pairs each emission energy with exactly one absorption energy
// E* = w1 - e_f - w2.
inline Spectrum heros_forward(const Spectrum& xas,
                              const ReconstructionParams& p,
                              const EnergyGrid& emission) {
  p.validate();
  std::vector<double> out(emission.count());
  for (std::size_t j = 0; j < emission.count(); ++j) {
    double w2 = emission.point(j);
    double estar = p.w1 - p.e_f - w2;
    double w = kernel_weight(estar, p, w2);
    out[j] = w > 0.0 ? w * xas.sample(estar) : 0.0;
  }
  return Spectrum(emission, std::move(out));
}

struct XasReconstruction {
  Spectrum xas;
  // Per-bin noise amplification, min-normalized to 1; infinity on bins where
  // the kernel weight fell below the floor and the value was zeroed.
  std::vector<double> condition_number;
  std::vector<bool> flagged;
};

// Pointwise algebraic inversion of heros_forward: each absorption energy E
// maps back to one emission energy w2* = w1 - e_f - E. Bins whose kernel
// weight falls below 1e-12 x (max weight on the grid) are zeroed and
// flagged rather than amplified.
inline XasReconstruction reconstruct_xas(const Spectrum& xes,
                                         const ReconstructionParams& p,
                                         const EnergyGrid& e_grid) {
  p.validate();
  for (double v : xes.values())
    if (v < 0.0)
      throw InvalidParameter("reconstruct_xas: emission input must be "
                             "non-negative");
  const std::size_t n = e_grid.count();
  std::vector<double> w2s(n), weights(n);
  double wmax = 0.0;
  bool any_inside = false;
  for (std::size_t k = 0; k < n; ++k) {
    double E = e_grid.point(k);
    w2s[k] = p.w1 - p.e_f - E;
    weights[k] = kernel_weight(E, p, w2s[k]);
    wmax = std::max(wmax, weights[k]);
    any_inside = any_inside || xes.grid().contains(w2s[k]);
  }
  if (!any_inside)
    throw OutOfRange("reconstruct_xas: every requested absorption energy "
                     "maps outside the emission spectrum");
  const double floor_w = 1e-12 * wmax;
  XasReconstruction r{Spectrum(e_grid, std::vector<double>(n, 0.0)),
                      std::vector<double>(n), std::vector<bool>(n, false)};
  std::vector<double> values(n, 0.0);
  double cmin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    if (!(weights[k] >= floor_w) || !(floor_w > 0.0)) {
      r.flagged[k] = true;
      r.condition_number[k] = std::numeric_limits<double>::infinity();
      continue;
    }
    values[k] = xes.sample(w2s[k]) / weights[k];
    r.condition_number[k] = 1.0 / weights[k];
    cmin = std::min(cmin, r.condition_number[k]);
  }
  if (std::isfinite(cmin) && cmin > 0.0)
    for (auto& c : r.condition_number)
      if (std::isfinite(c)) c /= cmin;
  r.xas = Spectrum(e_grid, std::move(values));
  return r;
}

}  // namespace rixs
