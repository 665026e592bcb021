// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>

#include "rixskit/errors.hpp"

namespace rixs {

// Unit-normalized Lorentzian density (1/eV) with full width at half maximum
// `fwhm`: (fwhm/2pi) / ((x-center)^2 + fwhm^2/4).
inline double lorentzian(double x, double center, double fwhm) {
  if (!(fwhm > 0.0)) throw InvalidParameter("lorentzian: fwhm must be > 0");
  double d = x - center;
  return (fwhm / (2.0 * std::numbers::pi)) / (d * d + 0.25 * fwhm * fwhm);
}

// Unit-normalized Gaussian density (1/eV) with the given FWHM.
inline double gaussian(double x, double center, double fwhm) {
  if (!(fwhm > 0.0)) throw InvalidParameter("gaussian: fwhm must be > 0");
  static constexpr double four_ln2 = 4.0 * std::numbers::ln2;
  double d = x - center;
  double peak = 2.0 * std::sqrt(std::numbers::ln2 / std::numbers::pi) / fwhm;
  return peak * std::exp(-four_ln2 * d * d / (fwhm * fwhm));
}

}  // namespace rixs
