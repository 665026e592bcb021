// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rixskit/grid.hpp"
#include "rixskit/lineshape.hpp"

namespace rixs {

enum class Lineshape { lorentzian, gaussian };

enum class ConvolveStatus { ok, kernel_under_resolved };

namespace detail {

// Kernel sampled on the grid step and renormalized to unit sum, so discrete
// convolution conserves summed intensity away from the edges. Tails extend
// 10x fwhm to each side.
inline std::vector<double> sampled_kernel(double fwhm, double step,
                                          Lineshape kind) {
  auto half = std::size_t(std::ceil(10.0 * fwhm / step));
  if (half < 1) half = 1;
  std::vector<double> k(2 * half + 1);
  double sum = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    double x = (double(j) - double(half)) * step;
    k[j] = kind == Lineshape::lorentzian ? lorentzian(x, 0.0, fwhm)
                                         : gaussian(x, 0.0, fwhm);
    sum += k[j];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Zero-padded discrete convolution of `v` with a unit-sum symmetric kernel.
inline std::vector<double> convolve_values(const std::vector<double>& v,
                                           double step, double fwhm,
                                           Lineshape kind) {
  auto kernel = sampled_kernel(fwhm, step, kind);
  auto half = std::ptrdiff_t(kernel.size() / 2);
  auto n = std::ptrdiff_t(v.size());
  std::vector<double> out(v.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    std::ptrdiff_t jlo = std::max<std::ptrdiff_t>(-half, i - n + 1);
    std::ptrdiff_t jhi = std::min<std::ptrdiff_t>(half, i);
    for (std::ptrdiff_t j = jlo; j <= jhi; ++j)
      acc += kernel[std::size_t(j + half)] * v[std::size_t(i - j)];
    out[std::size_t(i)] = acc;
  }
  return out;
}

}  // namespace detail

// Broadens a spectrum by a unit-area kernel of the given FWHM on its own
// grid. fwhm == 0 is the identity; fwhm below the grid step is computed but
// reported as under-resolved through `status`.
inline Spectrum convolve(const Spectrum& s, double kernel_fwhm, Lineshape kind,
                         ConvolveStatus* status = nullptr) {
  if (status) *status = ConvolveStatus::ok;
  if (!(kernel_fwhm >= 0.0) || !std::isfinite(kernel_fwhm))
    throw InvalidParameter("convolve: kernel_fwhm must be finite and >= 0");
  if (kernel_fwhm == 0.0) return s;
  if (kernel_fwhm < s.grid().step() && status)
    *status = ConvolveStatus::kernel_under_resolved;
  return Spectrum(s.grid(), detail::convolve_values(s.values(), s.grid().step(),
                                                    kernel_fwhm, kind));
}

// Linear resampling onto `target`; points outside the source range become 0.
// Resampling onto the identical grid returns the input unchanged.
inline Spectrum resample(const Spectrum& s, const EnergyGrid& target) {
  if (target == s.grid()) return s;
  std::vector<double> out(target.count());
  for (std::size_t i = 0; i < target.count(); ++i)
    out[i] = s.sample(target.point(i));
  return Spectrum(target, std::move(out));
}

}  // namespace rixs
