// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rixskit/detector.hpp"
#include "rixskit/dispersion.hpp"
#include "rixskit/errors.hpp"
#include "rixskit/grid.hpp"
#include "rixskit/linalg.hpp"

namespace rixs {

struct CalibrationPoint {
  double position;  // px
  double energy;    // eV
};

struct CalibrationResult {
  DispersionCoeffs coeffs;
  std::vector<double> residuals;  // energy residual per input point, eV
  double rms_residual_eV;
};

// Ordinary least-squares cubic through (position, energy) points. Solved via
// normal equations with positions centered and scaled to [-1, 1] for
// conditioning, then transformed back. Points are processed in position
// order internally, so the result is invariant under input reordering.
inline CalibrationResult fit_dispersion(
    const std::vector<CalibrationPoint>& points) {
  if (points.size() < 5)
    throw Underdetermined("fit_dispersion: need >= 5 points, got " +
                          std::to_string(points.size()));
  for (const auto& p : points)
    if (!std::isfinite(p.position) || !std::isfinite(p.energy))
      throw InvalidParameter("fit_dispersion: non-finite point");

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].position < points[b].position;
  });
  double pmin = points[order.front()].position;
  double pmax = points[order.back()].position;
  for (std::size_t k = 1; k < order.size(); ++k)
    if (!(points[order[k]].position - points[order[k - 1]].position >
          1e-9 * std::max(1.0, pmax - pmin)))
      throw InvalidParameter("fit_dispersion: positions must be distinct");

  const double center = 0.5 * (pmin + pmax);
  const double half = 0.5 * (pmax - pmin);
  double moment[7] = {0, 0, 0, 0, 0, 0, 0};
  double rhs4[4] = {0, 0, 0, 0};
  for (std::size_t k : order) {
    double t = (points[k].position - center) / half;
    double tp = 1.0;
    for (int j = 0; j <= 6; ++j) {
      moment[j] += tp;
      if (j <= 3) rhs4[j] += points[k].energy * tp;
      tp *= t;
    }
  }
  std::vector<double> a(16), rhs(4), scaled;
  for (int r = 0; r < 4; ++r) {
    rhs[std::size_t(r)] = rhs4[r];
    for (int c = 0; c < 4; ++c) a[std::size_t(r * 4 + c)] = moment[r + c];
  }
  if (!detail::solve_dense(a, rhs, 4, scaled))
    throw CalibrationFailed("fit_dispersion: singular normal equations");

  // De-scale: E = sum_j a_j ((p - center)/half)^j expanded in powers of p.
  double b0 = scaled[0];
  double b1 = scaled[1] / half;
  double b2 = scaled[2] / (half * half);
  double b3 = scaled[3] / (half * half * half);
  double c3 = b3;
  double c2 = b2 - 3.0 * b3 * center;
  double c1 = b1 - 2.0 * b2 * center + 3.0 * b3 * center * center;
  double c0 = b0 - b1 * center + b2 * center * center -
              b3 * center * center * center;

  try {
    DispersionCoeffs coeffs(c0, c1, c2, c3, pmin, pmax);
    std::vector<double> residuals(points.size());
    double ss = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
      residuals[k] = points[k].energy - coeffs.energy(points[k].position);
      ss += residuals[k] * residuals[k];
    }
    return {std::move(coeffs), std::move(residuals),
            std::sqrt(ss / double(points.size()))};
  } catch (const InvalidParameter& e) {
    throw CalibrationFailed(
        std::string("fit_dispersion: fitted polynomial is not monotone "
                    "over the input hull: ") +
        e.what());
  }
}

// Converts a count frame into an energy spectrum: counts at pixel i become
// a density counts/|dE/dpos| at energy(i), then the density polyline is
// resampled onto the target grid (0 outside the covered span).
inline Spectrum frame_to_spectrum(const DetectorFrame& f,
                                  const DispersionCoeffs& d,
                                  const EnergyGrid& target) {
  std::vector<double> energies, densities;
  energies.reserve(f.pixels.size());
  densities.reserve(f.pixels.size());
  for (std::size_t i = 0; i < f.pixels.size(); ++i) {
    double pos = double(i);
    if (pos < d.pos_min() || pos > d.pos_max()) continue;
    double jac = std::abs(d.derivative(pos));
    energies.push_back(d.energy(pos));
    densities.push_back(double(f.pixels[i]) / jac);
  }
  if (energies.size() < 2)
    throw OutOfRange("frame_to_spectrum: fewer than 2 pixels inside the "
                     "calibrated range");
  if (energies.front() > energies.back()) {
    std::reverse(energies.begin(), energies.end());
    std::reverse(densities.begin(), densities.end());
  }
  if (target.back() < energies.front() || target.start() > energies.back())
    throw OutOfRange("frame_to_spectrum: target grid entirely outside the "
                     "calibrated energy span");
  std::vector<double> out(target.count(), 0.0);
  for (std::size_t k = 0; k < target.count(); ++k) {
    double e = target.point(k);
    if (e < energies.front() || e > energies.back()) continue;
    auto it = std::upper_bound(energies.begin(), energies.end(), e);
    if (it == energies.begin()) {
      out[k] = densities.front();
      continue;
    }
    auto hi = std::size_t(it - energies.begin());
    if (hi >= energies.size()) {
      out[k] = densities.back();
      continue;
    }
    auto lo = hi - 1;
    double frac = (e - energies[lo]) / (energies[hi] - energies[lo]);
    out[k] = densities[lo] + frac * (densities[hi] - densities[lo]);
  }
  return Spectrum(target, std::move(out));
}

}  // namespace rixs
