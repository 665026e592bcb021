// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "rixskit/errors.hpp"

namespace rixs {

// Cubic position -> energy calibration of the dispersive spectrometer:
// energy(pos) = c0 + c1*pos + c2*pos^2 + c3*pos^3, strictly monotone over
// [pos_min, pos_max].
class DispersionCoeffs {
 public:
  DispersionCoeffs(double c0, double c1, double c2, double c3, double pos_min,
                   double pos_max)
      : c0_(c0), c1_(c1), c2_(c2), c3_(c3), pos_min_(pos_min),
        pos_max_(pos_max) {
    for (double v : {c0, c1, c2, c3, pos_min, pos_max})
      if (!std::isfinite(v))
        throw InvalidParameter("DispersionCoeffs: non-finite field");
    if (!(pos_max_ > pos_min_))
      throw InvalidParameter("DispersionCoeffs: pos_max must exceed pos_min");
    if (!strictly_monotone())
      throw InvalidParameter(
          "DispersionCoeffs: energy(pos) must be strictly monotone over the "
          "valid range");
  }

  double energy(double pos) const {
    return c0_ + pos * (c1_ + pos * (c2_ + pos * c3_));
  }
  double derivative(double pos) const {
    return c1_ + pos * (2.0 * c2_ + pos * 3.0 * c3_);
  }

  double c0() const { return c0_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double c3() const { return c3_; }
  double pos_min() const { return pos_min_; }
  double pos_max() const { return pos_max_; }

  // [lowest, highest] energy reachable over the valid range.
  std::pair<double, double> energy_range() const {
    double a = energy(pos_min_), b = energy(pos_max_);
    return {std::min(a, b), std::max(a, b)};
  }

 private:
  // The derivative is quadratic, so its extremum plus the two endpoints
  // bound its sign over the interval.
  bool strictly_monotone() const {
    double lo = derivative(pos_min_);
    double hi = derivative(pos_max_);
    double sign = lo > 0.0 ? 1.0 : -1.0;
    if (!(lo * sign > 0.0) || !(hi * sign > 0.0)) return false;
    if (c3_ != 0.0) {
      double vertex = -c2_ / (3.0 * c3_);
      if (vertex > pos_min_ && vertex < pos_max_ &&
          !(derivative(vertex) * sign > 0.0))
        return false;
    }
    return true;
  }

  double c0_, c1_, c2_, c3_;
  double pos_min_, pos_max_;
};

// Inverse of the calibration function: the unique root of energy(pos) = e
// in the valid range, by bisection (monotone, so always bracketed).
inline double position_of_energy(const DispersionCoeffs& d, double e) {
  auto [elo, ehi] = d.energy_range();
  if (!std::isfinite(e) || e < elo || e > ehi)
    throw OutOfRange("position_of_energy: energy " + std::to_string(e) +
                     " outside calibrated range [" + std::to_string(elo) +
                     ", " + std::to_string(ehi) + "]");
  double lo = d.pos_min(), hi = d.pos_max();
  bool rising = d.energy(hi) > d.energy(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    double mid = 0.5 * (lo + hi);
    bool below = d.energy(mid) < e;
    if (below == rising)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rixs
