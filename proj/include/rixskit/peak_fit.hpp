// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rixskit/detector.hpp"
#include "rixskit/errors.hpp"
#include "rixskit/linalg.hpp"

namespace rixs {

struct PeakFit {
  double position = 0.0;      // px
  double position_err = 0.0;  // px
  double amplitude = 0.0;     // integrated counts of the fitted peak
  double fwhm = 0.0;          // px
  double goodness = 0.0;      // reduced chi-square; NaN = centroid fallback
};

namespace detail {

inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Counts collected by the unit-width pixel at integer position x from a
// Gaussian of area A centered at mu, plus a flat baseline b.
struct BinnedGaussian {
  double area, mu, sigma, base;

  double value(double x) const {
    double z1 = (x + 0.5 - mu) / sigma;
    double z2 = (x - 0.5 - mu) / sigma;
    return area * (normal_cdf(z1) - normal_cdf(z2)) + base;
  }

  // d(value)/d(area, mu, sigma, base)
  void gradient(double x, double g[4]) const {
    double z1 = (x + 0.5 - mu) / sigma;
    double z2 = (x - 0.5 - mu) / sigma;
    double p1 = normal_pdf(z1), p2 = normal_pdf(z2);
    g[0] = normal_cdf(z1) - normal_cdf(z2);
    g[1] = area * (p2 - p1) / sigma;
    g[2] = area * (z2 * p2 - z1 * p1) / sigma;
    g[3] = 1.0;
  }
};

struct TopHalf {
  std::size_t lo, hi;   // inclusive run of bins >= half the peak value
  double centroid;
  double fwhm_est;      // run length in px
};

inline TopHalf top_half_region(const std::vector<double>& y, std::size_t imax) {
  double half = 0.5 * y[imax];
  std::size_t lo = imax, hi = imax;
  while (lo > 0 && y[lo - 1] >= half) --lo;
  while (hi + 1 < y.size() && y[hi + 1] >= half) ++hi;
  double wsum = 0.0, xsum = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    wsum += y[i];
    xsum += double(i) * y[i];
  }
  return {lo, hi, wsum > 0.0 ? xsum / wsum : double(imax),
          double(hi - lo + 1)};
}

}  // namespace detail

// Locates the single peak of a frame: a binned-Gaussian least-squares fit
// (window +-4x the initial FWHM estimate, flat baseline) seeded by the
// centroid of the top-half region. If Levenberg-Marquardt fails to converge
// within 200 iterations the centroid itself is returned with goodness NaN.
inline PeakFit find_peak(const DetectorFrame& f) {
  const std::size_t n = f.pixels.size();
  if (n < 3) throw NoSignal("find_peak: frame too short");
  std::vector<double> y(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = double(f.pixels[i]);
    total += y[i];
  }
  if (total < 20.0)
    throw NoSignal("find_peak: " + std::to_string(std::uint64_t(total)) +
                   " total counts, need >= 20");

  std::size_t imax = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (y[i] > y[imax]) imax = i;

  auto top = detail::top_half_region(y, imax);
  auto radius = std::size_t(std::lround(4.0 * top.fwhm_est));
  std::size_t wlo = imax > radius ? imax - radius : 0;
  std::size_t whi = std::min(n - 1, imax + radius);

  double secondary = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if ((i < wlo || i > whi) && y[i] > secondary) secondary = y[i];
  if (secondary >= 0.6 * y[imax])
    throw AmbiguousPeak("find_peak: secondary maximum at " +
                        std::to_string(secondary) + " counts vs primary " +
                        std::to_string(y[imax]));

  const std::size_t m = whi - wlo + 1;
  auto fallback = [&] {
    PeakFit r;
    r.position = top.centroid;
    r.position_err = top.fwhm_est / std::sqrt(std::max(1.0, total));
    r.amplitude = total;
    r.fwhm = top.fwhm_est;
    r.goodness = std::numeric_limits<double>::quiet_NaN();
    return r;
  };
  if (m < 5) return fallback();

  double base0 = y[wlo];
  for (std::size_t i = wlo; i <= whi; ++i) base0 = std::min(base0, y[i]);
  double area0 = 0.0;
  for (std::size_t i = wlo; i <= whi; ++i) area0 += y[i] - base0;
  detail::BinnedGaussian fit{std::max(area0, 1.0), top.centroid,
                             std::max(top.fwhm_est / 2.3548, 0.3), base0};

  auto ssr_of = [&](const detail::BinnedGaussian& g) {
    double s = 0.0;
    for (std::size_t i = wlo; i <= whi; ++i) {
      double r = g.value(double(i)) - y[i];
      s += r * r;
    }
    return s;
  };

  double damping = 1e-3;
  double ssr = ssr_of(fit);
  bool converged = false;
  std::vector<double> jtj(16), jtr(4), step;
  for (int iter = 0; iter < 200 && !converged; ++iter) {
    std::fill(jtj.begin(), jtj.end(), 0.0);
    std::fill(jtr.begin(), jtr.end(), 0.0);
    double g[4];
    for (std::size_t i = wlo; i <= whi; ++i) {
      fit.gradient(double(i), g);
      double r = fit.value(double(i)) - y[i];
      for (int a = 0; a < 4; ++a) {
        jtr[std::size_t(a)] += g[a] * r;
        for (int b = 0; b < 4; ++b) jtj[std::size_t(a * 4 + b)] += g[a] * g[b];
      }
    }
    auto damped = jtj;
    for (int a = 0; a < 4; ++a)
      damped[std::size_t(a * 4 + a)] *= 1.0 + damping;
    if (!detail::solve_dense(damped, jtr, 4, step)) return fallback();
    detail::BinnedGaussian trial{fit.area - step[0], fit.mu - step[1],
                                 fit.sigma - step[2], fit.base - step[3]};
    trial.sigma = std::max(std::abs(trial.sigma), 0.02);
    double trial_ssr = ssr_of(trial);
    if (std::isfinite(trial_ssr) && trial_ssr <= ssr) {
      double rel = std::abs(step[1]) / std::max(1.0, std::abs(fit.mu)) +
                   std::abs(step[2]) / fit.sigma;
      fit = trial;
      if (ssr - trial_ssr <= 1e-14 * std::max(ssr, 1e-300) || rel < 1e-12)
        converged = true;
      ssr = trial_ssr;
      damping = std::max(damping * 0.3, 1e-12);
    } else {
      damping *= 10.0;
      if (damping > 1e12) break;
    }
  }
  if (!converged || fit.mu < double(wlo) - 0.5 || fit.mu > double(whi) + 0.5)
    return fallback();

  PeakFit out;
  out.position = fit.mu;
  out.amplitude = fit.area;
  out.fwhm = 2.0 * std::sqrt(2.0 * std::numbers::ln2) * fit.sigma;
  out.goodness = ssr / double(m - 4);
  std::fill(jtj.begin(), jtj.end(), 0.0);
  double g[4];
  for (std::size_t i = wlo; i <= whi; ++i) {
    fit.gradient(double(i), g);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) jtj[std::size_t(a * 4 + b)] += g[a] * g[b];
  }
  std::vector<double> cov;
  out.position_err = detail::invert_dense(jtj, 4, cov)
                         ? std::sqrt(std::max(0.0, out.goodness * cov[5]))
                         : 0.0;
  return out;
}

}  // namespace rixs
