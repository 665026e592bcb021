// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rixskit/errors.hpp"
#include "rixskit/grid.hpp"
#include "rixskit/spectrum_ops.hpp"

namespace rixs {

enum class PeakClass { resonant, fluorescence, merged };

inline const char* peak_class_name(PeakClass c) {
  switch (c) {
    case PeakClass::resonant: return "resonant";
    case PeakClass::fluorescence: return "fluorescence";
    default: return "merged";
  }
}

struct TrackedPeak {
  double emission;  // eV, parabola-refined
  double height;
  PeakClass cls;
};

// Per incident-grid row: the retained emission peaks of that row.
struct PeakTracks {
  EnergyGrid incident;
  std::vector<std::vector<TrackedPeak>> rows;
};

namespace detail {

// Shared accumulation path for tfy and herfd so that the full-window herfd
// is bitwise identical to tfy.
inline Spectrum window_sum(const RixsMap& m, std::size_t jlo, std::size_t jhi) {
  std::vector<double> out(m.incident().count());
  for (std::size_t i = 0; i < m.incident().count(); ++i) {
    double acc = 0.0;
    auto row = m.row(i);
    for (std::size_t j = jlo; j <= jhi; ++j) acc += row[j];
    out[i] = acc * m.emission().step();
  }
  return Spectrum(m.incident(), std::move(out));
}

}  // namespace detail

// Sums rows whose incident energies fall in the same coarser bin; the new
// bin centers sit at the mean of their constituents for integer ratios.
// Total intensity is conserved exactly.
inline RixsMap rebin_incident(const RixsMap& m, double step) {
  const auto& inc = m.incident();
  if (!std::isfinite(step) || step < inc.step())
    throw InvalidParameter("rebin_incident: step must be >= the current step");
  const std::size_t ne = m.emission().count();
  const std::size_t ni = inc.count();
  auto bin_of = [&](std::size_t i) {
    return std::size_t(std::floor(double(i) * inc.step() / step + 1e-9));
  };
  std::size_t nbins = bin_of(ni - 1) + 1;
  if (nbins < 2)
    throw InvalidParameter("rebin_incident: step leaves fewer than 2 rows");
  std::vector<double> cells(nbins * ne, 0.0);
  for (std::size_t i = 0; i < ni; ++i) {
    auto k = bin_of(i);
    auto row = m.row(i);
    for (std::size_t j = 0; j < ne; ++j) cells[k * ne + j] += row[j];
  }
  EnergyGrid grid(inc.start() + 0.5 * (step - inc.step()), step, nbins);
  return RixsMap(grid, m.emission(), std::move(cells));
}

// Total fluorescence yield: full emission integral per incident energy.
inline Spectrum tfy(const RixsMap& m) {
  return detail::window_sum(m, 0, m.emission().count() - 1);
}

// Partial yield over a narrow emission window; membership by bin center.
inline Spectrum herfd(const RixsMap& m, double window_low, double window_high) {
  if (!std::isfinite(window_low) || !std::isfinite(window_high) ||
      !(window_low < window_high))
    throw InvalidParameter("herfd: window must satisfy low < high");
  const auto& em = m.emission();
  double lo = (window_low - em.start()) / em.step();
  double hi = (window_high - em.start()) / em.step();
  double jlo = std::ceil(lo - 1e-9);
  double jhi = std::floor(hi + 1e-9);
  if (jhi < 0.0 || jlo > double(em.count() - 1) || jhi < jlo)
    throw EmptyWindow("herfd: no emission bin centers inside [" +
                      std::to_string(window_low) + ", " +
                      std::to_string(window_high) + "]");
  auto a = std::size_t(std::max(0.0, jlo));
  auto b = std::size_t(std::min(double(em.count() - 1), jhi));
  return detail::window_sum(m, a, b);
}

// Emission spectrum at the incident grid point nearest w1 (ties -> lower).
inline Spectrum xes_cut(const RixsMap& m, double w1) {
  if (!std::isfinite(w1) || !m.incident().contains(w1))
    throw OutOfRange("xes_cut: incident energy " + std::to_string(w1) +
                     " outside the map range");
  return m.row_spectrum(m.incident().nearest(w1));
}

// Regrids each row from emission energy onto energy transfer t = w1 - w2.
// Reversing w2 gives an ascending uniform transfer axis per row, which is
// then linearly resampled onto the requested grid.
inline EnergyTransferMap to_energy_transfer(const RixsMap& m,
                                            const EnergyGrid& transfer) {
  const auto& em = m.emission();
  const std::size_t ne = em.count();
  std::vector<double> cells(m.incident().count() * transfer.count());
  std::vector<double> reversed(ne);
  for (std::size_t i = 0; i < m.incident().count(); ++i) {
    double w1 = m.incident().point(i);
    auto row = m.row(i);
    for (std::size_t j = 0; j < ne; ++j) reversed[j] = row[ne - 1 - j];
    Spectrum s(EnergyGrid(w1 - em.back(), em.step(), ne), reversed);
    Spectrum r = resample(s, transfer);
    std::copy(r.values().begin(), r.values().end(),
              cells.begin() + std::ptrdiff_t(i * transfer.count()));
  }
  return EnergyTransferMap(m.incident(), transfer, std::move(cells));
}

namespace detail {

struct RawPeak {
  double emission;
  double height;
};

// Strict interior local maxima above the row threshold, refined by a local
// parabola through the three bins around each maximum.
inline std::vector<RawPeak> row_peaks(std::span<const double> row,
                                      const EnergyGrid& em,
                                      double min_rel_height) {
  double vmax = 0.0;
  for (double v : row) vmax = std::max(vmax, v);
  std::vector<RawPeak> out;
  if (!(vmax > 0.0)) return out;
  double floor_v = min_rel_height * vmax;
  for (std::size_t j = 1; j + 1 < row.size(); ++j) {
    if (!(row[j] > row[j - 1]) || !(row[j] > row[j + 1])) continue;
    if (row[j] < floor_v) continue;
    double denom = row[j - 1] - 2.0 * row[j] + row[j + 1];
    double dx = denom < 0.0 ? 0.5 * (row[j - 1] - row[j + 1]) / denom : 0.0;
    dx = std::clamp(dx, -0.5, 0.5);
    out.push_back({em.point(j) + dx * em.step(),
                   row[j] - 0.25 * (row[j - 1] - row[j + 1]) * dx});
  }
  return out;
}

// Peaks closer than this (eV) in adjacent rows are treated as the same
// feature when measuring how a peak moves with incident energy.
inline constexpr double track_match_radius_ev = 6.0;

}  // namespace detail

// Finds every emission peak per row and classifies it by how its position
// moves with incident energy over a +-3 row window: a slope near 0 is the
// fixed fluorescence line, near 1 the dispersing resonant line, anything
// in between (or untrackable) is a merged feature.
inline PeakTracks track_peaks(const RixsMap& m, double min_rel_height = 0.10) {
  if (!(min_rel_height > 0.0) || !(min_rel_height < 1.0))
    throw InvalidParameter("track_peaks: min_rel_height must be in (0, 1)");
  const std::size_t ni = m.incident().count();
  std::vector<std::vector<detail::RawPeak>> raw(ni);
  for (std::size_t i = 0; i < ni; ++i)
    raw[i] = detail::row_peaks(m.row(i), m.emission(), min_rel_height);

  PeakTracks tracks{m.incident(), std::vector<std::vector<TrackedPeak>>(ni)};
  for (std::size_t i = 0; i < ni; ++i) {
    std::vector<TrackedPeak> classified;
    for (const auto& pk : raw[i]) {
      std::size_t rlo = i >= 3 ? i - 3 : 0;
      std::size_t rhi = std::min(ni - 1, i + 3);
      double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t r = rlo; r <= rhi; ++r) {
        const detail::RawPeak* best = nullptr;
        double best_d = detail::track_match_radius_ev;
        for (const auto& q : raw[r]) {
          double dist = std::abs(q.emission - pk.emission);
          if (dist < best_d) {
            best_d = dist;
            best = &q;
          }
        }
        if (!best) continue;
        double x = m.incident().point(r), y = best->emission;
        sw += 1.0;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      PeakClass cls = PeakClass::merged;
      double det = sw * sxx - sx * sx;
      if (sw >= 3.0 && det > 0.0) {
        double slope = (sw * sxy - sx * sy) / det;
        if (std::abs(slope) <= 0.2)
          cls = PeakClass::fluorescence;
        else if (slope >= 0.8)
          cls = PeakClass::resonant;
      }
      classified.push_back({pk.emission, pk.height, cls});
    }
    // At most one fluorescence peak per row: keep the tallest, demote rest.
    const TrackedPeak* tallest = nullptr;
    for (const auto& p : classified)
      if (p.cls == PeakClass::fluorescence &&
          (!tallest || p.height > tallest->height))
        tallest = &p;
    for (auto& p : classified)
      if (p.cls == PeakClass::fluorescence && &p != tallest)
        p.cls = PeakClass::merged;
    tracks.rows[i] = std::move(classified);
  }
  return tracks;
}

// ---- white-line measurement ----

struct WhiteLineStats {
  double peak_energy;   // parabola-refined position of the global maximum
  double peak_height;
  double fwhm;          // width at half height above per-side baselines
  double centroid;      // intensity-weighted centroid of the top-half region
};

// Width of the dominant peak at half its height above the local baseline,
// with separate left/right baselines so a peak sitting on an edge step is
// measured sensibly; crossings are sub-bin by linear interpolation.
inline WhiteLineStats white_line_stats(const Spectrum& s) {
  const std::size_t n = s.size();
  if (n < 5) throw InvalidParameter("white_line_stats: spectrum too short");
  std::size_t imax = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (s[i] > s[imax]) imax = i;
  double peak = s[imax];
  if (!(peak > 0.0))
    throw NoSignal("white_line_stats: no positive maximum");

  std::size_t nb = std::max<std::size_t>(3, n / 20);
  double bl = 0.0, br = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    bl += s[i];
    br += s[n - 1 - i];
  }
  bl /= double(nb);
  br /= double(nb);

  auto crossing = [&](double half, bool left) {
    std::size_t i = imax;
    while (true) {
      std::size_t next = left ? i - 1 : i + 1;
      if ((left && i == 0) || (!left && i == n - 1))
        return s.grid().point(i);
      if (s[next] <= half) {
        double frac = (s[i] - half) / (s[i] - s[next]);
        double dir = left ? -1.0 : 1.0;
        return s.grid().point(i) + dir * frac * s.grid().step();
      }
      i = next;
    }
  };
  double left = crossing(bl + 0.5 * (peak - bl), true);
  double right = crossing(br + 0.5 * (peak - br), false);

  double dx = 0.0;
  if (imax > 0 && imax + 1 < n) {
    double denom = s[imax - 1] - 2.0 * s[imax] + s[imax + 1];
    if (denom < 0.0)
      dx = std::clamp(0.5 * (s[imax - 1] - s[imax + 1]) / denom, -0.5, 0.5);
  }

  double base = 0.5 * (bl + br);
  double half_abs = base + 0.5 * (peak - base);
  double wsum = 0.0, xsum = 0.0;
  for (std::size_t i = imax; i-- > 0 && s[i] >= half_abs;) {
    wsum += s[i] - base;
    xsum += (s[i] - base) * s.grid().point(i);
  }
  for (std::size_t i = imax; i < n && s[i] >= half_abs; ++i) {
    wsum += s[i] - base;
    xsum += (s[i] - base) * s.grid().point(i);
  }
  return {s.grid().point(imax) + dx * s.grid().step(), peak, right - left,
          wsum > 0.0 ? xsum / wsum : s.grid().point(imax)};
}

}  // namespace rixs
