// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "rixskit/errors.hpp"
#include "rixskit/grid.hpp"
#include "rixskit/lineshape.hpp"
#include "rixskit/spectrum_ops.hpp"

namespace rixs {

enum class DosShape { sharp_step, smooth_step };

inline const char* dos_shape_name(DosShape s) {
  return s == DosShape::sharp_step ? "sharp_step" : "smooth_step";
}

inline DosShape dos_shape_from_name(const std::string& s) {
  if (s == "sharp_step") return DosShape::sharp_step;
  if (s == "smooth_step") return DosShape::smooth_step;
  throw InvalidParameter("unknown dos shape: '" + s + "'");
}

// Unoccupied-continuum density of states dg/d(omega), omega measured from
// the 2p ionization threshold.
struct ContinuumDos {
  DosShape shape = DosShape::smooth_step;
  double onset = 0.0;       // photoelectron energy where the edge sits, eV
  double edge_width = 2.0;  // FWHM of the smooth onset, eV
  double amplitude = 0.045;

  void collect_issues(std::vector<std::string>& issues) const {
    if (!std::isfinite(onset)) issues.push_back("dos.onset must be finite");
    if (!std::isfinite(amplitude) || amplitude < 0.0)
      issues.push_back("dos.amplitude must be finite and >= 0");
    if (shape == DosShape::smooth_step &&
        (!std::isfinite(edge_width) || edge_width <= 0.0))
      issues.push_back("dos.edge_width must be > 0 for smooth_step");
  }

  // Non-negative and non-decreasing up to the plateau by construction.
  double value(double omega) const {
    if (shape == DosShape::sharp_step)
      return omega < onset ? 0.0 : amplitude;
    double sigma = edge_width / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    return amplitude * 0.5 * std::erfc(-(omega - onset) /
                                       (sigma * std::numbers::sqrt2));
  }
};

// Classical electron radius prefactor 2*pi*r0^2 in m^2; r0_scale = 1 keeps
// outputs in arbitrary units, which is the default everywhere.
inline constexpr double physical_r0_scale =
    2.0 * std::numbers::pi * 2.8179403e-15 * 2.8179403e-15;

struct ModelParams {
  double e_2p = 0.0;  // 2p binding energy, eV
  double e_3d = 0.0;  // 3d binding energy, eV
  double e_5d = 0.0;  // 5d level, eV; e_2p - e_5d is the resonance energy
  double gamma_2p = 0.0;
  double gamma_3d = 0.0;
  double g_3d2p = 1.0;
  double g_2p5d = 1.0;
  ContinuumDos dos;
  double r0_scale = 1.0;
  double instrument_fwhm_in = 0.0;
  double instrument_fwhm_out = 0.0;

  std::vector<std::string> issues() const {
    std::vector<std::string> out;
    auto finite = [&](double v, const char* name) {
      if (!std::isfinite(v)) out.push_back(std::string(name) + " must be finite");
      return std::isfinite(v);
    };
    bool ok = true;
    ok &= finite(e_2p, "e_2p");
    ok &= finite(e_3d, "e_3d");
    ok &= finite(e_5d, "e_5d");
    ok &= finite(gamma_2p, "gamma_2p");
    ok &= finite(gamma_3d, "gamma_3d");
    ok &= finite(g_3d2p, "g_3d2p");
    ok &= finite(g_2p5d, "g_2p5d");
    ok &= finite(r0_scale, "r0_scale");
    ok &= finite(instrument_fwhm_in, "instrument_fwhm_in");
    ok &= finite(instrument_fwhm_out, "instrument_fwhm_out");
    if (ok) {
      if (gamma_2p <= 0.0) out.push_back("gamma_2p must be > 0");
      if (gamma_3d <= 0.0) out.push_back("gamma_3d must be > 0");
      if (gamma_2p > 0.0 && gamma_3d > 0.0 && !(gamma_3d < gamma_2p))
        out.push_back("gamma_3d must be < gamma_2p");
      if (!(e_2p > e_3d) || !(e_3d > e_5d))
        out.push_back("binding energies must satisfy e_2p > e_3d > e_5d");
      if (!(g_3d2p > 0.0)) out.push_back("g_3d2p must be > 0");
      if (g_2p5d < 0.0) out.push_back("g_2p5d must be >= 0");
      if (r0_scale < 0.0) out.push_back("r0_scale must be >= 0");
      if (instrument_fwhm_in < 0.0)
        out.push_back("instrument_fwhm_in must be >= 0");
      if (instrument_fwhm_out < 0.0)
        out.push_back("instrument_fwhm_out must be >= 0");
    }
    dos.collect_issues(out);
    return out;
  }

  void validate() const {
    auto v = issues();
    if (v.empty()) return;
    std::string msg = "invalid model parameters:";
    for (const auto& s : v) msg += " " + s + ";";
    throw InvalidParameter(msg);
  }
};

// WSi2 W-L3 defaults. The L-alpha1 offset e_2p - e_3d = 8397.6 eV and the
// constant energy transfer e_3d - e_5d = 1809 eV are both kept exactly as
// quoted even though together they put the 2p->5d resonance at 10206.6 eV,
// 1.4 eV below the nominal 10208 eV edge; the mismatch is inherent to the
// quoted values and is deliberately not reconciled.
inline ModelParams wsi2_default() {
  ModelParams p;
  p.e_2p = 10208.0;
  p.e_3d = 1810.4;
  p.e_5d = 1.4;
  p.gamma_2p = 7.2;
  p.gamma_3d = 2.0;
  p.g_3d2p = 1.0;
  p.g_2p5d = 1.0;
  // Amplitude picked so the continuum (fluorescence) and discrete (resonant)
  // peaks are of comparable height ~10 eV above the edge.
  p.dos = ContinuumDos{DosShape::smooth_step, 0.0, 2.0, 0.075};
  p.r0_scale = 1.0;
  p.instrument_fwhm_in = 1.22;
  p.instrument_fwhm_out = 0.5;
  return p;
}

namespace detail {

inline double discrete_value(const ModelParams& p, double w1, double w2) {
  double det = p.e_2p - p.e_5d - w1;
  double resonant = (p.e_2p - p.e_3d) * p.g_3d2p * (p.e_2p - p.e_5d) *
                    p.g_2p5d /
                    (det * det + 0.25 * p.gamma_2p * p.gamma_2p);
  // The delta of the two-level emission step becomes a unit Lorentzian of
  // the final-state width.
  return p.r0_scale * (w2 / w1) * resonant *
         lorentzian(w2, w1 - (p.e_3d - p.e_5d), p.gamma_3d);
}

inline double continuum_value(const ModelParams& p, double w1, double w2) {
  // Photoelectron energy fixed by energy conservation.
  double omega = w1 - p.e_3d - w2;
  double dg = p.dos.value(omega);
  if (dg <= 0.0) return 0.0;
  double intermediate = p.e_2p + omega;
  if (intermediate <= 0.0) return 0.0;
  double det = intermediate - w1;
  return p.r0_scale * (w2 / w1) * (p.e_2p - p.e_3d) * p.g_3d2p * intermediate /
         (det * det + 0.25 * p.gamma_2p * p.gamma_2p) * dg;
}

inline void check_photon_energies(double w1, double w2) {
  if (!(w1 > 0.0) || !std::isfinite(w1))
    throw InvalidParameter("incident energy must be finite and > 0");
  if (!(w2 > 0.0) || !std::isfinite(w2))
    throw InvalidParameter("emission energy must be finite and > 0");
}

// Static-chunk parallel loop. Chunks are disjoint index ranges, so any body
// writing only its own range produces output independent of worker count.
template <class Body>
void parallel_chunks(std::size_t n, unsigned workers, Body&& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (n == 0) return;
  std::size_t parts = std::min<std::size_t>(workers, n);
  if (parts <= 1) {
    body(std::size_t(0), n);
    return;
  }
  std::size_t chunk = (n + parts - 1) / parts;
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (std::size_t t = 0; t < parts; ++t) {
    std::size_t begin = t * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

inline double discrete_channel(const ModelParams& p, double w1, double w2) {
  p.validate();
  detail::check_photon_energies(w1, w2);
  return detail::discrete_value(p, w1, w2);
}

inline double continuum_channel(const ModelParams& p, double w1, double w2) {
  p.validate();
  detail::check_photon_energies(w1, w2);
  return detail::continuum_value(p, w1, w2);
}

// Emission spectrum at fixed incident energy: discrete plus continuum, the
// continuum broadened by the final-state Lorentzian (the discrete channel
// already carries it), then both smeared by the analyzer resolution.
inline Spectrum simulate_xes_cut(const ModelParams& p, double w1,
                                 const EnergyGrid& emission) {
  p.validate();
  if (!(w1 > 0.0) || !std::isfinite(w1))
    throw InvalidParameter("incident energy must be finite and > 0");
  std::vector<double> disc(emission.count()), cont(emission.count());
  for (std::size_t i = 0; i < emission.count(); ++i) {
    double w2 = emission.point(i);
    disc[i] = detail::discrete_value(p, w1, w2);
    cont[i] = detail::continuum_value(p, w1, w2);
  }
  Spectrum cont_b = convolve(Spectrum(emission, std::move(cont)), p.gamma_3d,
                             Lineshape::lorentzian);
  for (std::size_t i = 0; i < emission.count(); ++i) disc[i] += cont_b[i];
  return convolve(Spectrum(emission, std::move(disc)), p.instrument_fwhm_out,
                  Lineshape::gaussian);
}

// Full synthetic map. Row i is the XES cut at incident.point(i); the map is
// then smeared along the incident axis by the incident-band resolution.
// Rows and columns are processed in disjoint chunks, so the result is
// bitwise independent of `workers` (0 = one per hardware thread).
inline RixsMap simulate_rixs_map(const ModelParams& p,
                                 const EnergyGrid& incident,
                                 const EnergyGrid& emission,
                                 unsigned workers = 1) {
  p.validate();
  const std::size_t ni = incident.count();
  const std::size_t ne = emission.count();
  std::vector<double> cells(ni * ne);
  detail::parallel_chunks(ni, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Spectrum row = simulate_xes_cut(p, incident.point(i), emission);
      std::copy(row.values().begin(), row.values().end(),
                cells.begin() + std::ptrdiff_t(i * ne));
    }
  });
  if (p.instrument_fwhm_in > 0.0) {
    std::vector<double> smeared(ni * ne);
    detail::parallel_chunks(
        ne, workers, [&](std::size_t begin, std::size_t end) {
          std::vector<double> column(ni);
          for (std::size_t j = begin; j < end; ++j) {
            for (std::size_t i = 0; i < ni; ++i) column[i] = cells[i * ne + j];
            auto out = detail::convolve_values(
                column, incident.step(), p.instrument_fwhm_in,
                Lineshape::gaussian);
            for (std::size_t i = 0; i < ni; ++i) smeared[i * ne + j] = out[i];
          }
        });
    cells = std::move(smeared);
  }
  return RixsMap(incident, emission, std::move(cells));
}

}  // namespace rixs
