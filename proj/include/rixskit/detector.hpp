// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rixskit/dispersion.hpp"
#include "rixskit/errors.hpp"
#include "rixskit/grid.hpp"
#include "rixskit/io.hpp"
#include "rixskit/rng.hpp"

namespace rixs {

enum class NoiseModel { poisson, none };

inline const char* noise_model_name(NoiseModel m) {
  return m == NoiseModel::poisson ? "poisson" : "none";
}

inline NoiseModel noise_model_from_name(const std::string& s) {
  if (s == "poisson") return NoiseModel::poisson;
  if (s == "none") return NoiseModel::none;
  throw InvalidParameter("unknown noise model: '" + s + "'");
}

// One exposure of the 1D dispersion-axis projection of the detector.
struct DetectorFrame {
  std::vector<std::uint64_t> pixels;
  double exposure = 0.0;
  double energy = 0.0;  // incident energy for elastic frames; 0 = unset
  std::uint64_t seed = 0;

  std::uint64_t total_counts() const {
    std::uint64_t t = 0;
    for (auto c : pixels) t += c;
    return t;
  }
};

// Pixel index and detector position share one axis: pixel i sits at
// position i, and physical detectors are calibrated over [0, n_pixels-1].
inline std::size_t pixel_count(const DispersionCoeffs& d) {
  return std::size_t(std::floor(d.pos_max())) + 1;
}

namespace detail {

// Exact integral of the piecewise-linear interpolant of s over [a, b]
// clipped to the grid (the interpolant is 0 outside).
inline double integral_between(const Spectrum& s, double a, double b) {
  if (b < a) std::swap(a, b);
  const auto& g = s.grid();
  a = std::max(a, g.start());
  b = std::min(b, g.back());
  if (!(b > a)) return 0.0;
  auto last = g.count() - 2;
  auto ia = std::min(std::size_t((a - g.start()) / g.step()), last);
  auto ib = std::min(std::size_t((b - g.start()) / g.step()), last);
  if (ia == ib) return (b - a) * 0.5 * (s.sample(a) + s.sample(b));
  double total = (g.point(ia + 1) - a) * 0.5 * (s.sample(a) + s[ia + 1]);
  for (std::size_t i = ia + 1; i < ib; ++i)
    total += g.step() * 0.5 * (s[i] + s[i + 1]);
  total += (b - g.point(ib)) * 0.5 * (s[ib] + s.sample(b));
  return total;
}

inline void check_exposure_flux(double exposure, double flux_scale) {
  if (!(exposure > 0.0) || !std::isfinite(exposure))
    throw InvalidParameter("exposure must be finite and > 0");
  if (!(flux_scale >= 0.0) || !std::isfinite(flux_scale))
    throw InvalidParameter("flux_scale must be finite and >= 0");
}

inline std::vector<std::uint64_t> draw_counts(const std::vector<double>& lam,
                                              std::uint64_t seed,
                                              NoiseModel noise) {
  std::vector<std::uint64_t> counts(lam.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < lam.size(); ++i)
    counts[i] = noise == NoiseModel::poisson
                    ? rng.poisson(lam[i])
                    : std::uint64_t(std::llround(lam[i]));
  return counts;
}

}  // namespace detail

// Expected (noise-free, real-valued) counts per pixel.
inline std::vector<double> expected_counts(const Spectrum& s,
                                           const DispersionCoeffs& d,
                                           double exposure,
                                           double flux_scale) {
  detail::check_exposure_flux(exposure, flux_scale);
  std::size_t n = pixel_count(d);
  std::vector<double> lam(n);
  for (std::size_t i = 0; i < n; ++i) {
    double pos = double(i);
    lam[i] = flux_scale * exposure *
             detail::integral_between(s, d.energy(pos - 0.5),
                                      d.energy(pos + 0.5));
  }
  return lam;
}

// Renders a spectrum onto the detector. Identical inputs and seed give a
// bit-identical frame; NoiseModel::none rounds the expectation instead of
// sampling.
inline DetectorFrame render_frame(const Spectrum& s, const DispersionCoeffs& d,
                                  double exposure, double flux_scale,
                                  std::uint64_t seed,
                                  NoiseModel noise = NoiseModel::poisson) {
  DetectorFrame f;
  f.pixels = detail::draw_counts(expected_counts(s, d, exposure, flux_scale),
                                 seed, noise);
  f.exposure = exposure;
  f.seed = seed;
  return f;
}

// Elastic-line calibration scan: one frame per incident energy, each from a
// unit-area Gaussian of the given bandwidth at that energy (integrated
// analytically over the pixel spans). Frame k draws from child_seed(seed, k).
inline std::vector<DetectorFrame> elastic_scan(
    const std::vector<double>& energies, const DispersionCoeffs& d,
    double bandwidth_fwhm, double exposure, double flux_scale,
    std::uint64_t seed, NoiseModel noise = NoiseModel::poisson) {
  if (!(bandwidth_fwhm > 0.0) || !std::isfinite(bandwidth_fwhm))
    throw InvalidParameter("bandwidth_fwhm must be finite and > 0");
  detail::check_exposure_flux(exposure, flux_scale);
  auto [elo, ehi] = d.energy_range();
  for (double e : energies)
    if (!std::isfinite(e) || e < elo || e > ehi)
      throw OutOfRange("elastic_scan: energy " + std::to_string(e) +
                       " outside calibrated range");
  double sigma = bandwidth_fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  std::size_t n = pixel_count(d);
  std::vector<DetectorFrame> frames;
  frames.reserve(energies.size());
  for (std::size_t k = 0; k < energies.size(); ++k) {
    double center = energies[k];
    auto cdf = [&](double x) {
      return 0.5 * std::erfc(-(x - center) / (sigma * std::numbers::sqrt2));
    };
    std::vector<double> lam(n);
    for (std::size_t i = 0; i < n; ++i) {
      double pos = double(i);
      lam[i] = flux_scale * exposure *
               std::abs(cdf(d.energy(pos + 0.5)) - cdf(d.energy(pos - 0.5)));
    }
    DetectorFrame f;
    f.seed = child_seed(seed, k);
    f.pixels = detail::draw_counts(lam, f.seed, noise);
    f.exposure = exposure;
    f.energy = center;
    frames.push_back(std::move(f));
  }
  return frames;
}

// ---- frame serialization: CSV counts plus a JSON metadata sidecar ----

inline void write_frame_csv(const DetectorFrame& f,
                            const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "pixel,counts\n";
  for (std::size_t i = 0; i < f.pixels.size(); ++i)
    out << i << ',' << f.pixels[i] << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

inline void write_frame_meta_json(const DetectorFrame& f,
                                  const std::filesystem::path& path) {
  nlohmann::json j;
  j["energy_eV"] = f.energy;
  j["exposure_s"] = f.exposure;
  j["seed"] = f.seed;
  j["n_pixels"] = f.pixels.size();
  auto out = detail::open_for_write(path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

inline DetectorFrame read_frame_csv(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  const std::string ctx = path.string();
  DetectorFrame f;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() < 2)
      throw ParseError(ctx + ": line " + std::to_string(line_no) +
                       ": expected 2 columns");
    double c = detail::parse_double(cells[1], ctx, line_no);
    if (c < 0.0 || c != std::floor(c))
      throw ParseError(ctx + ": line " + std::to_string(line_no) +
                       ": counts must be non-negative integers");
    f.pixels.push_back(std::uint64_t(c));
  }
  return f;
}

}  // namespace rixs
