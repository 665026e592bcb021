// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rixskit/errors.hpp"

namespace rixs {

// Uniform ascending energy axis in eV: point(i) = start + i*step.
class EnergyGrid {
public:
  EnergyGrid(double start, double step, std::size_t count)
      : start_(start), step_(step), count_(count) {
    if (!std::isfinite(start) || !std::isfinite(step))
      throw InvalidParameter("EnergyGrid: start/step must be finite");
    if (!(step > 0.0))
      throw InvalidParameter("EnergyGrid: step must be > 0");
    if (count < 2)
      throw InvalidParameter("EnergyGrid: count must be >= 2");
  }

  double start() const { return start_; }
  double step() const { return step_; }
  std::size_t count() const { return count_; }
  double point(std::size_t i) const { return start_ + double(i) * step_; }
  double back() const { return point(count_ - 1); }
  bool contains(double e) const { return e >= start_ && e <= back(); }

  // Closest grid index; midpoint ties resolve to the lower index.
  std::size_t nearest(double e) const {
    double t = (e - start_) / step_;
    if (t <= 0.0) return 0;
    if (t >= double(count_ - 1)) return count_ - 1;
    auto lo = std::size_t(std::floor(t));
    double frac = t - double(lo);
    return frac > 0.5 ? lo + 1 : lo;
  }

  std::vector<double> points() const {
    std::vector<double> p(count_);
    for (std::size_t i = 0; i < count_; ++i) p[i] = point(i);
    return p;
  }

  friend bool operator==(const EnergyGrid& a, const EnergyGrid& b) {
    return a.start_ == b.start_ && a.step_ == b.step_ && a.count_ == b.count_;
  }

private:
  double start_;
  double step_;
  std::size_t count_;
};

// Intensity sampled on an EnergyGrid. Values may be negative only for
// residual-type data; they must always be finite.
class Spectrum {
public:
  Spectrum(EnergyGrid grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.count())
      throw InvalidParameter("Spectrum: values length " +
                             std::to_string(values_.size()) +
                             " != grid count " + std::to_string(grid_.count()));
    for (double v : values_)
      if (!std::isfinite(v))
        throw InvalidParameter("Spectrum: non-finite value");
  }

  const EnergyGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  // Linear interpolation; zero outside the grid range.
  double sample(double e) const {
    double t = (e - grid_.start()) / grid_.step();
    if (t < 0.0 || t > double(grid_.count() - 1)) return 0.0;
    auto lo = std::size_t(std::floor(t));
    if (lo >= grid_.count() - 1) return values_.back();
    double frac = t - double(lo);
    return values_[lo] + frac * (values_[lo + 1] - values_[lo]);
  }

  // Rectangle-rule integral, sum(values)*step.
  double integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.step();
  }

private:
  EnergyGrid grid_;
  std::vector<double> values_;
};

namespace detail {

inline void check_map_values(const std::vector<double>& v, std::size_t rows,
                             std::size_t cols, const char* what) {
  if (v.size() != rows * cols)
    throw InvalidParameter(std::string(what) + ": intensity size mismatch");
  for (double x : v)
    if (!std::isfinite(x) || x < 0.0)
      throw InvalidParameter(std::string(what) +
                             ": intensities must be finite and >= 0");
}

}  // namespace detail

// 2D intensity over (incident x emission); row i is the XES spectrum at
// incident.point(i). Stored row-major.
class RixsMap {
public:
  RixsMap(EnergyGrid incident, EnergyGrid emission, std::vector<double> intensity)
      : incident_(incident), emission_(emission), intensity_(std::move(intensity)) {
    detail::check_map_values(intensity_, incident_.count(), emission_.count(),
                             "RixsMap");
  }

  const EnergyGrid& incident() const { return incident_; }
  const EnergyGrid& emission() const { return emission_; }
  const std::vector<double>& intensity() const { return intensity_; }
  double at(std::size_t i, std::size_t j) const {
    return intensity_[i * emission_.count() + j];
  }
  std::span<const double> row(std::size_t i) const {
    return {intensity_.data() + i * emission_.count(), emission_.count()};
  }
  Spectrum row_spectrum(std::size_t i) const {
    auto r = row(i);
    return Spectrum(emission_, std::vector<double>(r.begin(), r.end()));
  }

private:
  EnergyGrid incident_;
  EnergyGrid emission_;
  std::vector<double> intensity_;
};

// Same data as RixsMap but on an energy-transfer axis t = w1 - w2.
class EnergyTransferMap {
public:
  EnergyTransferMap(EnergyGrid incident, EnergyGrid transfer,
                    std::vector<double> intensity)
      : incident_(incident), transfer_(transfer), intensity_(std::move(intensity)) {
    detail::check_map_values(intensity_, incident_.count(), transfer_.count(),
                             "EnergyTransferMap");
  }

  const EnergyGrid& incident() const { return incident_; }
  const EnergyGrid& transfer() const { return transfer_; }
  const std::vector<double>& intensity() const { return intensity_; }
  double at(std::size_t i, std::size_t j) const {
    return intensity_[i * transfer_.count() + j];
  }
  std::span<const double> row(std::size_t i) const {
    return {intensity_.data() + i * transfer_.count(), transfer_.count()};
  }

private:
  EnergyGrid incident_;
  EnergyGrid transfer_;
  std::vector<double> intensity_;
};

}  // namespace rixs
