// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rixskit/kh_forward.hpp"
#include "rixskit/lineshape.hpp"
#include "rixskit/map_analysis.hpp"

using namespace rixs;

namespace {

// One full-size default map shared by the slower analysis tests.
const RixsMap& default_map() {
  static RixsMap m =
      simulate_rixs_map(wsi2_default(), EnergyGrid(10140.0, 1.0, 110),
                        EnergyGrid(8310.0, 1.0, 140), 1);
  return m;
}

RixsMap integer_map() {
  EnergyGrid inc(100.0, 1.0, 4);
  EnergyGrid em(50.0, 1.0, 3);
  return RixsMap(inc, em, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
}

double total(const RixsMap& m) {
  double t = 0.0;
  for (double v : m.intensity()) t += v;
  return t;
}

}  // namespace

TEST_CASE("rebinning onto the same step is an identity") {
  RixsMap m = integer_map();
  RixsMap r = rebin_incident(m, 1.0);
  CHECK(r.incident() == m.incident());
  CHECK(r.emission() == m.emission());
  for (std::size_t k = 0; k < m.intensity().size(); ++k)
    CHECK(r.intensity()[k] == m.intensity()[k]);
}

TEST_CASE("doubling the incident step pools row pairs exactly") {
  RixsMap m = integer_map();
  RixsMap r = rebin_incident(m, 2.0);
  REQUIRE(r.incident().count() == 2);
  CHECK(r.incident().step() == 2.0);
  // New bin centers sit midway between the constituents.
  CHECK(r.incident().point(0) == Catch::Approx(100.5));
  CHECK(r.incident().point(1) == Catch::Approx(102.5));
  CHECK(r.at(0, 0) == 1.0 + 4.0);
  CHECK(r.at(0, 2) == 3.0 + 6.0);
  CHECK(r.at(1, 1) == 8.0 + 11.0);
  CHECK(total(r) == total(m));  // integer cells: conservation is exact
}

TEST_CASE("rebinning validates its step") {
  RixsMap m = integer_map();
  CHECK_THROWS_AS(rebin_incident(m, 0.5), InvalidParameter);
  CHECK_THROWS_AS(rebin_incident(m, std::nan("")), InvalidParameter);
  CHECK_THROWS_AS(rebin_incident(m, 100.0), InvalidParameter);
}

TEST_CASE("total yield of a single-column map is that column") {
  EnergyGrid inc(100.0, 1.0, 5);
  EnergyGrid em(50.0, 0.5, 4);
  std::vector<double> cells(20, 0.0);
  for (std::size_t i = 0; i < 5; ++i) cells[i * 4 + 2] = double(i + 1);
  RixsMap m(inc, em, cells);
  Spectrum y = tfy(m);
  REQUIRE(y.grid() == inc);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(y[i] == Catch::Approx(double(i + 1) * em.step()));
}

TEST_CASE("an all-zero map yields an all-zero tfy") {
  EnergyGrid inc(100.0, 1.0, 5);
  EnergyGrid em(50.0, 0.5, 4);
  RixsMap m(inc, em, std::vector<double>(20, 0.0));
  Spectrum y = tfy(m);
  for (double v : y.values()) CHECK(v == 0.0);
}

TEST_CASE("yield extraction is linear in the map intensity") {
  const RixsMap& m = default_map();
  std::vector<double> doubled(m.intensity());
  for (double& v : doubled) v *= 2.0;
  RixsMap m2(m.incident(), m.emission(), doubled);
  Spectrum a = tfy(m), b = tfy(m2);
  for (std::size_t i = 0; i < a.grid().count(); ++i)
    CHECK(b[i] == 2.0 * a[i]);  // power-of-two scaling commutes exactly

  std::vector<double> scaled(m.intensity());
  for (double& v : scaled) v *= 1.7;
  Spectrum c = herfd(RixsMap(m.incident(), m.emission(), scaled), 8397.0,
                     8398.4);
  Spectrum d = herfd(m, 8397.0, 8398.4);
  for (std::size_t i = 0; i < c.grid().count(); ++i)
    CHECK(c[i] == Catch::Approx(1.7 * d[i]).epsilon(1e-12).margin(0.0));
}

TEST_CASE("a full-width herfd window reproduces tfy bitwise") {
  const RixsMap& m = default_map();
  Spectrum full = herfd(m, m.emission().start(), m.emission().back());
  Spectrum y = tfy(m);
  REQUIRE(full.grid() == y.grid());
  for (std::size_t i = 0; i < y.grid().count(); ++i) CHECK(full[i] == y[i]);
}

TEST_CASE("herfd window contract cases") {
  const RixsMap& m = default_map();
  CHECK_THROWS_AS(herfd(m, 9000.0, 9010.0), EmptyWindow);
  CHECK_THROWS_AS(herfd(m, 8400.0, 8395.0), InvalidParameter);
  CHECK_THROWS_AS(herfd(m, 8400.0, 8400.0), InvalidParameter);
  // Window between two bin centers holds no bin center.
  CHECK_THROWS_AS(herfd(m, 8397.1, 8397.9), EmptyWindow);
}

TEST_CASE("the narrow-window herfd line is much sharper than tfy") {
  const RixsMap& m = default_map();
  auto t = white_line_stats(tfy(m));
  auto h = white_line_stats(herfd(m, 8397.0, 8398.4));
  CHECK(t.fwhm >= 7.2);
  CHECK(h.fwhm <= 0.75 * t.fwhm);  // >= 25% sharper
}

TEST_CASE("emission cuts are bitwise rows with ties to the lower row") {
  const RixsMap& m = default_map();
  Spectrum row42 = m.row_spectrum(42);
  Spectrum cut = xes_cut(m, m.incident().point(42));
  for (std::size_t j = 0; j < cut.grid().count(); ++j)
    CHECK(cut[j] == row42[j]);

  // Exact midpoint between two rows resolves to the lower one.
  Spectrum mid = xes_cut(m, m.incident().point(42) + 0.5);
  for (std::size_t j = 0; j < mid.grid().count(); ++j)
    CHECK(mid[j] == row42[j]);

  CHECK_THROWS_AS(xes_cut(m, 9000.0), OutOfRange);
  CHECK_THROWS_AS(xes_cut(m, 11000.0), OutOfRange);
}

TEST_CASE("a point mass lands on the nearest transfer bin") {
  EnergyGrid inc(10210.0, 1.0, 17);
  EnergyGrid em(8390.0, 0.2, 100);
  std::vector<double> cells(17 * 100, 0.0);
  std::size_t i = inc.nearest(10218.0);
  std::size_t j = em.nearest(8397.6);
  REQUIRE(em.point(j) == Catch::Approx(8397.6));
  cells[i * 100 + j] = 5.0;
  RixsMap m(inc, em, cells);
  EnergyTransferMap t =
      to_energy_transfer(m, EnergyGrid(1815.0, 0.2, 76));
  auto row = t.row(i);
  std::size_t k =
      std::size_t(std::max_element(row.begin(), row.end()) - row.begin());
  CHECK(t.transfer().point(k) == Catch::Approx(10218.0 - 8397.6));
}

TEST_CASE("a constant-transfer stripe stays put on the transfer axis") {
  EnergyGrid inc(10180.0, 1.0, 21);
  EnergyGrid em(8350.0, 0.5, 201);
  std::vector<double> cells;
  cells.reserve(inc.count() * em.count());
  for (std::size_t i = 0; i < inc.count(); ++i)
    for (std::size_t j = 0; j < em.count(); ++j)
      cells.push_back(
          lorentzian(em.point(j), inc.point(i) - 1809.0, 2.0));
  RixsMap m(inc, em, std::move(cells));
  EnergyTransferMap t = to_energy_transfer(m, EnergyGrid(1790.0, 0.5, 81));
  for (std::size_t i = 0; i < inc.count(); ++i) {
    auto row = t.row(i);
    std::size_t k =
        std::size_t(std::max_element(row.begin(), row.end()) - row.begin());
    CHECK(std::abs(t.transfer().point(k) - 1809.0) <=
          t.transfer().step() + 1e-9);
  }
}

TEST_CASE("a fixed emission line disperses one-for-one in transfer") {
  EnergyGrid inc(10210.0, 1.0, 15);
  EnergyGrid em(8380.0, 0.25, 161);
  std::vector<double> cells;
  cells.reserve(inc.count() * em.count());
  for (std::size_t i = 0; i < inc.count(); ++i)
    for (std::size_t j = 0; j < em.count(); ++j)
      cells.push_back(gaussian(em.point(j), 8397.6, 2.0));
  RixsMap m(inc, em, std::move(cells));
  EnergyTransferMap t = to_energy_transfer(m, EnergyGrid(1805.0, 0.25, 141));
  std::vector<double> argmax(inc.count());
  for (std::size_t i = 0; i < inc.count(); ++i) {
    auto row = t.row(i);
    argmax[i] = t.transfer().point(std::size_t(
        std::max_element(row.begin(), row.end()) - row.begin()));
  }
  for (std::size_t i = 1; i < inc.count(); ++i)
    CHECK(argmax[i] - argmax[i - 1] ==
          Catch::Approx(inc.step()).margin(t.transfer().step() + 1e-9));
}

TEST_CASE("peak tracking separates the two lines above the edge") {
  const RixsMap& m = default_map();
  PeakTracks tracks = track_peaks(m);
  REQUIRE(tracks.rows.size() == m.incident().count());

  for (std::size_t i = 0; i < m.incident().count(); ++i) {
    double w1 = m.incident().point(i);
    if (w1 < 10216.0 || w1 > 10222.0) continue;
    std::size_t n_fluor = 0, n_res = 0;
    for (const auto& p : tracks.rows[i]) {
      if (p.cls == PeakClass::fluorescence) {
        ++n_fluor;
        CHECK(p.emission == Catch::Approx(8397.6).margin(1.0));
      }
      if (p.cls == PeakClass::resonant) ++n_res;
    }
    CHECK(n_fluor == 1);
    CHECK(n_res >= 1);
  }
}

TEST_CASE("below the edge only the dispersing resonant line remains") {
  const RixsMap& m = default_map();
  PeakTracks tracks = track_peaks(m);
  for (std::size_t i = 0; i < m.incident().count(); ++i) {
    double w1 = m.incident().point(i);
    if (w1 < 10160.0 || w1 > 10200.0) continue;
    REQUIRE_FALSE(tracks.rows[i].empty());
    for (const auto& p : tracks.rows[i])
      CHECK(p.cls == PeakClass::resonant);
  }
}

TEST_CASE("at the edge the two lines merge into one feature") {
  const RixsMap& m = default_map();
  PeakTracks tracks = track_peaks(m);
  std::size_t i = m.incident().nearest(10208.0);
  REQUIRE(tracks.rows[i].size() == 1);
  CHECK(tracks.rows[i][0].cls == PeakClass::merged);
}

TEST_CASE("no row carries more than one fluorescence label") {
  const RixsMap& m = default_map();
  PeakTracks tracks = track_peaks(m, 0.05);
  for (const auto& row : tracks.rows) {
    std::size_t n_fluor = 0;
    for (const auto& p : row)
      if (p.cls == PeakClass::fluorescence) ++n_fluor;
    CHECK(n_fluor <= 1);
  }
  CHECK_THROWS_AS(track_peaks(m, 0.0), InvalidParameter);
  CHECK_THROWS_AS(track_peaks(m, 1.0), InvalidParameter);
}

TEST_CASE("white line statistics recover a synthetic gaussian") {
  EnergyGrid g(0.0, 0.1, 201);
  std::vector<double> v(g.count());
  for (std::size_t i = 0; i < g.count(); ++i)
    v[i] = gaussian(g.point(i), 10.0, 3.0);
  auto st = white_line_stats(Spectrum(g, v));
  CHECK(st.peak_energy == Catch::Approx(10.0).margin(0.05));
  CHECK(st.fwhm == Catch::Approx(3.0).epsilon(0.02));
  CHECK(st.centroid == Catch::Approx(10.0).margin(0.1));
  CHECK(st.peak_height == Catch::Approx(gaussian(10.0, 10.0, 3.0))
                              .epsilon(0.01));
}

TEST_CASE("white line statistics handle a stepped baseline") {
  // Peak riding on an edge jump: per-side baselines keep the width honest.
  EnergyGrid g(-20.0, 0.1, 401);
  std::vector<double> v(g.count());
  const double peak = gaussian(0.0, 0.0, 3.0);
  for (std::size_t i = 0; i < g.count(); ++i) {
    double x = g.point(i);
    v[i] = gaussian(x, 0.0, 3.0) +
           0.3 * peak * 0.5 * std::erfc(-x / 2.0);
  }
  auto st = white_line_stats(Spectrum(g, v));
  CHECK(st.fwhm == Catch::Approx(3.0).epsilon(0.15));
}

TEST_CASE("white line statistics reject unusable spectra") {
  EnergyGrid g(0.0, 1.0, 10);
  CHECK_THROWS_AS(white_line_stats(Spectrum(g, std::vector<double>(10, 0.0))),
                  NoSignal);
  EnergyGrid tiny(0.0, 1.0, 4);
  CHECK_THROWS_AS(white_line_stats(Spectrum(tiny, {0, 1, 2, 1})),
                  InvalidParameter);
}
