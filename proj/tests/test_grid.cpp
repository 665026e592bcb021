// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "rixskit/grid.hpp"

using namespace rixs;

TEST_CASE("energy grid construction and point layout") {
  EnergyGrid g(8310.0, 1.0, 140);
  CHECK(g.start() == 8310.0);
  CHECK(g.step() == 1.0);
  CHECK(g.count() == 140);
  CHECK(g.point(0) == 8310.0);
  CHECK(g.point(139) == Catch::Approx(8449.0));
  CHECK(g.back() == Catch::Approx(8449.0));
  auto pts = g.points();
  REQUIRE(pts.size() == 140);
  CHECK(pts[7] == g.point(7));
}

TEST_CASE("energy grid rejects degenerate axes") {
  CHECK_THROWS_AS(EnergyGrid(0.0, 0.0, 10), InvalidParameter);
  CHECK_THROWS_AS(EnergyGrid(0.0, -1.0, 10), InvalidParameter);
  CHECK_THROWS_AS(EnergyGrid(0.0, 1.0, 1), InvalidParameter);
  CHECK_THROWS_AS(EnergyGrid(std::nan(""), 1.0, 10), InvalidParameter);
  CHECK_THROWS_AS(
      EnergyGrid(0.0, std::numeric_limits<double>::infinity(), 10),
      InvalidParameter);
}

TEST_CASE("nearest bin clamps at the ends and breaks ties downward") {
  EnergyGrid g(0.0, 1.0, 11);
  CHECK(g.nearest(-5.0) == 0);
  CHECK(g.nearest(0.0) == 0);
  CHECK(g.nearest(3.4) == 3);
  CHECK(g.nearest(3.6) == 4);
  // Exact midpoint between bins 3 and 4 resolves to the lower bin.
  CHECK(g.nearest(3.5) == 3);
  CHECK(g.nearest(10.0) == 10);
  CHECK(g.nearest(25.0) == 10);
}

TEST_CASE("contains covers the closed span") {
  EnergyGrid g(10.0, 0.5, 21);
  CHECK(g.contains(10.0));
  CHECK(g.contains(20.0));
  CHECK(g.contains(14.37));
  CHECK_FALSE(g.contains(9.999));
  CHECK_FALSE(g.contains(20.001));
}

TEST_CASE("grids compare by value") {
  EnergyGrid a(1.0, 0.5, 8);
  EnergyGrid b(1.0, 0.5, 8);
  EnergyGrid c(1.0, 0.5, 9);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("spectrum enforces matching lengths and finite values") {
  EnergyGrid g(0.0, 1.0, 4);
  CHECK_THROWS_AS(Spectrum(g, {1.0, 2.0}), InvalidParameter);
  CHECK_THROWS_AS(Spectrum(g, {1.0, 2.0, std::nan(""), 3.0}),
                  InvalidParameter);
  // Negative values are allowed (residual spectra use them).
  Spectrum s(g, {1.0, -2.0, 0.0, 3.0});
  CHECK(s[1] == -2.0);
}

TEST_CASE("spectrum sampling interpolates linearly and is zero outside") {
  EnergyGrid g(0.0, 2.0, 4);
  Spectrum s(g, {0.0, 4.0, 8.0, 2.0});
  CHECK(s.sample(0.0) == 0.0);
  CHECK(s.sample(1.0) == Catch::Approx(2.0));
  CHECK(s.sample(3.0) == Catch::Approx(6.0));
  CHECK(s.sample(6.0) == Catch::Approx(2.0));
  CHECK(s.sample(-0.001) == 0.0);
  CHECK(s.sample(6.001) == 0.0);
  CHECK(s.sample(1e6) == 0.0);
}

TEST_CASE("spectrum integral is the rectangle rule") {
  EnergyGrid g(5.0, 0.25, 8);
  Spectrum s(g, {1, 2, 3, 4, 4, 3, 2, 1});
  CHECK(s.integral() == Catch::Approx(20.0 * 0.25));
}

TEST_CASE("rixs map stores row-major intensity with value checks") {
  EnergyGrid inc(100.0, 1.0, 3);
  EnergyGrid em(50.0, 1.0, 2);
  RixsMap m(inc, em, {0, 1, 2, 3, 4, 5});
  CHECK(m.at(0, 0) == 0.0);
  CHECK(m.at(0, 1) == 1.0);
  CHECK(m.at(2, 0) == 4.0);
  CHECK(m.at(2, 1) == 5.0);
  auto r1 = m.row(1);
  REQUIRE(r1.size() == 2);
  CHECK(r1[0] == 2.0);
  auto rs = m.row_spectrum(2);
  CHECK(rs.grid() == em);
  CHECK(rs[1] == 5.0);

  CHECK_THROWS_AS(RixsMap(inc, em, {0, 1, 2}), InvalidParameter);
  CHECK_THROWS_AS(RixsMap(inc, em, {0, 1, 2, 3, 4, -1}), InvalidParameter);
  CHECK_THROWS_AS(RixsMap(inc, em, {0, 1, 2, 3, 4, std::nan("")}),
                  InvalidParameter);
}

TEST_CASE("energy transfer map mirrors the rixs map layout") {
  EnergyGrid inc(100.0, 1.0, 2);
  EnergyGrid tr(10.0, 0.5, 3);
  EnergyTransferMap m(inc, tr, {0, 1, 2, 3, 4, 5});
  CHECK(m.at(1, 2) == 5.0);
  CHECK(m.transfer().step() == 0.5);
  CHECK_THROWS_AS(EnergyTransferMap(inc, tr, {0, 1}), InvalidParameter);
}
