#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dgbound/grid.hpp"

using namespace dgb;

TEST_CASE("region distance on cell centers") {
  Grid g = Grid::make_1d(0.0, 1.0, 10);
  Region X = make_region({0}, g, "X");
  Region Y = make_region({9}, g, "Y");
  CHECK(region_distance(X, Y, g) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(region_distance(Y, X, g) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(region_distance(X, X, g) == 0.0);

  Grid g2 = Grid::make_2d({0.0, 0.0}, {1.0, 1.0}, 10, 10);
  Region A = make_region({g2.flat_index(0, 0)}, g2);
  Region B = make_region({g2.flat_index(9, 9)}, g2);
  CHECK(region_distance(A, B, g2) ==
        doctest::Approx(std::sqrt(2.0 * 0.9 * 0.9)).epsilon(1e-14));
}

TEST_CASE("region distance errors and monotonicity") {
  Grid g = Grid::make_1d(0.0, 1.0, 16);
  Region empty;
  Region X = make_region({2, 3}, g);
  CHECK_THROWS_WITH_AS(region_distance(empty, X, g), "empty region has no distance",
                       std::invalid_argument);

  // enlarging either region never increases the distance
  std::mt19937 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> cell(0, 15);
    Region A = make_region({cell(rng), cell(rng)}, g);
    Region B = make_region({cell(rng)}, g);
    if (regions_intersect(A, B)) continue;
    const double d0 = region_distance(A, B, g);
    std::vector<int> grown = A.cell_indices;
    grown.push_back(cell(rng));
    const double d1 = region_distance(make_region(grown, g), B, g);
    CHECK(d1 <= d0 + 1e-15);
  }
}

TEST_CASE("boundary-cell fast path matches brute force") {
  Grid g2 = Grid::make_2d({0.0, 0.0}, {1.0, 2.0}, 12, 17);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double ax = coord(rng) * 0.4, ay = coord(rng) * 0.8;
    Region A = region_from_box(g2, {0.0, 0.0}, {ax, ay});
    Region B = region_from_box(g2, {0.6 + 0.3 * coord(rng), 1.2}, {1.0, 2.0});
    if (A.empty() || B.empty() || regions_intersect(A, B)) continue;
    double brute = std::numeric_limits<double>::infinity();
    for (int a : A.cell_indices)
      for (int b : B.cell_indices)
        brute = std::min(brute, (g2.cell_center(a) - g2.cell_center(b)).norm());
    CHECK(region_distance(A, B, g2) == doctest::Approx(brute).epsilon(1e-14));
  }
}

TEST_CASE("indicator fields") {
  Grid g = Grid::make_1d(0.0, 1.0, 8);
  Region all = region_from_box(g, {0.0, 0.0}, {1.0, 0.0});
  CHECK(indicator(all, g).sum() == doctest::Approx(8.0));
  Region none;
  CHECK(indicator(none, g).cwiseAbs().sum() == 0.0);
  Region single = make_region({3}, g);
  Field f = indicator(single, g);
  CHECK(f[3] == 1.0);
  CHECK(f.sum() == doctest::Approx(1.0));
}

TEST_CASE("lp norms with cell measure") {
  Grid g = Grid::make_1d(0.0, 1.0, 2);  // h = 0.5
  Field f(2);
  f << 2.0, 2.0;
  CHECK(lp_norm(f, 1.0, g) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(lp_norm(f, std::numeric_limits<double>::infinity(), g) == doctest::Approx(2.0));

  Grid g10 = Grid::make_1d(0.0, 1.0, 10);  // h = 0.1
  Field e = indicator(make_region({4}, g10), g10);
  CHECK(lp_norm(e, 2.0, g10) == doctest::Approx(std::sqrt(0.1)).epsilon(1e-14));

  CHECK_THROWS_AS(lp_norm(f, 0.5, g), std::invalid_argument);
}

TEST_CASE("lp norm properties") {
  Grid g = Grid::make_1d(-1.0, 2.0, 37);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::uniform_real_distribution<double> pdist(1.0, 6.0);
  for (int trial = 0; trial < 50; ++trial) {
    Field f(37), h(37);
    for (int i = 0; i < 37; ++i) {
      f[i] = val(rng);
      h[i] = val(rng);
    }
    const double p = trial % 5 == 0 ? std::numeric_limits<double>::infinity() : pdist(rng);
    const double lam = val(rng);

    // homogeneity
    CHECK(lp_norm(lam * f, p, g) ==
          doctest::Approx(std::abs(lam) * lp_norm(f, p, g)).epsilon(1e-12));
    // triangle inequality
    CHECK(lp_norm(f + h, p, g) <= lp_norm(f, p, g) + lp_norm(h, p, g) + 1e-12);
    // Hoelder consistency at p = 2
    const double n2 = lp_norm(f, 2.0, g);
    CHECK(n2 * n2 == doctest::Approx(dot(f, f, g)).epsilon(1e-12));
  }
}

TEST_CASE("grid invariants") {
  Grid g = Grid::make_2d({0.0, -1.0}, {2.0, 1.0}, 8, 4);
  CHECK(g.spacing(0) == doctest::Approx(0.25));
  CHECK(g.spacing(1) == doctest::Approx(0.5));
  CHECK(g.cell_count() == 32);
  CHECK_THROWS_AS(Grid::make_1d(0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make_1d(1.0, 0.0, 4), std::invalid_argument);
}
