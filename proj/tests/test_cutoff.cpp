#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "dgbound/cutoff.hpp"

using namespace dgb;

TEST_CASE("transition profile: plateaus, symmetry, derivative sups") {
  // width 1/(2 c3); for c3 = 1 the transition lives on [0.5, 1]
  TransitionProfile eta = build_eta(1.0);
  CHECK(eta(0.0) == 0.0);
  CHECK(eta(0.4999) == 0.0);
  CHECK(eta(1.0) == 1.0);
  CHECK(eta(5.0) == 1.0);
  CHECK(eta(0.75) == doctest::Approx(0.5).epsilon(1e-14));  // smoothstep midpoint
  CHECK(eta.sup_d1() == doctest::Approx((15.0 / 8.0) / 0.5).epsilon(1e-14));  // 3.75
  CHECK(eta.sup_d2() == doctest::Approx((10.0 / std::sqrt(3.0)) / 0.25).epsilon(1e-14));

  // the closed-form sups really dominate the sampled derivatives
  TransitionProfile eta2 = build_eta(2.0);
  double d1 = 0.0, d2 = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double t = i / 2000.0;
    d1 = std::max(d1, std::abs(eta2.derivative(t)));
    d2 = std::max(d2, std::abs(eta2.second_derivative(t)));
  }
  CHECK(d1 <= eta2.sup_d1() * (1.0 + 1e-12));
  CHECK(d1 >= eta2.sup_d1() * 0.999);
  CHECK(d2 <= eta2.sup_d2() * (1.0 + 1e-12));
  CHECK(d2 >= eta2.sup_d2() * 0.999);
}

TEST_CASE("regularized distance: vanishes on X, linear far field, comparability") {
  Grid g = Grid::make_1d(0.0, 4.0, 256);
  Region X = region_from_box(g, {0.0, 0.0}, {0.5, 0.0}, "X");
  const double c3 = 2.0;
  const Field rho = build_regularized_distance(X, g, c3);

  for (int c : X.cell_indices) CHECK(rho[c] == 0.0);

  // far from X the smoothed distance has unit slope (clear of the right edge,
  // where the averaging stencil clips)
  const double h = g.spacing(0);
  for (int c = 180; c < 200; ++c) {
    const double slope = (rho[c + 1] - rho[c - 1]) / (2.0 * h);
    CHECK(slope == doctest::Approx(1.0).epsilon(1e-2));
  }
  // comparability certificate held (construction would have thrown otherwise)
  for (int c = 0; c < g.cell_count(); ++c) {
    const double delta = distance_to_region(g.cell_center(c), X, g);
    if (delta == 0.0) continue;
    CHECK(rho[c] >= delta / c3 - 1e-12);
    CHECK(rho[c] <= delta * c3 + 1e-12);
  }
}

TEST_CASE("regularized distance around a single cell tracks Euclidean distance") {
  Grid g = Grid::make_2d({0.0, 0.0}, {1.0, 1.0}, 48, 48);
  Region X = make_region({g.flat_index(24, 24)}, g, "pt");
  const double c3 = 2.0;
  const Field rho = build_regularized_distance(X, g, c3);
  for (int c = 0; c < g.cell_count(); ++c) {
    const double delta = (g.cell_center(c) - g.cell_center(g.flat_index(24, 24))).norm();
    if (delta == 0.0) continue;
    CHECK(rho[c] >= delta / c3 - 1e-12);
    CHECK(rho[c] <= delta * c3 + 1e-12);
  }
}

TEST_CASE("general cutoff: plateaus, monotone 1D profile, measured constants") {
  Grid g = Grid::make_1d(0.0, 1.0, 512);
  Region X = region_from_box(g, {0.0, 0.0}, {0.2, 0.0}, "X");
  Region Y = region_from_box(g, {0.8, 0.0}, {1.0, 0.0}, "Y");
  const double c3 = 2.0;
  const CutoffCertificate cert = build_xi_general(X, Y, g, c3);

  for (int c : X.cell_indices) CHECK(cert.xi[c] == 0.0);
  for (int c : Y.cell_indices) CHECK(cert.xi[c] == 1.0);
  for (int c = 0; c + 1 < g.cell_count(); ++c) CHECK(cert.xi[c + 1] >= cert.xi[c] - 1e-12);
  CHECK(cert.c1_measured <= 1.1 * cert.c1_analytic);
  CHECK(cert.c2_measured <= 1.1 * cert.c2_analytic);
  CHECK(cert.c1_measured >= 1.0);  // any 0-to-1 transition over <= d forces this
}

TEST_CASE("mirror symmetry: 1 - xi is a valid cutoff with roles interchanged") {
  Grid g = Grid::make_1d(0.0, 1.0, 512);
  Region X = region_from_box(g, {0.0, 0.0}, {0.2, 0.0}, "X");
  Region Y = region_from_box(g, {0.8, 0.0}, {1.0, 0.0}, "Y");
  const CutoffCertificate fwd = build_xi_general(X, Y, g, 2.0);

  // 1 - xi separates (Y, X) with the plateaus swapped and identical
  // derivative sups, to within rounding
  const Field mirror = Field::Ones(fwd.xi.size()) - fwd.xi;
  for (int c : Y.cell_indices) CHECK(mirror[c] == 0.0);
  for (int c : X.cell_indices) CHECK(mirror[c] == 1.0);
  const auto grad_f = field_gradient(fwd.xi, g);
  const auto grad_m = field_gradient(mirror, g);
  for (int c = 0; c < g.cell_count(); ++c)
    CHECK(std::abs(grad_m[c][0]) == doctest::Approx(std::abs(grad_f[c][0])).epsilon(1e-12));

  // the construction itself is one-sided (distance mollified from the first
  // region), so rerunning it from Y yields a different profile with
  // comparable certificate constants rather than 1 - xi pointwise
  const CutoffCertificate rev = build_xi_general(Y, X, g, 2.0);
  CHECK(rev.c1_measured == doctest::Approx(fwd.c1_measured).epsilon(0.05));
  CHECK(rev.c2_measured == doctest::Approx(fwd.c2_measured).epsilon(0.10));
}

TEST_CASE("under-resolved transition layer is rejected") {
  Grid g = Grid::make_1d(0.0, 1.0, 16);
  Region X = region_from_box(g, {0.0, 0.0}, {0.2, 0.0});
  Region Y = region_from_box(g, {0.8, 0.0}, {1.0, 0.0});
  CHECK_THROWS_WITH_AS(build_xi_general(X, Y, g, 2.0),
                       doctest::Contains("under-resolved"), std::runtime_error);
}

TEST_CASE("measured constants are stable under grid refinement") {
  auto constants = [](int n) {
    Grid g = Grid::make_1d(0.0, 1.0, n);
    Region X = region_from_box(g, {0.0, 0.0}, {0.2, 0.0});
    Region Y = region_from_box(g, {0.8, 0.0}, {1.0, 0.0});
    return build_xi_general(X, Y, g, 2.0);
  };
  const auto coarse = constants(512);
  const auto fine = constants(1024);
  CHECK(fine.c1_measured == doctest::Approx(coarse.c1_measured).epsilon(0.05));
  CHECK(fine.c2_measured == doctest::Approx(coarse.c2_measured).epsilon(0.05));
}

TEST_CASE("measured constants are invariant under dilation") {
  auto constants = [](double lambda) {
    Grid g = Grid::make_1d(0.0, lambda, 512);
    Region X = region_from_box(g, {0.0, 0.0}, {0.2 * lambda, 0.0});
    Region Y = region_from_box(g, {0.8 * lambda, 0.0}, {lambda, 0.0});
    return build_xi_general(X, Y, g, 2.0);
  };
  const auto unit = constants(1.0);
  const auto big = constants(7.0);
  CHECK(big.c1_measured == doctest::Approx(unit.c1_measured).epsilon(0.05));
  CHECK(big.c2_measured == doctest::Approx(unit.c2_measured).epsilon(0.05));
}

TEST_CASE("sharp cutoff on slabs: linear core, concavity, plateau levels") {
  Grid g = Grid::make_1d(-1.0, 2.0, 600);  // h = 0.005, gap (0, 1)
  Region X = region_from_box(g, {-1.0, 0.0}, {0.0, 0.0}, "X");
  Region Y = region_from_box(g, {1.0, 0.0}, {2.0, 0.0}, "Y");
  const double eps = 0.1;
  const CutoffCertificate cert = build_xi_sharp(X, Y, g, eps);

  CHECK(cert.mode == CutoffMode::Sharp);
  CHECK(cert.concavity_ok);
  CHECK(cert.c1_measured <= 1.0 + 1e-12);  // |grad xi| d <= 1
  for (int c : X.cell_indices) CHECK(cert.xi[c] <= eps / 2 + 1e-14);
  for (int c : Y.cell_indices) CHECK(cert.xi[c] >= 1.0 - eps / 2 - 1e-14);

  // linear core: xi = eps/2 + (1-eps) m with m measured from the X edge
  const double d = cert.d_XY;
  const double edge = g.cell_center(X.cell_indices.back())[0];
  for (int c = 0; c < g.cell_count(); ++c) {
    const double m = (g.cell_center(c)[0] - edge) / d;
    if (m > 0.02 && m < 0.98)
      CHECK(cert.xi[c] == doctest::Approx(eps / 2 + (1 - eps) * m).epsilon(1e-12));
  }
}

TEST_CASE("sharp cutoff works with X above Y and rejects non-slabs") {
  Grid g = Grid::make_2d({0.0, -2.0}, {1.0, 2.0}, 16, 128);
  Region X = region_from_box(g, {0.0, 1.0}, {1.0, 2.0}, "X");
  Region Y = region_from_box(g, {0.0, -2.0}, {1.0, -1.0}, "Y");
  const CutoffCertificate cert = build_xi_sharp(X, Y, g, 0.2);
  for (int c : X.cell_indices) CHECK(cert.xi[c] <= 0.1 + 1e-14);
  for (int c : Y.cell_indices) CHECK(cert.xi[c] >= 0.9 - 1e-14);

  Region blob = make_region({g.flat_index(3, 60), g.flat_index(4, 61)}, g);
  CHECK_THROWS_WITH_AS(build_xi_sharp(blob, Y, g, 0.2),
                       doctest::Contains("separated slabs"), std::runtime_error);
}

TEST_CASE("tilting exponent phi = mu (1 - 2 xi)") {
  Grid g = Grid::make_1d(0.0, 1.0, 512);
  Region X = region_from_box(g, {0.0, 0.0}, {0.2, 0.0}, "X");
  Region Y = region_from_box(g, {0.8, 0.0}, {1.0, 0.0}, "Y");
  auto cert = std::make_shared<const CutoffCertificate>(build_xi_general(X, Y, g, 2.0));

  const TiltingExponent zero = build_phi(cert, 0.0);
  CHECK(zero.phi.cwiseAbs().maxCoeff() == 0.0);

  const double mu = 1.7;
  const TiltingExponent te = build_phi(cert, mu);
  for (int c = 0; c < g.cell_count(); ++c)
    CHECK(te.phi[c] == doctest::Approx(mu * (1.0 - 2.0 * cert->xi[c])).epsilon(1e-14));
  for (int c : X.cell_indices) CHECK(te.phi[c] == mu);
  for (int c : Y.cell_indices) CHECK(te.phi[c] == -mu);

  // the weight identities chi_X e^{-phi} = e^{-mu} chi_X and
  // e^{phi} chi_Y = e^{-mu} chi_Y hold exactly on the plateaus: every plateau
  // cell carries the identical weight value
  const Field w_minus = (-te.phi.array()).exp().matrix();
  const Field w_plus = te.phi.array().exp().matrix();
  const double wx = w_minus[X.cell_indices.front()];
  const double wy = w_plus[Y.cell_indices.front()];
  for (int c : X.cell_indices) CHECK(w_minus[c] == wx);
  for (int c : Y.cell_indices) CHECK(w_plus[c] == wy);
  CHECK(wx == doctest::Approx(std::exp(-mu)).epsilon(1e-15));
  CHECK(wy == doctest::Approx(std::exp(-mu)).epsilon(1e-15));

  CHECK_THROWS_AS(build_phi(cert, -1.0), std::invalid_argument);
}
