#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>

#include "dgbound/coefficients.hpp"

using namespace dgb;

TEST_CASE("validator accepts the identity coefficients") {
  Grid g = Grid::make_1d(0.0, 1.0, 16);
  CoefficientSet cs = make_constant(1.0, {0.0, 0.0}, 0.0);
  const AssumptionReport rep = validate_assumptions(cs, g, 4);
  CHECK(rep.psd.ok);
  CHECK(rep.divb_minus_c.ok);
  CHECK(rep.c_nonpositive.ok);
  CHECK(rep.boundary_b.ok);
  CHECK(rep.regularity_finite);
  CHECK(rep.all_ok());
}

TEST_CASE("validator flags positive c with a witness") {
  Grid g = Grid::make_1d(0.0, 1.0, 16);
  CoefficientSet cs = make_constant(1.0, {0.0, 0.0}, 0.1);
  const AssumptionReport rep = validate_assumptions(cs, g, 4);
  CHECK_FALSE(rep.c_nonpositive.ok);
  CHECK(rep.c_nonpositive.worst == doctest::Approx(0.1));
}

TEST_CASE("p = 1 relaxation still requires div b - c >= 0") {
  // c > 0 is admissible for p = 1 only when the drift divergence covers it
  Grid g = Grid::make_1d(0.0, 1.0, 32);
  CoefficientSet cs = make_constant(1.0, {0.0, 0.0}, 0.5);
  cs.b = [](const Eigen::Vector2d& x, double) {
    return Eigen::Vector2d(x[0] * (1.0 - x[0]) * 4.0, 0.0);  // vanishes on the boundary
  };
  cs.div_b = [](const Eigen::Vector2d& x, double) { return 4.0 - 8.0 * x[0]; };
  cs.c = [](const Eigen::Vector2d& x, double) { return 4.0 - 8.0 * x[0] - 0.25; };
  const AssumptionReport rep = validate_assumptions(cs, g, 3);
  CHECK_FALSE(rep.c_nonpositive.ok);  // c > 0 near the left edge
  CHECK(rep.divb_minus_c.ok);
  CHECK(rep.boundary_b.ok);
  CHECK_FALSE(rep.all_ok());
  CHECK(rep.all_ok(/*relax_c_nonpositive=*/true));  // the p = 1 relaxation
}

TEST_CASE("validator flags div b - c < 0 for inward drift") {
  Grid g = Grid::make_1d(-1.0, 1.0, 32);
  CoefficientSet cs = make_constant(1.0, {0.0, 0.0}, 0.0);
  cs.b = [](const Eigen::Vector2d& x, double) {
    return Eigen::Vector2d(-x[0], 0.0);
  };
  cs.div_b = nullptr;  // force the central-difference path
  const AssumptionReport rep = validate_assumptions(cs, g, 3);
  CHECK_FALSE(rep.divb_minus_c.ok);
  CHECK(rep.divb_minus_c.worst == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK_FALSE(rep.boundary_b.ok);  // b(+-1) = -+1 has a normal component
}

TEST_CASE("non-finite coefficients are rejected with location") {
  Grid g = Grid::make_1d(0.0, 1.0, 8);
  CoefficientSet cs = make_constant(1.0, {0.0, 0.0}, 0.0);
  cs.c = [](const Eigen::Vector2d& x, double) {
    return x[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  };
  CHECK_THROWS_WITH_AS(validate_assumptions(cs, g, 2),
                       doctest::Contains("non-finite coefficient"), std::runtime_error);
}

TEST_CASE("alpha and beta for constant coefficients") {
  Grid g = Grid::make_1d(0.0, 1.0, 16);
  {
    auto ab = compute_alpha_beta(make_constant(0.5, {0.0, 0.0}, 0.0), g, 4);
    CHECK(ab.alpha == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ab.beta == doctest::Approx(0.0));
  }
  {
    auto ab = compute_alpha_beta(make_constant(1.0, {0.3, 0.0}, 0.0), g, 4);
    CHECK(ab.alpha == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ab.beta == doctest::Approx(0.3).epsilon(1e-14));
  }
  // sampled sup of a constant does not depend on the sampling density
  for (int samples : {2, 5, 17}) {
    auto ab = compute_alpha_beta(make_constant(2.0, {0.1, 0.0}, -1.0), g, samples);
    CHECK(ab.alpha == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ab.beta == doctest::Approx(0.1).epsilon(1e-14));
  }
}

TEST_CASE("ramp coefficient: alpha = R and the slope feeds beta") {
  // a(x,t) = A(x - speed t) with unit upward slope capped at R
  const double R = 0.25, speed = 0.5;
  Grid g = Grid::make_1d(-1.0, 3.0, 512);
  CoefficientSet cs = make_ramp(speed, R);
  cs.window_start = 0.0;
  cs.window_end = 1.0;
  auto ab = compute_alpha_beta(cs, g, 5);
  CHECK(ab.alpha == doctest::Approx(R).epsilon(1e-12));
  CHECK(ab.beta == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("alpha scales exactly and beta never decreases under a-scaling") {
  Grid g = Grid::make_1d(0.0, 1.0, 24);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    CoefficientSet cs = make_constant(unif(rng), {unif(rng), 0.0}, -unif(rng));
    const double freq = unif(rng);
    cs.a = [freq](const Eigen::Vector2d& x, double) {
      Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
      A(0, 0) = 1.0 + 0.5 * std::sin(freq * x[0]);
      return A;
    };
    cs.div_a = nullptr;
    const double lam = 1.0 + unif(rng);
    auto base = compute_alpha_beta(cs, g, 3);
    auto scaled = compute_alpha_beta(scale_a(cs, lam), g, 3);
    CHECK(scaled.alpha == doctest::Approx(lam * base.alpha).epsilon(1e-12));
    CHECK(scaled.beta >= base.beta - 1e-12);
  }
}

TEST_CASE("central-difference divergence is exact on linear drift fields") {
  Grid g = Grid::make_2d({0.0, 0.0}, {1.0, 1.0}, 20, 20);
  Eigen::Matrix2d M;
  M << 0.7, -0.3, 0.2, 1.1;  // div b = trace = 1.8
  CoefficientSet cs = make_constant(1.0, {0.0, 0.0}, 0.0, 2);
  cs.b = [M](const Eigen::Vector2d& x, double) { return (M * x).eval(); };
  cs.div_b = nullptr;
  cs.c = [](const Eigen::Vector2d&, double) { return -2.0; };  // keep div b - c >= 0
  const AssumptionReport rep = validate_assumptions(cs, g, 2);
  // interior central differences must hit trace(M) - c = 3.8 to 1e-10
  CHECK(rep.divb_minus_c.worst >= 1.8 + 2.0 - 1e-10);
  CHECK(rep.divb_minus_c.worst <= 1.8 + 2.0 + 1e-10);
}

TEST_CASE("checkerboard degeneracy vanishes on the dead interval") {
  Grid g = Grid::make_1d(0.0, 1.0, 64);
  CoefficientSet cs = make_checkerboard(2.0, {{0.4, 0.6}}, 0.05);
  CHECK(cs.a({0.5, 0.0}, 0.0)(0, 0) == 0.0);
  CHECK(cs.a({0.1, 0.0}, 0.0)(0, 0) == doctest::Approx(2.0));
  const AssumptionReport rep = validate_assumptions(cs, g, 2);
  CHECK(rep.psd.ok);
}

TEST_CASE("rotation drift is divergence-free and tangent to the box") {
  Grid g = Grid::make_2d({0.0, 0.0}, {1.0, 1.0}, 24, 24);
  CoefficientSet cs = make_rotation_drift(0.5, 1.0, {0.5, 0.5}, 0.2, 0.45);
  const AssumptionReport rep = validate_assumptions(cs, g, 3);
  CHECK(rep.boundary_b.ok);
  CHECK(rep.divb_minus_c.ok);
  CHECK(rep.all_ok());
}

TEST_CASE("tabulated coefficients round-trip through CSV") {
  Grid g = Grid::make_1d(0.0, 1.0, 4);
  const std::string path = "coeffs_test.csv";
  {
    std::ofstream out(path);
    out << "t,x,a_xx,b_x,c\n";
    for (double t : {0.0, 1.0})
      for (int i = 0; i < 4; ++i)
        out << t << "," << g.cell_center(i)[0] << "," << (1.0 + t) << ",0.25,-0.5\n";
  }
  CoefficientSet cs = load_coefficients_csv(path, g);
  CHECK(cs.a({0.4, 0.0}, 0.0)(0, 0) == doctest::Approx(1.0));
  CHECK(cs.a({0.4, 0.0}, 1.0)(0, 0) == doctest::Approx(2.0));
  CHECK(cs.a({0.4, 0.0}, 0.5)(0, 0) == doctest::Approx(1.5));  // linear in t
  CHECK(cs.b({0.9, 0.0}, 0.3)[0] == doctest::Approx(0.25));
  auto ab = compute_alpha_beta(cs, g, 3);
  CHECK(ab.alpha == doctest::Approx(2.0));
  std::remove(path.c_str());
}
