#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dgbound/bounds.hpp"
#include "dgbound/coefficients.hpp"
#include "dgbound/evolution.hpp"
#include "dgbound/grid.hpp"

namespace dgb {

// ---------------------------------------------------------------------------
// Traveling-wave scenario: moving-ramp diffusion coefficient with an exact
// wave solution. Demonstrates the ballistic validity interval for b = 0.
// ---------------------------------------------------------------------------

struct TravelingWaveCheckpoint {
  double time;
  double l1_error;        // numeric vs. translated exact profile
  double front_numeric;   // location of the profile maximum
  double front_exact;     // wave_speed * t
  double mass_ratio_X;    // |chi_X u_t|_1 / |u_0|_1, numeric
  double diffusive_reference;  // exp(-d^2 / (4 alpha_eff t)), the k = 1 scale
};

struct TravelingWaveReport {
  double alpha = 0.0;      // = R for the ramp coefficient
  double beta_const = 0.0; // >= 1 from the ramp slope
  std::vector<TravelingWaveCheckpoint> checkpoints;
  BoundComparison inside_validity;   // Theorem-1 certification at small t
  bool necessity_demonstrated = false;  // mass beats the k=1 diffusive scale
                                        // at some time outside the validity interval
  bool pass = false;
};

struct TravelingWaveOptions {
  double wave_speed = 0.5;  // beta of the wave; must be < 1 so the profile is L^p
  double ramp_height = 0.25;  // R
  double horizon = 4.5;
  int checkpoints = 9;
  CertifyConfig certify;
};

/// Exact wave profile value (0 for m <= 0, m^-beta on (0,R), exponential tail).
double traveling_wave_profile(double m, double wave_speed, double ramp_height);
/// Antiderivative of the profile, for exact cell averages.
double traveling_wave_profile_integral(double m, double wave_speed, double ramp_height);

TravelingWaveReport traveling_wave_scenario(const Grid& grid,
                                            const TravelingWaveOptions& opts);

// ---------------------------------------------------------------------------
// Porous medium: d/dt u = div((q + m u^{m-1}) grad u) by lagged-coefficient
// Picard iteration, with the self-similar profile as oracle when q = 0.
// ---------------------------------------------------------------------------

struct BarenblattParams {
  int n = 1;       // spatial dimension
  double m = 2.0;  // exponent, > 1
  double C = 0.25; // free constant, > 0

  double gamma() const { return 1.0 / (n * (m - 1.0) + 2.0); }
  double k_B() const { return (m - 1.0) * gamma() / (2.0 * m); }
  double radius(double t) const { return std::sqrt(C / k_B()) * std::pow(t, gamma()); }
  /// Self-similar profile value at (x, t).
  double value(const Eigen::Vector2d& x, double t) const;
  /// Total mass of the profile (time-invariant), by quadrature.
  double mass() const;
};

/// C giving unit total mass (bisection on the monotone mass(C)).
double barenblatt_unit_mass_C(int n, double m);

struct PorousMediumOptions {
  BarenblattParams params;
  std::function<double(const Eigen::Vector2d&)> q;  // nullptr means q = 0
  double t0 = 0.01;
  double t_final = 1.0;
  double dt = 1e-3;
  double epsilon = 1e-6;
  double picard_tol = 1e-8;
  int picard_max_iters = 100;
  double support_threshold = 1e-6;
  int checkpoints = 5;
  // nonlinear bound comparison: X at this center-distance from the initial
  // support, evaluated at the first checkpoint inside the validity interval
  double bound_distance = 0.4;
  double slack = 0.02;
  double cutoff_c3 = 2.0;
};

struct PorousMediumCheckpoint {
  double time;
  double mass_drift;       // relative to the initial mass
  double support_radius;   // measured at the threshold
  double support_exact;    // R(t)
  double l1_error;         // vs. exact profile (q = 0 only; 0 otherwise)
};

struct PorousMediumReport {
  std::vector<PorousMediumCheckpoint> checkpoints;
  double alpha_u = 0.0;  // sup |a(u)|
  double beta_u = 0.0;   // sup |grad_x a(u)|
  double gradient_formula_dev = 0.0;  // max rel. deviation from -(m-1) gamma x / t
  int picard_iters_max = 0;
  std::vector<BoundComparison> comparisons;
  Field final_state;
  bool pass = false;
};

PorousMediumReport porous_medium_scenario(const Grid& grid,
                                          const PorousMediumOptions& opts);

// ---------------------------------------------------------------------------
// McKean-Vlasov kinetic equation on an (x, v) phase grid with velocity
// diffusion; x is periodic (free-space proxy), v is a truncated Neumann box.
// ---------------------------------------------------------------------------

struct KineticState {
  Field f;       // phase-space density, x-fastest layout
  double sigma;  // velocity diffusion strength
  std::function<double(double)> K;  // force kernel on x (may be empty)
};

struct MckeanVlasovOptions {
  double sigma = 1.0;
  std::function<double(double)> K;  // empty means K = 0
  double K_inf = 0.0;               // |K|_inf, enters beta
  std::pair<double, double> Xv{1.0, 2.0};   // velocity slab of X
  std::pair<double, double> Yv{-2.0, -1.0}; // velocity slab of Y (initial support)
  std::vector<double> times{5e-4, 1e-3, 2e-3};
  std::vector<double> norms{1.0, std::numeric_limits<double>::infinity()};
  double dt = 1e-4;
  double slack = 0.02;
  double cutoff_c3 = 2.0;
  double boundary_mass_tol = 1e-6;
  bool disable_x_transport = false;
  // control run against the exact velocity heat kernel (K = 0 dynamics)
  bool run_control = true;
  double control_time = 0.05;
};

struct MckeanVlasovReport {
  double mass_drift = 0.0;
  double min_value = 0.0;
  double boundary_mass_fraction = 0.0;
  double k_used = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double beta_used = 0.0;
  double alpha_num_v = 0.0;  // upwind diffusivity along v only
  std::vector<BoundComparison> comparisons;
  double control_l1_error = 0.0;  // vs. quadrature of the exact v-kernel
  Field final_state;
  bool pass = false;
};

MckeanVlasovReport mckean_vlasov_scenario(const Grid& phase_grid,
                                          const MckeanVlasovOptions& opts);

}  // namespace dgb
