#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>

#include "dgbound/grid.hpp"

namespace dgb {

/// Time-dependent coefficient triple (a, b, c) of the divergence-form
/// generator  L u = div(a grad u) + <b, grad u> + c u.
///
/// Coefficients are pure evaluators of (x, t); tabulated data is wrapped into
/// evaluators by the factory functions below. In 1D only x[0] and the (0,0)
/// entry of a are meaningful. Evaluators must be pure: the solver and the
/// validators may call them concurrently over cells.
struct CoefficientSet {
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&, double)> a;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)> b;
  std::function<double(const Eigen::Vector2d&, double)> c;

  // Optional analytic derivatives; when present they take precedence over
  // central differencing.
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)> div_a;  // row divergence
  std::function<double(const Eigen::Vector2d&, double)> div_b;

  double window_start = 0.0;  ///< initial time s of the window
  double window_end = 1.0;    ///< truncation T of the paper-side sup over t > s

  /// False enables the factor-once fast path in the solver.
  bool time_dependent = true;

  std::string family = "custom";
};

struct AssumptionWitness {
  bool ok = true;
  double worst = 0.0;           // the offending value (meaning depends on the check)
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  double t = 0.0;
};

/// Outcome of checking the standing assumptions on (a, b, c):
/// a PSD, div b - c >= 0, c <= 0, <b, nu> = 0 on the boundary, and finiteness
/// of the derived constants.
struct AssumptionReport {
  AssumptionWitness psd;            // worst = smallest eigenvalue found
  AssumptionWitness divb_minus_c;   // worst = smallest div b - c
  AssumptionWitness c_nonpositive;  // worst = largest c
  AssumptionWitness boundary_b;     // worst = largest |<b, nu>| on boundary faces
  bool regularity_finite = true;    // alpha and beta finite
  bool window_truncated_note = true;  // sup over t>s realized on [s, T] only

  bool all_ok(bool relax_c_nonpositive = false) const {
    return psd.ok && divb_minus_c.ok && (relax_c_nonpositive || c_nonpositive.ok) &&
           boundary_b.ok && regularity_finite;
  }
};

struct ValidationOptions {
  double tol_psd = 1e-10;       // eigenvalue noise floor on genuinely PSD matrices
  double tol_sign = 1e-10;      // slack for the sign conditions
  double tol_boundary = 1e-10;  // slack for <b, nu> on boundary faces
};

/// Checks every assumption at every cell and uniformly sampled times in
/// [window_start, window_end]. Divergences use central differences (one-sided
/// at the boundary) unless analytic derivatives are supplied. Throws on
/// non-finite coefficient values, identifying the cell and time.
AssumptionReport validate_assumptions(const CoefficientSet& coeffs, const Grid& grid,
                                      int time_samples,
                                      const ValidationOptions& opts = {});

/// The bound constants
///   alpha = sup |a(x,t)|_op,   beta = sup ( |b(x,t)| + |div a(x,t)| ),
/// realized as maxima over grid cells and sampled times.
struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

AlphaBeta compute_alpha_beta(const CoefficientSet& coeffs, const Grid& grid,
                             int time_samples);

/// Operator norm of a symmetric 2x2 (or effectively 1x1) matrix.
double sym_opnorm(const Eigen::Matrix2d& m, int dim);

/// Smallest eigenvalue of a symmetric 2x2 (or effectively 1x1) matrix.
double sym_eigmin(const Eigen::Matrix2d& m, int dim);

// ---------------------------------------------------------------------------
// Built-in coefficient families (selectable by name in run configurations)
// ---------------------------------------------------------------------------

/// Constant a = a0 (scalar: a0*I), b = b0, c = c0.
CoefficientSet make_constant(double a0, const Eigen::Vector2d& b0, double c0,
                             int dim = 1);
CoefficientSet make_constant_matrix(const Eigen::Matrix2d& a0,
                                    const Eigen::Vector2d& b0, double c0);

/// 1D traveling ramp a(x,t) = A(x - speed*t), with A(m) = 0 for m <= 0,
/// A(m) = m on (0, R), A(m) = R beyond; b = c = 0.
CoefficientSet make_ramp(double speed, double R);

/// Scalar diffusion equal to alpha0 outside the listed x-intervals and 0
/// inside them (transition smoothed over width w when w > 0); b = c = 0.
CoefficientSet make_checkerboard(double alpha0,
                                 std::vector<std::pair<double, double>> dead_intervals,
                                 double smoothing_width = 0.0);

/// 2D divergence-free rotation drift b = omega * chi(r) * (-(y-cy), x-cx)
/// with chi a smooth radial cutoff equal to 1 for r <= r_on and 0 for
/// r >= r_off, so that <b, nu> = 0 on the box boundary; a = a0*I, c = 0.
CoefficientSet make_rotation_drift(double a0, double omega,
                                   const Eigen::Vector2d& center, double r_on,
                                   double r_off);

/// Tabulated per-cell samples at a strictly increasing list of times.
/// Values are interpolated linearly in t (clamped outside the sample range)
/// and bilinearly in x between cell centers.
struct TabulatedCoefficients {
  std::vector<double> times;
  // one entry per time sample; each field has one value per cell
  std::vector<Field> a_xx, a_yy, a_xy;  // a_xy/a_yy empty in 1D
  std::vector<Field> b_x, b_y;          // b_y empty in 1D
  std::vector<Field> c;
};

CoefficientSet make_tabulated(TabulatedCoefficients table, const Grid& grid);

/// Reads TabulatedCoefficients from CSV with header
///   t,x[,y],a_xx[,a_yy,a_xy],b_x[,b_y],c
/// rows sorted by time then cell order.
CoefficientSet load_coefficients_csv(const std::string& path, const Grid& grid);

/// Wraps coeffs with a scaled: a -> factor*a (used by parameter sweeps).
CoefficientSet scale_a(const CoefficientSet& coeffs, double factor);
/// Wraps coeffs with b scaled: b -> factor*b.
CoefficientSet scale_b(const CoefficientSet& coeffs, double factor);

}  // namespace dgb
