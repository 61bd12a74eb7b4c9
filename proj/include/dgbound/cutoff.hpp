#pragma once

#include <memory>
#include <optional>

#include "dgbound/grid.hpp"

namespace dgb {

/// C^2 monotone transition profile: 0 for arguments below lo, 1 above hi,
/// quintic smoothstep in between. Derivative sup norms are closed-form.
struct TransitionProfile {
  double lo = 0.25;  ///< 1/(2 c3)
  double hi = 0.5;   ///< 1/c3
  double c3 = 2.0;

  double operator()(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;

  double sup_d1() const;  ///< sup |eta'|  = (15/8) / width
  double sup_d2() const;  ///< sup |eta''| = (10/sqrt 3) / width^2
  double c4() const { return std::max(sup_d1(), sup_d2()); }
};

/// Profile with plateau thresholds 1/(2 c3) and 1/c3. c3 >= 1 accepted here;
/// the distance regularization below needs c3 > 1.
TransitionProfile build_eta(double c3);

/// Distance-like function rho >= 0 vanishing on X: the cell-center distance
/// delta(x) = dist(x, X) averaged over a ball of radius delta(x)/(2 c3).
/// The comparability c3^-1 delta <= rho <= c3 delta is checked at every cell;
/// failure throws, reporting the worst ratio (c3 too small for the grid).
Field build_regularized_distance(const Region& X, const Grid& grid, double c3);

enum class CutoffMode { General, Sharp };

/// A cutoff field xi in [0,1] separating X (xi = 0) from Y (xi = 1), together
/// with the grid-measured constants that enter the bound machinery:
///   c1 = sup |grad xi| * d_XY,   c2 = sup |hess xi| * d_XY^2.
struct CutoffCertificate {
  Field xi;
  Region X, Y;
  Grid grid;
  double d_XY = 0.0;
  double c1_measured = 0.0;
  double c2_measured = 0.0;
  double c1_analytic = 0.0;  // c3 c4
  double c2_analytic = 0.0;  // 3 c3^3 c4
  double c3 = 0.0;
  bool concavity_ok = false;  // sharp mode: second differences <= 0 on the transition
  CutoffMode mode = CutoffMode::General;
  double epsilon = 0.0;  // sharp mode only
};

/// General construction xi = eta(rho / d_XY). Requires the grid to resolve
/// the transition layer: h <= d_XY / (8 c3^2). Measured constants must stay
/// within 10% of the analytic c3 c4 and 3 c3^3 c4.
CutoffCertificate build_xi_general(const Region& X, const Region& Y, const Grid& grid,
                                   double c3);

/// Sharp construction for separated axis-aligned slabs: linear core
/// eta(m) = eps/2 + (1-eps) m across the gap, smooth monotone caps confined
/// to X and Y. Certificate records |grad xi| <= 1/d and the concavity flag.
CutoffCertificate build_xi_sharp(const Region& X, const Region& Y, const Grid& grid,
                                 double epsilon);

/// Signed tilting exponent phi = mu (1 - 2 xi): +mu on X, -mu on Y. The
/// multiplication weights e^{phi} are taken pointwise downstream.
struct TiltingExponent {
  Field phi;
  double mu = 0.0;
  std::shared_ptr<const CutoffCertificate> certificate;
};

TiltingExponent build_phi(std::shared_ptr<const CutoffCertificate> cert, double mu);

/// Gradient of a cell field by central differences (one-sided at Neumann
/// boundaries, wrapped at periodic ones). Returns one Vector2d per cell.
std::vector<Eigen::Vector2d> field_gradient(const Field& f, const Grid& grid);

/// Finite-difference Hessian sup norm measure per cell: |f''| in 1D, the
/// Frobenius norm of the 2x2 difference Hessian in 2D.
Field field_hessian_norm(const Field& f, const Grid& grid);

}  // namespace dgb
