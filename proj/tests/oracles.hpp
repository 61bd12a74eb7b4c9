// Test-only oracles, independent of the library's solve paths: a standalone
// tridiagonal solver, exact heat-kernel quadrature, and the exact-shift
// transport solution.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dgbound/grid.hpp"

namespace oracles {

/// Thomas algorithm for a tridiagonal system (sub, diag, super), independent
/// of any sparse machinery in the library.
inline Eigen::VectorXd tridiag_solve(const Eigen::VectorXd& sub,
                                     const Eigen::VectorXd& diag,
                                     const Eigen::VectorXd& super,
                                     Eigen::VectorXd rhs) {
  const int n = static_cast<int>(diag.size());
  Eigen::VectorXd c(n), d(n);
  c[0] = super[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (int i = 1; i < n; ++i) {
    const double m = diag[i] - sub[i] * c[i - 1];
    c[i] = (i < n - 1 ? super[i] : 0.0) / m;
    d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
  }
  for (int i = n - 2; i >= 0; --i) d[i] -= c[i] * d[i + 1];
  return d;
}

/// One implicit Euler step of the 1D Neumann heat equation with constant a,
/// assembled directly as a tridiagonal system.
inline Eigen::VectorXd implicit_heat_step(const Eigen::VectorXd& u, double a, double h,
                                          double dt) {
  const int n = static_cast<int>(u.size());
  const double lam = a * dt / (h * h);
  Eigen::VectorXd sub(n), diag(n), super(n);
  for (int i = 0; i < n; ++i) {
    const double wl = i > 0 ? lam : 0.0;
    const double wr = i < n - 1 ? lam : 0.0;
    sub[i] = -wl;
    super[i] = -wr;
    diag[i] = 1.0 + wl + wr;
  }
  return tridiag_solve(sub, diag, super, u);
}

/// Free-space heat kernel.
inline double heat_kernel(double x, double alpha, double t) {
  return std::exp(-x * x / (4.0 * alpha * t)) / std::sqrt(4.0 * M_PI * alpha * t);
}

/// Exact solution of the 1D free-space heat equation from gridded initial
/// data, by midpoint quadrature of the kernel convolution.
inline Eigen::VectorXd heat_convolution(const dgb::Grid& grid, const Eigen::VectorXd& u0,
                                        double alpha, double t) {
  const int n = grid.cell_count();
  const double h = grid.spacing(0);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    const double xi = grid.cell_center(i)[0];
    for (int j = 0; j < n; ++j)
      acc += heat_kernel(xi - grid.cell_center(j)[0], alpha, t) * u0[j] * h;
    out[i] = acc;
  }
  return out;
}

/// Exact transport solution u(x, t) = u0(x + b t) on the grid: a shift by an
/// integer number of cells (b t must be cell-aligned), semi-Lagrangian style.
inline Eigen::VectorXd exact_shift(const dgb::Grid& grid, const Eigen::VectorXd& u0,
                                   double b, double t) {
  const double h = grid.spacing(0);
  const double cells = b * t / h;
  const long k = std::lround(cells);
  if (std::abs(cells - k) > 1e-9)
    throw std::invalid_argument("exact shift oracle needs a cell-aligned b*t");
  const int n = grid.cell_count();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const long src = i + k;
    if (src >= 0 && src < n) out[i] = u0[src];
  }
  return out;
}

/// The half-line tail of the Gaussian kernel: the exact L^inf -> L^inf norm
/// of chi_{x<=0} P_t chi_{y>=d} for the free heat equation.
inline double gaussian_halfline_tail(double d, double alpha, double t) {
  return 0.5 * std::erfc(d / (2.0 * std::sqrt(alpha * t)));
}

/// Same quantity by direct quadrature of the kernel over y >= d.
inline double gaussian_halfline_tail_quadrature(double d, double alpha, double t) {
  const double sigma = std::sqrt(2.0 * alpha * t);
  const double upper = d + 12.0 * sigma;
  const int n = 200000;
  const double h = (upper - d) / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += heat_kernel(d + (i + 0.5) * h, alpha, t) * h;
  return acc;
}

}  // namespace oracles
