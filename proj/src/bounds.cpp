#include "dgbound/bounds.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

namespace dgb {

namespace {

std::vector<double> window_samples(double s, double t, int time_samples) {
  std::vector<double> ts(std::max(2, time_samples));
  for (std::size_t i = 0; i < ts.size(); ++i)
    ts[i] = s + (t - s) * static_cast<double>(i) / (ts.size() - 1);
  return ts;
}

// Finite-volume divergence of a grad(phi) with face-averaged a: the same
// stencil structure as the solver, so the tilted check inherits the discrete
// integration-by-parts identity.
double fv_div_a_grad(const Field& phi, const CoefficientSet& coeffs, const Grid& grid,
                     int cell, double t) {
  double out = 0.0;
  const auto ij = grid.multi_index(cell);
  for (int axis = 0; axis < grid.dim; ++axis) {
    const double h = grid.spacing(axis);
    const int na = grid.cells[axis];
    const Eigen::Vector2d xc = grid.cell_center(cell);
    const double a_c = coeffs.a(xc, t)(axis, axis);
    for (int dir = -1; dir <= 1; dir += 2) {
      int nb_idx = ij[axis] + dir;
      if (grid.periodic(axis)) {
        nb_idx = (nb_idx + na) % na;
      } else if (nb_idx < 0 || nb_idx >= na) {
        continue;  // Neumann face: zero flux
      }
      const int nb = axis == 0 ? grid.flat_index(nb_idx, ij[1])
                               : grid.flat_index(ij[0], nb_idx);
      const double a_face = 0.5 * (a_c + coeffs.a(grid.cell_center(nb), t)(axis, axis));
      out += a_face * (phi[nb] - phi[cell]) / (h * h);
    }
  }
  return out;
}

}  // namespace

double tilted_generator_sup(const TiltingExponent& te, const CoefficientSet& coeffs,
                            const Grid& grid, const Region& U, int time_samples) {
  const Field& phi = te.phi;
  if (phi.size() != grid.cell_count())
    throw std::invalid_argument("tilting exponent size does not match grid");

  // constancy of phi on the complement of U: adjacent cells both outside U
  // must carry equal values
  {
    std::unordered_set<int> in_u(U.cell_indices.begin(), U.cell_indices.end());
    const double scale = std::max(1.0, phi.cwiseAbs().maxCoeff());
    for (int c = 0; c < grid.cell_count(); ++c) {
      if (in_u.count(c)) continue;
      const auto ij = grid.multi_index(c);
      for (int axis = 0; axis < grid.dim; ++axis) {
        int nb_idx = ij[axis] + 1;
        if (grid.periodic(axis))
          nb_idx %= grid.cells[axis];
        else if (nb_idx >= grid.cells[axis])
          continue;
        const int nb = axis == 0 ? grid.flat_index(nb_idx, ij[1])
                                 : grid.flat_index(ij[0], nb_idx);
        if (in_u.count(nb)) continue;
        if (std::abs(phi[nb] - phi[c]) > 1e-12 * scale)
          throw std::invalid_argument("tilting exponent not localized to U");
      }
    }
  }

  const auto grad = field_gradient(phi, grid);
  double A = 0.0;
  for (double t : window_samples(coeffs.window_start, coeffs.window_end, time_samples)) {
    for (int c : U.cell_indices) {
      const Eigen::Vector2d x = grid.cell_center(c);
      const Eigen::Vector2d g2{grad[c][0], grid.dim == 2 ? grad[c][1] : 0.0};
      const Eigen::Matrix2d a = coeffs.a(x, t);
      const double quad = g2.dot(a * g2);
      const double div_term = fv_div_a_grad(phi, coeffs, grid, c, t);
      const double drift = coeffs.b(x, t).dot(g2);
      A = std::max(A, std::max(0.0, div_term + quad - drift));
    }
  }
  return A;
}

TiltedCheck check_tilted_propagator_inequality(const TiltingExponent& te,
                                               const CoefficientSet& coeffs,
                                               const PropagatorMatrix& M, const Field& v,
                                               const Region& U, int time_samples,
                                               double slack) {
  if (v.minCoeff() < 0.0)
    throw std::invalid_argument("tilted inequality requires nonnegative v");
  if (static_cast<int>(M.source_cells.size()) != M.grid.cell_count())
    throw std::invalid_argument("tilted check needs a full-source propagator");

  TiltedCheck out;
  out.A = tilted_generator_sup(te, coeffs, M.grid, U, time_samples);
  const Field weighted = (te.phi.array().exp() *
                          (M.M * (v.array() * (-te.phi.array()).exp()).matrix()).array())
                             .matrix();
  out.lhs = M.grid.cell_measure() * weighted.sum();
  out.rhs = std::exp((M.t - M.s) * out.A) * M.grid.cell_measure() * v.sum();
  out.pass = out.lhs <= out.rhs * (1.0 + slack);
  return out;
}

DecayRate decay_rate_G(double mu, double d, double t, double alpha, double beta,
                       double c1, double c2, int n) {
  if (!(d > 0.0) || !(t > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("decay rate needs d, t, alpha > 0");
  const double bracket = 1.0 - t * (alpha * n * c2 / (d * d) + beta * c1 / d);
  DecayRate out;
  out.G = -(4.0 * alpha * c1 * c1 * t / (d * d)) * mu * mu + 2.0 * bracket * mu;
  out.bracket_positive = bracket > 0.0;
  return out;
}

OptimalDecay optimize_G(double d, double t, double alpha, double beta, double c1,
                        double c2, int n) {
  const double bracket = 1.0 - t * (alpha * n * c2 / (d * d) + beta * c1 / d);
  if (bracket <= 0.0) return {0.0, 0.0};
  const double curv = 4.0 * alpha * c1 * c1 * t / (d * d);
  OptimalDecay out;
  out.mu_star = bracket / curv;
  out.G_star = bracket * bracket / curv;
  return out;
}

double constant_k(int n, double c1, double c2, double delta) {
  if (c1 < 1.0 || c2 < 0.0)
    throw std::invalid_argument("constant_k requires c1 >= 1 and c2 >= 0");
  return (1.0 + delta) * std::max(n * c2, c1);
}

ValidityCheck validity_interval_ok(double d, double t_minus_s, double alpha,
                                   double beta, double k) {
  if (!(d > 0.0)) throw std::invalid_argument("validity interval needs d > 0");
  ValidityCheck out;
  const double rate = k * (alpha / d + beta);
  out.max_time = rate > 0.0 ? d / rate : std::numeric_limits<double>::infinity();
  out.ok = t_minus_s <= out.max_time * (1.0 + 1e-12);
  return out;
}

double measure_opnorm(const PropagatorMatrix& M, const Region& X, const Region& Y,
                      double p) {
  if (X.empty() || Y.empty())
    throw std::invalid_argument("operator norm needs nonempty regions");
  std::vector<int> ycols(Y.cell_indices.size());
  for (std::size_t j = 0; j < Y.cell_indices.size(); ++j) {
    const int col = M.column_of(Y.cell_indices[j]);
    if (col < 0)
      throw std::invalid_argument("propagator is missing columns of Y");
    ycols[j] = col;
  }

  Eigen::MatrixXd B(X.size(), Y.size());
  for (int i = 0; i < X.size(); ++i)
    for (int j = 0; j < Y.size(); ++j) B(i, j) = M.M(X.cell_indices[i], ycols[j]);

  if (p == 1.0) {
    return B.size() ? B.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
  }
  if (std::isinf(p)) {
    return B.size() ? B.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  }
  if (p == 2.0) {
    // power iteration on B^T B with a deterministic all-ones start
    Eigen::VectorXd w = Eigen::VectorXd::Ones(B.cols());
    w.normalize();
    double sigma = 0.0;
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd bw = B * w;
      const double s = bw.norm();
      if (s == 0.0) return 0.0;
      Eigen::VectorXd next = B.transpose() * bw;
      const double nn = next.norm();
      if (nn == 0.0) return s;
      w = next / nn;
      if (std::abs(s - sigma) <= 1e-8 * s) {
        sigma = s;
        break;
      }
      sigma = s;
    }
    return sigma;
  }
  throw std::invalid_argument("operator norm implemented for p in {1, 2, inf}");
}

double predicted_bound(BoundMode mode, double d, double t_minus_s, double alpha,
                       double k) {
  switch (mode) {
    case BoundMode::Theorem1:
      return std::exp(-d * d / (4.0 * k * k * alpha * t_minus_s));
    case BoundMode::Sharp:
      return std::exp(-d * d / (4.0 * alpha * t_minus_s));
    case BoundMode::Tail:
      // d carries r here
      return std::exp(-d * d / (64.0 * k * k * alpha * t_minus_s));
  }
  return 1.0;
}

namespace {

bool coefficients_x_independent(const CoefficientSet& coeffs, const Grid& grid,
                                int time_samples) {
  for (double t : window_samples(coeffs.window_start, coeffs.window_end, time_samples)) {
    const Eigen::Matrix2d ref = coeffs.a(grid.cell_center(0), t);
    for (int c = 1; c < grid.cell_count(); ++c) {
      const Eigen::Matrix2d a = coeffs.a(grid.cell_center(c), t);
      if ((a - ref).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, sym_opnorm(ref, grid.dim)))
        return false;
    }
    for (int c = 0; c < grid.cell_count(); ++c) {
      const Eigen::Vector2d b = coeffs.b(grid.cell_center(c), t);
      if (std::max(std::abs(b[0]), std::abs(b[1])) > 1e-14) return false;
    }
  }
  return true;
}

}  // namespace

BoundComparison certify_dg_bound(const CoefficientSet& coeffs, const Grid& grid,
                                 const Region& X_in, const Region& Y_in, double s,
                                 double t, double p, const CertifyConfig& cfg,
                                 BoundMode mode, const std::optional<TailGeometry>& tail) {
  CoefficientSet windowed = coeffs;
  windowed.window_start = s;
  windowed.window_end = t;

  const bool relax_c = cfg.relax_c_for_p1 && p == 1.0;
  const AssumptionReport rep = validate_assumptions(windowed, grid, cfg.time_samples);
  if (!rep.all_ok(relax_c)) {
    std::ostringstream os;
    os << "coefficient assumptions violated:";
    if (!rep.psd.ok) os << " a not PSD (eigmin " << rep.psd.worst << ")";
    if (!rep.divb_minus_c.ok) os << " div b - c < 0 (" << rep.divb_minus_c.worst << ")";
    if (!rep.c_nonpositive.ok && !relax_c) os << " c > 0 (" << rep.c_nonpositive.worst << ")";
    if (!rep.boundary_b.ok) os << " <b,nu> != 0 on boundary (" << rep.boundary_b.worst << ")";
    if (!rep.regularity_finite) os << " alpha/beta not finite";
    throw std::runtime_error(os.str());
  }

  Region X = X_in, Y = Y_in;
  if (mode == BoundMode::Tail) {
    if (!tail) throw std::invalid_argument("tail mode needs a TailGeometry");
    X = region_ball(grid, tail->center, tail->r / 4.0, "B_{r/4}");
    Y = region_complement(region_ball(grid, tail->center, tail->r / 2.0), grid,
                          "B_{r/2}^c");
    if (X.empty() || Y.empty())
      throw std::invalid_argument("tail geometry leaves an empty region on this grid");
  }

  const AlphaBeta ab = compute_alpha_beta(windowed, grid, cfg.time_samples);
  const double d = region_distance(X, Y, grid);

  BoundComparison cmp;
  cmp.x_label = X.label.empty() ? "X" : X.label;
  cmp.y_label = Y.label.empty() ? "Y" : Y.label;
  cmp.d_XY = d;
  cmp.p = p;
  cmp.s = s;
  cmp.t = t;
  cmp.alpha = ab.alpha;
  cmp.beta = ab.beta;
  cmp.mode = mode;
  cmp.slack = cfg.slack;

  if (mode == BoundMode::Sharp) {
    if (!coefficients_x_independent(windowed, grid, cfg.time_samples))
      throw std::runtime_error(
          "sharp mode requires a independent of x and b = 0");
    const auto cert = build_xi_sharp(X, Y, grid, cfg.sharp_epsilon);
    cmp.c1 = cert.c1_measured;
    cmp.c2 = cert.c2_measured;
    cmp.k = 1.0;
    cmp.k_analytic = 1.0;
    cmp.validity_ok = true;  // sharp bound holds for all t > s
    cmp.max_valid_time = std::numeric_limits<double>::infinity();
  } else {
    const auto cert = build_xi_general(X, Y, grid, cfg.c3);
    cmp.c1 = cert.c1_measured;
    cmp.c2 = cert.c2_measured;
    cmp.k_analytic = constant_k(grid.dim, cert.c1_analytic, cert.c2_analytic, cfg.k_delta);
    cmp.k = cfg.use_measured_k
                ? constant_k(grid.dim, std::max(1.0, cert.c1_measured),
                             cert.c2_measured, cfg.k_delta)
                : cmp.k_analytic;
  }

  PropagatorMatrix P = assemble_propagator(windowed, grid, s, t, cfg.solver, Y);
  cmp.alpha_num = P.alpha_num;
  cmp.alpha_effective =
      mode == BoundMode::Sharp ? ab.alpha : std::max(ab.alpha, P.alpha_num);

  if (mode != BoundMode::Sharp) {
    const auto validity =
        validity_interval_ok(d, t - s, cmp.alpha_effective, ab.beta, cmp.k);
    cmp.validity_ok = validity.ok;
    cmp.max_valid_time = validity.max_time;
  }

  const double dist_for_bound = mode == BoundMode::Tail ? tail->r : d;
  cmp.predicted_bound =
      predicted_bound(mode, dist_for_bound, t - s, cmp.alpha_effective, cmp.k);
  cmp.measured_norm = measure_opnorm(P, X, Y, p);
  cmp.applicable = cmp.validity_ok;
  cmp.pass = cmp.measured_norm <= cmp.predicted_bound * (1.0 + cfg.slack);
  return cmp;
}

BoundComparison compare_solution_bound(double measured_ratio, double d, double s,
                                       double t, double p, double alpha, double beta,
                                       double alpha_num, double c1, double c2, int n,
                                       double slack, double k_delta) {
  BoundComparison cmp;
  cmp.d_XY = d;
  cmp.p = p;
  cmp.s = s;
  cmp.t = t;
  cmp.alpha = alpha;
  cmp.beta = beta;
  cmp.alpha_num = alpha_num;
  cmp.alpha_effective = std::max(alpha, alpha_num);
  cmp.c1 = c1;
  cmp.c2 = c2;
  cmp.k = constant_k(n, std::max(1.0, c1), c2, k_delta);
  cmp.k_analytic = cmp.k;
  cmp.mode = BoundMode::Theorem1;
  cmp.slack = slack;
  const auto validity = validity_interval_ok(d, t - s, cmp.alpha_effective, beta, cmp.k);
  cmp.validity_ok = validity.ok;
  cmp.max_valid_time = validity.max_time;
  cmp.predicted_bound =
      predicted_bound(BoundMode::Theorem1, d, t - s, cmp.alpha_effective, cmp.k);
  cmp.measured_norm = measured_ratio;
  cmp.applicable = cmp.validity_ok;
  cmp.pass = cmp.measured_norm <= cmp.predicted_bound * (1.0 + slack);
  return cmp;
}

}  // namespace dgb
