#include "dgbound/coefficients.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace dgb {

double sym_opnorm(const Eigen::Matrix2d& m, int dim) {
  if (dim == 1) return std::abs(m(0, 0));
  const double half_tr = 0.5 * (m(0, 0) + m(1, 1));
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double disc = std::sqrt(std::max(0.0, half_tr * half_tr - det));
  return std::max(std::abs(half_tr + disc), std::abs(half_tr - disc));
}

double sym_eigmin(const Eigen::Matrix2d& m, int dim) {
  if (dim == 1) return m(0, 0);
  const double half_tr = 0.5 * (m(0, 0) + m(1, 1));
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double disc = std::sqrt(std::max(0.0, half_tr * half_tr - det));
  return half_tr - disc;
}

namespace {

std::vector<double> sample_times(const CoefficientSet& coeffs, int time_samples) {
  if (time_samples < 2) throw std::invalid_argument("time_samples must be >= 2");
  std::vector<double> ts(time_samples);
  const double s = coeffs.window_start, T = coeffs.window_end;
  for (int i = 0; i < time_samples; ++i)
    ts[i] = s + (T - s) * static_cast<double>(i) / (time_samples - 1);
  return ts;
}

void require_finite(double v, const Eigen::Vector2d& x, double t, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite coefficient value (" << what << ") at x = (" << x[0] << ", "
       << x[1] << "), t = " << t;
    throw std::runtime_error(os.str());
  }
}

// Central difference stencil along `axis`, one-sided at the box boundary.
// Returns the two evaluation points and the divisor.
struct DiffStencil {
  Eigen::Vector2d xp, xm;
  double denom;
};

DiffStencil diff_stencil(const Grid& grid, const Eigen::Vector2d& x, int axis) {
  const double h = grid.spacing(axis);
  Eigen::Vector2d xp = x, xm = x;
  xp[axis] += h;
  xm[axis] -= h;
  double denom = 2.0 * h;
  if (xp[axis] > grid.upper[axis]) {
    xp[axis] = x[axis];
    denom = h;
  }
  if (xm[axis] < grid.lower[axis]) {
    xm[axis] = x[axis];
    denom = (xp[axis] == x[axis]) ? 1.0 : h;  // degenerate only on 1-cell axes
  }
  return {xp, xm, denom};
}

double divergence_b(const CoefficientSet& coeffs, const Grid& grid,
                    const Eigen::Vector2d& x, double t) {
  if (coeffs.div_b) return coeffs.div_b(x, t);
  double div = 0.0;
  for (int axis = 0; axis < grid.dim; ++axis) {
    auto st = diff_stencil(grid, x, axis);
    div += (coeffs.b(st.xp, t)[axis] - coeffs.b(st.xm, t)[axis]) / st.denom;
  }
  return div;
}

Eigen::Vector2d divergence_a(const CoefficientSet& coeffs, const Grid& grid,
                             const Eigen::Vector2d& x, double t) {
  if (coeffs.div_a) return coeffs.div_a(x, t);
  // (div a)^j = sum_i d_i a^{ij}
  Eigen::Vector2d div = Eigen::Vector2d::Zero();
  for (int i = 0; i < grid.dim; ++i) {
    auto st = diff_stencil(grid, x, i);
    Eigen::Matrix2d ap = coeffs.a(st.xp, t), am = coeffs.a(st.xm, t);
    for (int j = 0; j < grid.dim; ++j) div[j] += (ap(i, j) - am(i, j)) / st.denom;
  }
  return div;
}

}  // namespace

AssumptionReport validate_assumptions(const CoefficientSet& coeffs, const Grid& grid,
                                      int time_samples, const ValidationOptions& opts) {
  AssumptionReport rep;
  rep.psd.worst = std::numeric_limits<double>::infinity();
  rep.divb_minus_c.worst = std::numeric_limits<double>::infinity();
  rep.c_nonpositive.worst = -std::numeric_limits<double>::infinity();
  rep.boundary_b.worst = 0.0;

  const auto ts = sample_times(coeffs, time_samples);
  for (double t : ts) {
    for (int cidx = 0; cidx < grid.cell_count(); ++cidx) {
      const Eigen::Vector2d x = grid.cell_center(cidx);
      const Eigen::Matrix2d a = coeffs.a(x, t);
      const Eigen::Vector2d b = coeffs.b(x, t);
      const double c = coeffs.c(x, t);
      for (int i = 0; i < grid.dim; ++i) {
        require_finite(b[i], x, t, "b");
        for (int j = 0; j < grid.dim; ++j) require_finite(a(i, j), x, t, "a");
      }
      require_finite(c, x, t, "c");
      if (grid.dim == 2) {
        const double asym = std::abs(a(0, 1) - a(1, 0));
        if (asym > 1e-12 * std::max(1.0, sym_opnorm(a, 2)))
          throw std::runtime_error("coefficient a is not symmetric");
      }

      const double lam = sym_eigmin(a, grid.dim);
      if (lam < rep.psd.worst) rep.psd = {lam >= -opts.tol_psd, lam, x, t};

      const double g = divergence_b(coeffs, grid, x, t) - c;
      if (g < rep.divb_minus_c.worst) rep.divb_minus_c = {g >= -opts.tol_sign, g, x, t};

      if (c > rep.c_nonpositive.worst) rep.c_nonpositive = {c <= opts.tol_sign, c, x, t};
    }

    // <b, nu> at boundary face centers (skipped on periodic faces)
    for (int axis = 0; axis < grid.dim; ++axis) {
      if (grid.periodic(axis)) continue;
      const int other = 1 - axis;
      const int n_other = grid.dim == 2 ? grid.cells[other] : 1;
      for (int side = 0; side < 2; ++side) {
        for (int k = 0; k < n_other; ++k) {
          Eigen::Vector2d x = Eigen::Vector2d::Zero();
          x[axis] = side == 0 ? grid.lower[axis] : grid.upper[axis];
          if (grid.dim == 2) x[other] = grid.lower[other] + (k + 0.5) * grid.spacing(other);
          const double bn = std::abs(coeffs.b(x, t)[axis]);
          if (bn > rep.boundary_b.worst)
            rep.boundary_b = {bn <= opts.tol_boundary, bn, x, t};
        }
      }
    }
  }

  // fix up flags for the "never updated" corner cases
  rep.psd.ok = rep.psd.worst >= -opts.tol_psd;
  rep.divb_minus_c.ok = rep.divb_minus_c.worst >= -opts.tol_sign;
  rep.c_nonpositive.ok = rep.c_nonpositive.worst <= opts.tol_sign;
  rep.boundary_b.ok = rep.boundary_b.worst <= opts.tol_boundary;

  const AlphaBeta ab = compute_alpha_beta(coeffs, grid, time_samples);
  rep.regularity_finite = std::isfinite(ab.alpha) && std::isfinite(ab.beta);
  return rep;
}

AlphaBeta compute_alpha_beta(const CoefficientSet& coeffs, const Grid& grid,
                             int time_samples) {
  AlphaBeta ab;
  const auto ts = sample_times(coeffs, time_samples);
  for (double t : ts) {
    for (int cidx = 0; cidx < grid.cell_count(); ++cidx) {
      const Eigen::Vector2d x = grid.cell_center(cidx);
      const double an = sym_opnorm(coeffs.a(x, t), grid.dim);
      const Eigen::Vector2d b = coeffs.b(x, t);
      const Eigen::Vector2d da = divergence_a(coeffs, grid, x, t);
      double bn = grid.dim == 2 ? b.norm() : std::abs(b[0]);
      double dan = grid.dim == 2 ? da.norm() : std::abs(da[0]);
      ab.alpha = std::max(ab.alpha, an);
      ab.beta = std::max(ab.beta, bn + dan);
    }
  }
  return ab;
}

// ---------------------------------------------------------------------------

CoefficientSet make_constant(double a0, const Eigen::Vector2d& b0, double c0, int dim) {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  A(0, 0) = a0;
  if (dim == 2) A(1, 1) = a0;
  return make_constant_matrix(A, b0, c0);
}

CoefficientSet make_constant_matrix(const Eigen::Matrix2d& a0,
                                    const Eigen::Vector2d& b0, double c0) {
  CoefficientSet cs;
  cs.a = [a0](const Eigen::Vector2d&, double) { return a0; };
  cs.b = [b0](const Eigen::Vector2d&, double) { return b0; };
  cs.c = [c0](const Eigen::Vector2d&, double) { return c0; };
  cs.div_a = [](const Eigen::Vector2d&, double) { return Eigen::Vector2d::Zero().eval(); };
  cs.div_b = [](const Eigen::Vector2d&, double) { return 0.0; };
  cs.time_dependent = false;
  cs.family = "constant";
  return cs;
}

CoefficientSet make_ramp(double speed, double R) {
  if (!(speed > 0.0) || !(R > 0.0))
    throw std::invalid_argument("ramp family needs speed > 0 and R > 0");
  auto ramp = [R](double m) { return std::clamp(m, 0.0, R); };
  CoefficientSet cs;
  cs.a = [ramp, speed](const Eigen::Vector2d& x, double t) {
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    A(0, 0) = ramp(x[0] - speed * t);
    return A;
  };
  cs.b = [](const Eigen::Vector2d&, double) { return Eigen::Vector2d::Zero().eval(); };
  cs.c = [](const Eigen::Vector2d&, double) { return 0.0; };
  cs.div_b = [](const Eigen::Vector2d&, double) { return 0.0; };
  cs.time_dependent = true;
  cs.family = "ramp";
  return cs;
}

namespace {
// C^1 ramp from 0 at theta<=0 to 1 at theta>=1 (cubic smoothstep).
double smoothstep(double theta) {
  theta = std::clamp(theta, 0.0, 1.0);
  return theta * theta * (3.0 - 2.0 * theta);
}
}  // namespace

CoefficientSet make_checkerboard(double alpha0,
                                 std::vector<std::pair<double, double>> dead_intervals,
                                 double smoothing_width) {
  auto dead = std::make_shared<std::vector<std::pair<double, double>>>(std::move(dead_intervals));
  const double w = smoothing_width;
  CoefficientSet cs;
  cs.a = [alpha0, dead, w](const Eigen::Vector2d& x, double) {
    double factor = 1.0;
    for (const auto& [lo, hi] : *dead) {
      double f;
      if (x[0] >= lo && x[0] <= hi) {
        f = 0.0;
      } else if (w <= 0.0) {
        f = 1.0;
      } else {
        const double dist = x[0] < lo ? lo - x[0] : x[0] - hi;
        f = smoothstep(dist / w);
      }
      factor = std::min(factor, f);
    }
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    A(0, 0) = alpha0 * factor;
    return A;
  };
  cs.b = [](const Eigen::Vector2d&, double) { return Eigen::Vector2d::Zero().eval(); };
  cs.c = [](const Eigen::Vector2d&, double) { return 0.0; };
  cs.div_b = [](const Eigen::Vector2d&, double) { return 0.0; };
  cs.time_dependent = false;
  cs.family = "checkerboard";
  return cs;
}

CoefficientSet make_rotation_drift(double a0, double omega,
                                   const Eigen::Vector2d& center, double r_on,
                                   double r_off) {
  if (!(r_off > r_on) || !(r_on > 0.0))
    throw std::invalid_argument("rotation drift needs 0 < r_on < r_off");
  CoefficientSet cs;
  cs.a = [a0](const Eigen::Vector2d&, double) {
    return (a0 * Eigen::Matrix2d::Identity()).eval();
  };
  cs.b = [omega, center, r_on, r_off](const Eigen::Vector2d& x, double) {
    const Eigen::Vector2d d = x - center;
    const double r = d.norm();
    const double chi = 1.0 - smoothstep((r - r_on) / (r_off - r_on));
    return (omega * chi * Eigen::Vector2d(-d[1], d[0])).eval();
  };
  cs.c = [](const Eigen::Vector2d&, double) { return 0.0; };
  cs.div_b = [](const Eigen::Vector2d&, double) { return 0.0; };  // radial chi keeps b divergence-free
  cs.div_a = [](const Eigen::Vector2d&, double) { return Eigen::Vector2d::Zero().eval(); };
  cs.time_dependent = false;
  cs.family = "rotation_drift";
  return cs;
}

namespace {

struct TableHolder {
  TabulatedCoefficients table;
  Grid grid;

  // linear interpolation in time, bilinear between cell centers in space
  double value(const std::vector<Field>& frames, const Eigen::Vector2d& x,
               double t) const {
    if (frames.empty()) return 0.0;
    const auto& times = table.times;
    std::size_t k = 0;
    while (k + 1 < times.size() && times[k + 1] < t) ++k;
    double w = 0.0;
    if (k + 1 < times.size() && times[k + 1] > times[k])
      w = std::clamp((t - times[k]) / (times[k + 1] - times[k]), 0.0, 1.0);
    auto at = [&](const Field& f) { return interp_space(f, x); };
    const double v0 = at(frames[k]);
    const double v1 = k + 1 < frames.size() ? at(frames[k + 1]) : v0;
    return (1.0 - w) * v0 + w * v1;
  }

  double interp_space(const Field& f, const Eigen::Vector2d& x) const {
    auto axis_locate = [&](int axis, double& frac) {
      const double h = grid.spacing(axis);
      double s = (x[axis] - grid.lower[axis]) / h - 0.5;
      int i = static_cast<int>(std::floor(s));
      frac = s - i;
      if (i < 0) { i = 0; frac = 0.0; }
      if (i >= grid.cells[axis] - 1) { i = grid.cells[axis] - 1; frac = 0.0; }
      return i;
    };
    double fx, fy = 0.0;
    const int i = axis_locate(0, fx);
    const int i1 = std::min(i + 1, grid.cells[0] - 1);
    if (grid.dim == 1) return (1.0 - fx) * f[i] + fx * f[i1];
    const int j = axis_locate(1, fy);
    const int j1 = std::min(j + 1, grid.cells[1] - 1);
    const double v00 = f[grid.flat_index(i, j)], v10 = f[grid.flat_index(i1, j)];
    const double v01 = f[grid.flat_index(i, j1)], v11 = f[grid.flat_index(i1, j1)];
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) +
           fy * ((1.0 - fx) * v01 + fx * v11);
  }
};

}  // namespace

CoefficientSet make_tabulated(TabulatedCoefficients table, const Grid& grid) {
  if (table.times.empty()) throw std::invalid_argument("tabulated coefficients need >= 1 time sample");
  auto holder = std::make_shared<TableHolder>(TableHolder{std::move(table), grid});
  CoefficientSet cs;
  const int dim = grid.dim;
  cs.a = [holder, dim](const Eigen::Vector2d& x, double t) {
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    A(0, 0) = holder->value(holder->table.a_xx, x, t);
    if (dim == 2) {
      A(1, 1) = holder->value(holder->table.a_yy, x, t);
      A(0, 1) = A(1, 0) = holder->value(holder->table.a_xy, x, t);
    }
    return A;
  };
  cs.b = [holder, dim](const Eigen::Vector2d& x, double t) {
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    b[0] = holder->value(holder->table.b_x, x, t);
    if (dim == 2) b[1] = holder->value(holder->table.b_y, x, t);
    return b;
  };
  cs.c = [holder](const Eigen::Vector2d& x, double t) {
    return holder->value(holder->table.c, x, t);
  };
  cs.window_start = holder->table.times.front();
  cs.window_end = holder->table.times.back();
  cs.time_dependent = holder->table.times.size() > 1;
  cs.family = "tabulated";
  return cs;
}

CoefficientSet load_coefficients_csv(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open coefficient CSV: " + path);
  std::string header;
  std::getline(in, header);
  const int dim = grid.dim;
  const int ncols = dim == 1 ? 5 : 9;  // t,x[,y],a..,b..,c

  TabulatedCoefficients table;
  std::string line;
  int cell = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> vals;
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (static_cast<int>(vals.size()) != ncols)
      throw std::runtime_error("coefficient CSV row has wrong column count: " + line);
    const double t = vals[0];
    if (table.times.empty() || t > table.times.back()) {
      if (!table.times.empty() && cell != grid.cell_count())
        throw std::runtime_error("coefficient CSV time block is incomplete");
      table.times.push_back(t);
      const int n = grid.cell_count();
      table.a_xx.emplace_back(Field::Zero(n));
      table.b_x.emplace_back(Field::Zero(n));
      table.c.emplace_back(Field::Zero(n));
      if (dim == 2) {
        table.a_yy.emplace_back(Field::Zero(n));
        table.a_xy.emplace_back(Field::Zero(n));
        table.b_y.emplace_back(Field::Zero(n));
      }
      cell = 0;
    }
    if (cell >= grid.cell_count())
      throw std::runtime_error("coefficient CSV has more rows than grid cells");
    int k = dim == 1 ? 2 : 3;
    table.a_xx.back()[cell] = vals[k++];
    if (dim == 2) {
      table.a_yy.back()[cell] = vals[k++];
      table.a_xy.back()[cell] = vals[k++];
    }
    table.b_x.back()[cell] = vals[k++];
    if (dim == 2) table.b_y.back()[cell] = vals[k++];
    table.c.back()[cell] = vals[k++];
    ++cell;
  }
  if (cell != grid.cell_count())
    throw std::runtime_error("coefficient CSV final time block is incomplete");
  return make_tabulated(std::move(table), grid);
}

CoefficientSet scale_a(const CoefficientSet& coeffs, double factor) {
  CoefficientSet out = coeffs;
  auto a = coeffs.a;
  out.a = [a, factor](const Eigen::Vector2d& x, double t) {
    return (factor * a(x, t)).eval();
  };
  if (coeffs.div_a) {
    auto da = coeffs.div_a;
    out.div_a = [da, factor](const Eigen::Vector2d& x, double t) {
      return (factor * da(x, t)).eval();
    };
  }
  return out;
}

CoefficientSet scale_b(const CoefficientSet& coeffs, double factor) {
  CoefficientSet out = coeffs;
  auto b = coeffs.b;
  out.b = [b, factor](const Eigen::Vector2d& x, double t) {
    return (factor * b(x, t)).eval();
  };
  if (coeffs.div_b) {
    auto db = coeffs.div_b;
    out.div_b = [db, factor](const Eigen::Vector2d& x, double t) {
      return factor * db(x, t);
    };
  }
  return out;
}

}  // namespace dgb
