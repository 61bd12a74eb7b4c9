#include "dgbound/evolution.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>
#include <thread>

namespace dgb {

namespace {

void parallel_for(int n, int threads, const std::function<void(int, int)>& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(body, lo, hi);
  }
  for (auto& th : pool) th.join();
}

struct Face {
  int lower_cell;
  int upper_cell;
  int axis;
  Eigen::Vector2d center;
};

// Interior faces plus periodic wrap faces; Neumann boundary faces carry zero
// diffusive and zero advective flux and are not enumerated.
std::vector<Face> enumerate_faces(const Grid& grid) {
  std::vector<Face> faces;
  const int ny = grid.dim == 2 ? grid.cells[1] : 1;
  for (int axis = 0; axis < grid.dim; ++axis) {
    const int na = grid.cells[axis];
    const int n_other = axis == 0 ? ny : grid.cells[0];
    for (int k = 0; k < n_other; ++k) {
      for (int i = 0; i < na - 1; ++i) {
        Face f;
        f.axis = axis;
        f.lower_cell = axis == 0 ? grid.flat_index(i, grid.dim == 2 ? k : 0)
                                 : grid.flat_index(k, i);
        f.upper_cell = axis == 0 ? grid.flat_index(i + 1, grid.dim == 2 ? k : 0)
                                 : grid.flat_index(k, i + 1);
        f.center = grid.cell_center(f.lower_cell);
        f.center[axis] += 0.5 * grid.spacing(axis);
        faces.push_back(f);
      }
      if (grid.periodic(axis)) {
        Face f;
        f.axis = axis;
        f.lower_cell = axis == 0 ? grid.flat_index(na - 1, grid.dim == 2 ? k : 0)
                                 : grid.flat_index(k, na - 1);
        f.upper_cell = axis == 0 ? grid.flat_index(0, grid.dim == 2 ? k : 0)
                                 : grid.flat_index(k, 0);
        f.center = grid.cell_center(f.lower_cell);
        f.center[axis] += 0.5 * grid.spacing(axis);  // sits on the wrap seam
        faces.push_back(f);
      }
    }
  }
  return faces;
}

struct GeneratorParts {
  Eigen::SparseMatrix<double> diffusion;        // D
  Eigen::SparseMatrix<double> advection_react;  // C + diag(c - div_h b)
  double max_courant_rate = 0.0;  // max |b_face| / h; times dt gives the CFL number
  double alpha_num = 0.0;         // max |b_face| h/2
};

GeneratorParts assemble_parts(const CoefficientSet& coeffs, const Grid& grid, double t,
                              double epsilon, bool adjoint) {
  const int n = grid.cell_count();
  std::vector<Eigen::Triplet<double>> trD, trC;
  Eigen::VectorXd divb = Eigen::VectorXd::Zero(n);
  GeneratorParts parts;

  for (const Face& f : enumerate_faces(grid)) {
    const double h = grid.spacing(f.axis);
    const Eigen::Vector2d xl = grid.cell_center(f.lower_cell);
    const Eigen::Vector2d xu = grid.cell_center(f.upper_cell);
    const double aval =
        0.5 * (coeffs.a(xl, t)(f.axis, f.axis) + coeffs.a(xu, t)(f.axis, f.axis)) +
        epsilon;
    const double w = aval / (h * h);
    trD.emplace_back(f.lower_cell, f.lower_cell, -w);
    trD.emplace_back(f.lower_cell, f.upper_cell, w);
    trD.emplace_back(f.upper_cell, f.upper_cell, -w);
    trD.emplace_back(f.upper_cell, f.lower_cell, w);

    const double bf = coeffs.b(f.center, t)[f.axis];
    parts.max_courant_rate = std::max(parts.max_courant_rate, std::abs(bf) / h);
    parts.alpha_num = std::max(parts.alpha_num, std::abs(bf) * h / 2.0);
    // flux form of +div(b u): donor is the cell the flow leaves, which for
    // +div is the upper cell when b_face > 0. The adjoint operator carries
    // -div(b u) with the mirrored donor.
    if (bf != 0.0) {
      if (!adjoint) {
        const int donor = bf > 0.0 ? f.upper_cell : f.lower_cell;
        trC.emplace_back(f.lower_cell, donor, bf / h);
        trC.emplace_back(f.upper_cell, donor, -bf / h);
      } else {
        const int donor = bf > 0.0 ? f.lower_cell : f.upper_cell;
        trC.emplace_back(f.lower_cell, donor, -bf / h);
        trC.emplace_back(f.upper_cell, donor, bf / h);
      }
    }
    divb[f.lower_cell] += bf / h;
    divb[f.upper_cell] -= bf / h;
  }

  for (int c = 0; c < n; ++c) {
    const double react = coeffs.c(grid.cell_center(c), t) - (adjoint ? 0.0 : divb[c]);
    if (react != 0.0) trC.emplace_back(c, c, react);
  }

  parts.diffusion.resize(n, n);
  parts.diffusion.setFromTriplets(trD.begin(), trD.end());
  parts.advection_react.resize(n, n);
  parts.advection_react.setFromTriplets(trC.begin(), trC.end());
  return parts;
}

}  // namespace

Eigen::SparseMatrix<double> assemble_generator(const CoefficientSet& coeffs,
                                               const Grid& grid, double t,
                                               double epsilon) {
  auto parts = assemble_parts(coeffs, grid, t, epsilon, false);
  return parts.diffusion + parts.advection_react;
}

Eigen::SparseMatrix<double> assemble_adjoint_generator(const CoefficientSet& coeffs,
                                                       const Grid& grid, double t,
                                                       double epsilon) {
  auto parts = assemble_parts(coeffs, grid, t, epsilon, true);
  return parts.diffusion + parts.advection_react;
}

double numerical_diffusion(const CoefficientSet& coeffs, const Grid& grid, double t,
                           int time_samples, double t_end) {
  if (t_end <= t) t_end = t;
  double out = 0.0;
  const int ns = std::max(1, time_samples);
  for (int k = 0; k < ns; ++k) {
    const double tk = ns == 1 ? t : t + (t_end - t) * k / (ns - 1);
    for (int c = 0; c < grid.cell_count(); ++c) {
      const Eigen::Vector2d b = coeffs.b(grid.cell_center(c), tk);
      for (int axis = 0; axis < grid.dim; ++axis)
        out = std::max(out, std::abs(b[axis]) * grid.spacing(axis) / 2.0);
    }
  }
  return out;
}

namespace {

/// Implicit-Euler stepper with factorization reuse: autonomous coefficient
/// sets factor once per step size.
class Stepper {
 public:
  Stepper(const CoefficientSet& coeffs, const Grid& grid, const SolverConfig& cfg)
      : coeffs_(coeffs), grid_(grid), cfg_(cfg) {
    cfg_.validate();
  }

  Eigen::MatrixXd advance(const Eigen::MatrixXd& U, double t, double dt, int threads) {
    prepare(t, dt);
    Eigen::MatrixXd rhs = cfg_.integrator == TimeIntegrator::Imex
                              ? (U + dt * (explicit_part_ * U)).eval()
                              : U;
    Eigen::MatrixXd out(U.rows(), U.cols());
    parallel_for(static_cast<int>(U.cols()), threads, [&](int lo, int hi) {
      out.middleCols(lo, hi - lo) = lu_.solve(rhs.middleCols(lo, hi - lo));
    });
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("linear solve failed in time step");
    return out;
  }

  double alpha_num() const { return alpha_num_; }

 private:
  void prepare(double t, double dt) {
    const bool reuse = have_factor_ && dt == cached_dt_ &&
                       (!coeffs_.time_dependent && cfg_.integrator == TimeIntegrator::ImplicitEuler);
    const bool reuse_imex = have_factor_ && dt == cached_dt_ && !coeffs_.time_dependent &&
                            cfg_.integrator == TimeIntegrator::Imex;
    if (reuse) return;
    if (cfg_.integrator == TimeIntegrator::Imex) {
      auto parts = assemble_parts(coeffs_, grid_, t, cfg_.epsilon, false);
      alpha_num_ = std::max(alpha_num_, parts.alpha_num);
      if (parts.max_courant_rate * dt > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "advective CFL violation in imex mode: beta*dt/h = "
           << parts.max_courant_rate * dt;
        throw std::runtime_error(os.str());
      }
      explicit_part_ = parts.advection_react;
      if (reuse_imex) return;
      factor(parts.diffusion, dt);
    } else {
      const double t_eval = t + dt;  // fully implicit evaluation time
      auto parts = assemble_parts(coeffs_, grid_, t_eval, cfg_.epsilon, false);
      alpha_num_ = std::max(alpha_num_, parts.alpha_num);
      factor(parts.diffusion + parts.advection_react, dt);
    }
    cached_dt_ = dt;
    have_factor_ = true;
  }

  void factor(const Eigen::SparseMatrix<double>& L, double dt) {
    Eigen::SparseMatrix<double> M(L.rows(), L.cols());
    M.setIdentity();
    M -= dt * L;
    lu_.compute(M);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("time-step matrix factorization failed");
  }

  CoefficientSet coeffs_;
  Grid grid_;
  SolverConfig cfg_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  Eigen::SparseMatrix<double> explicit_part_;
  double cached_dt_ = -1.0;
  bool have_factor_ = false;
  double alpha_num_ = 0.0;
};

std::vector<double> substep_sizes(double s, double t, double dt) {
  std::vector<double> out;
  const double span = t - s;
  if (span <= 0.0) return out;
  const int n = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-12)));
  for (int k = 0; k < n - 1; ++k) out.push_back(dt);
  out.push_back(span - dt * (n - 1));
  return out;
}

void check_finite(const Eigen::MatrixXd& U, const char* where) {
  if (!U.allFinite())
    throw std::runtime_error(std::string("non-finite solver state after ") + where);
}

}  // namespace

Field step(const Field& u, const CoefficientSet& coeffs, const Grid& grid, double t,
           const SolverConfig& cfg) {
  if (u.size() != grid.cell_count())
    throw std::invalid_argument("field length does not match grid cell count");
  Stepper st(coeffs, grid, cfg);
  Eigen::MatrixXd out = st.advance(u, t, cfg.dt, 1);
  check_finite(out, "step");
  return out.col(0);
}

Trajectory solve(const Field& u0, const CoefficientSet& coeffs, const Grid& grid,
                 double s, double t, const SolverConfig& cfg, int snapshot_stride) {
  if (t < s) throw std::invalid_argument("solve requires t >= s");
  if (u0.size() != grid.cell_count())
    throw std::invalid_argument("field length does not match grid cell count");
  Trajectory traj;
  traj.snapshots.emplace_back(s, u0);
  if (t == s) return traj;

  Stepper st(coeffs, grid, cfg);
  Field u = u0;
  double now = s;
  const auto steps = substep_sizes(s, t, cfg.dt);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    u = st.advance(u, now, steps[k], 1);
    now = (k + 1 == steps.size()) ? t : now + steps[k];
    const bool keep = snapshot_stride > 0 && (k + 1) % snapshot_stride == 0;
    if (keep && k + 1 != steps.size()) traj.snapshots.emplace_back(now, u);
  }
  check_finite(u, "solve");
  traj.snapshots.emplace_back(t, u);
  return traj;
}

int PropagatorMatrix::column_of(int cell) const {
  auto it = std::lower_bound(source_cells.begin(), source_cells.end(), cell);
  if (it == source_cells.end() || *it != cell) return -1;
  return static_cast<int>(it - source_cells.begin());
}

PropagatorMatrix assemble_propagator(const CoefficientSet& coeffs, const Grid& grid,
                                     double s, double t, const SolverConfig& cfg,
                                     const Region& source) {
  if (t < s) throw std::invalid_argument("propagator requires t >= s");
  const int n = grid.cell_count();
  PropagatorMatrix P;
  P.grid = grid;
  P.s = s;
  P.t = t;
  if (source.empty()) {
    P.source_cells.resize(n);
    for (int c = 0; c < n; ++c) P.source_cells[c] = c;
  } else {
    P.source_cells = source.cell_indices;
  }

  const int m = static_cast<int>(P.source_cells.size());
  P.M = Eigen::MatrixXd::Zero(n, m);
  for (int j = 0; j < m; ++j) P.M(P.source_cells[j], j) = 1.0;
  if (t == s) return P;

  Stepper st(coeffs, grid, cfg);
  double now = s;
  const auto steps = substep_sizes(s, t, cfg.dt);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    P.M = st.advance(P.M, now, steps[k], cfg.threads);
    now = (k + 1 == steps.size()) ? t : now + steps[k];
  }
  check_finite(P.M, "propagator assembly");
  P.alpha_num = st.alpha_num();
  return P;
}

PropagatorMatrix transpose(const PropagatorMatrix& P) {
  if (static_cast<int>(P.source_cells.size()) != P.grid.cell_count())
    throw std::invalid_argument("transpose requires a full-source propagator");
  PropagatorMatrix Q = P;
  Q.M = P.M.transpose();
  return Q;
}

PropagatorMatrix compose(const PropagatorMatrix& later, const PropagatorMatrix& earlier) {
  if (static_cast<int>(later.source_cells.size()) != later.grid.cell_count())
    throw std::invalid_argument("composition requires the later propagator on all cells");
  if (later.s != earlier.t)
    throw std::invalid_argument("composition windows must be contiguous");
  PropagatorMatrix out = earlier;
  out.M = later.M * earlier.M;
  out.t = later.t;
  out.alpha_num = std::max(later.alpha_num, earlier.alpha_num);
  return out;
}

EpsilonStudy epsilon_convergence_study(const Field& u0, const CoefficientSet& coeffs,
                                       const Grid& grid, double s, double t,
                                       const SolverConfig& cfg) {
  const auto& sched = cfg.epsilon_schedule;
  if (sched.size() < 3)
    throw std::invalid_argument("epsilon schedule needs at least 3 entries");
  for (std::size_t i = 1; i < sched.size(); ++i)
    if (!(sched[i] < sched[i - 1]))
      throw std::invalid_argument("epsilon schedule must be strictly decreasing");

  std::vector<Field> finals;
  for (double eps : sched) {
    SolverConfig c = cfg;
    c.epsilon = eps;
    finals.push_back(solve(u0, coeffs, grid, s, t, c).final_state());
  }
  EpsilonStudy study;
  const Field& ref = finals.back();
  for (std::size_t i = 0; i + 1 < finals.size(); ++i)
    study.rows.push_back({sched[i], lp_norm(finals[i] - ref, 1.0, grid)});
  for (std::size_t i = 0; i + 1 < study.rows.size(); ++i)
    if (study.rows[i + 1].l1_distance > 1.1 * study.rows[i].l1_distance)
      study.monotone_within_tolerance = false;
  return study;
}

}  // namespace dgb
