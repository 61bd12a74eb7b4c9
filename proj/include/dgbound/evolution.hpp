#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <optional>
#include <vector>

#include "dgbound/coefficients.hpp"
#include "dgbound/grid.hpp"

namespace dgb {

enum class TimeIntegrator { ImplicitEuler, Imex };

/// Solver settings for the epsilon-regularized Cauchy problem.
struct SolverConfig {
  double epsilon = 0.0;  ///< regularization a_eps = a + eps*I
  double dt = 1e-3;
  TimeIntegrator integrator = TimeIntegrator::ImplicitEuler;
  std::vector<double> epsilon_schedule;  ///< strictly decreasing, for convergence studies
  int threads = 1;                       ///< parallel propagator column solves

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("solver dt must be > 0");
    if (epsilon < 0.0) throw std::invalid_argument("solver epsilon must be >= 0");
  }
};

/// Sparse finite-volume generator of L u = div(a grad u) + <b, grad u> + c u
/// at a fixed time: two-point diffusive fluxes with face-averaged a + eps,
/// donor-cell upwind fluxes for div(b u), and reaction diagonal c - div_h b
/// with the same face divergence as the flux form. Rows sum to c and columns
/// to c - div_h b, so the implicit step matrix is an M-matrix and the discrete
/// propagator is positive, L^infinity-contractive, and (under the standing
/// assumptions) L^1-contractive.
Eigen::SparseMatrix<double> assemble_generator(const CoefficientSet& coeffs,
                                               const Grid& grid, double t,
                                               double epsilon);

/// Generator of the formal adjoint L* u = div(a grad u) - div(b u) + c u with
/// the mirrored donor convention. Equals the transpose of assemble_generator.
Eigen::SparseMatrix<double> assemble_adjoint_generator(const CoefficientSet& coeffs,
                                                       const Grid& grid, double t,
                                                       double epsilon);

/// Largest face drift speed times h/2: the effective diffusivity injected by
/// first-order upwinding.
double numerical_diffusion(const CoefficientSet& coeffs, const Grid& grid, double t,
                           int time_samples = 2, double t_end = 0.0);

/// One time step of size cfg.dt starting at time t.
Field step(const Field& u, const CoefficientSet& coeffs, const Grid& grid, double t,
           const SolverConfig& cfg);

struct Trajectory {
  std::vector<std::pair<double, Field>> snapshots;  // strictly increasing times

  const Field& final_state() const { return snapshots.back().second; }
  double final_time() const { return snapshots.back().first; }
};

/// Evolves u0 from s to t in ceil((t-s)/dt) substeps (last one shortened so
/// the final snapshot lands exactly on t). snapshot_stride = 0 keeps only the
/// first and last states.
Trajectory solve(const Field& u0, const CoefficientSet& coeffs, const Grid& grid,
                 double s, double t, const SolverConfig& cfg, int snapshot_stride = 0);

/// Dense representation of the discrete propagator P_{t,s}: column j holds the
/// response to a unit initial value at cell source_cells[j].
struct PropagatorMatrix {
  Eigen::MatrixXd M;  // cell_count x source_cells.size()
  std::vector<int> source_cells;
  double s = 0.0, t = 0.0;
  Grid grid;
  double alpha_num = 0.0;  ///< max |b_face| h/2 over the assembled window

  int column_of(int cell) const;  ///< -1 when the cell is not a source column
};

/// Columns restricted to `source` (all cells when source is empty). Column
/// solves share the factorized step matrix and may run on cfg.threads.
PropagatorMatrix assemble_propagator(const CoefficientSet& coeffs, const Grid& grid,
                                     double s, double t, const SolverConfig& cfg,
                                     const Region& source = {});

/// Transposed propagator object (requires the full source set): column j of
/// the result is row j of M, indexed over all cells.
PropagatorMatrix transpose(const PropagatorMatrix& P);

/// Matrix product composition over [s,r] and [r,t]; inner source must cover
/// all cells.
PropagatorMatrix compose(const PropagatorMatrix& later, const PropagatorMatrix& earlier);

/// L^1 distances of solutions for each epsilon in cfg.epsilon_schedule against
/// the smallest-epsilon run; evidences the eps -> 0 limit.
struct EpsilonStudyRow {
  double epsilon;
  double l1_distance;
};

struct EpsilonStudy {
  std::vector<EpsilonStudyRow> rows;  // one per schedule entry except the last
  bool monotone_within_tolerance = true;  // decreasing within 10% noise
};

EpsilonStudy epsilon_convergence_study(const Field& u0, const CoefficientSet& coeffs,
                                       const Grid& grid, double s, double t,
                                       const SolverConfig& cfg);

}  // namespace dgb
