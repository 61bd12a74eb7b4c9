#include "dgbound/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace dgb {

Grid Grid::make_1d(double lo, double hi, int n, BoundaryKind bc) {
  Grid g;
  g.dim = 1;
  g.lower = {lo, 0.0};
  g.upper = {hi, 0.0};
  g.cells = {n, 1};
  g.boundary = {bc, bc, BoundaryKind::Neumann, BoundaryKind::Neumann};
  g.validate();
  return g;
}

Grid Grid::make_2d(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, int nx,
                   int ny, BoundaryKind bc) {
  Grid g;
  g.dim = 2;
  g.lower = {lo[0], lo[1]};
  g.upper = {hi[0], hi[1]};
  g.cells = {nx, ny};
  g.boundary = {bc, bc, bc, bc};
  g.validate();
  return g;
}

void Grid::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    if (cells[a] < 2) throw std::invalid_argument("grid needs at least 2 cells per axis");
    if (!(upper[a] > lower[a]))
      throw std::invalid_argument("grid upper bound must exceed lower bound");
    if (!(spacing(a) > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  }
}

bool Region::contains(int cell) const {
  return std::binary_search(cell_indices.begin(), cell_indices.end(), cell);
}

Region make_region(std::vector<int> cells, const Grid& grid, std::string label) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  if (!cells.empty() && (cells.front() < 0 || cells.back() >= grid.cell_count()))
    throw std::invalid_argument("region cell index out of range for grid");
  return Region{std::move(cells), std::move(label)};
}

Region region_from_box(const Grid& grid, const Eigen::Vector2d& lo,
                       const Eigen::Vector2d& hi, std::string label) {
  std::vector<int> cells;
  for (int c = 0; c < grid.cell_count(); ++c) {
    Eigen::Vector2d x = grid.cell_center(c);
    bool in = x[0] >= lo[0] && x[0] <= hi[0];
    if (grid.dim == 2) in = in && x[1] >= lo[1] && x[1] <= hi[1];
    if (in) cells.push_back(c);
  }
  return Region{std::move(cells), std::move(label)};
}

Region region_ball(const Grid& grid, const Eigen::Vector2d& z, double r,
                   std::string label) {
  std::vector<int> cells;
  for (int c = 0; c < grid.cell_count(); ++c) {
    Eigen::Vector2d x = grid.cell_center(c);
    if (grid.dim == 1) x[1] = z[1];
    if ((x - z).norm() <= r) cells.push_back(c);
  }
  return Region{std::move(cells), std::move(label)};
}

Region region_complement(const Region& r, const Grid& grid, std::string label) {
  std::vector<int> cells;
  cells.reserve(grid.cell_count() - r.size());
  std::size_t k = 0;
  for (int c = 0; c < grid.cell_count(); ++c) {
    if (k < r.cell_indices.size() && r.cell_indices[k] == c) {
      ++k;
    } else {
      cells.push_back(c);
    }
  }
  return Region{std::move(cells), std::move(label)};
}

Region region_union(const Region& a, const Region& b, std::string label) {
  std::vector<int> cells;
  cells.reserve(a.cell_indices.size() + b.cell_indices.size());
  std::set_union(a.cell_indices.begin(), a.cell_indices.end(), b.cell_indices.begin(),
                 b.cell_indices.end(), std::back_inserter(cells));
  return Region{std::move(cells), std::move(label)};
}

bool regions_intersect(const Region& a, const Region& b) {
  std::size_t i = 0, j = 0;
  while (i < a.cell_indices.size() && j < b.cell_indices.size()) {
    if (a.cell_indices[i] == b.cell_indices[j]) return true;
    if (a.cell_indices[i] < b.cell_indices[j])
      ++i;
    else
      ++j;
  }
  return false;
}

namespace {

// Cells of R with at least one in-grid face neighbor outside R. For disjoint
// regions the minimizing pair always lies on these boundary sets: from an
// interior cell, stepping one cell toward the other region's cell strictly
// decreases the center distance.
std::vector<int> region_boundary_cells(const Region& R, const Grid& grid) {
  std::unordered_set<int> in(R.cell_indices.begin(), R.cell_indices.end());
  std::vector<int> out;
  for (int c : R.cell_indices) {
    auto ij = grid.multi_index(c);
    bool boundary = false;
    for (int axis = 0; axis < grid.dim && !boundary; ++axis) {
      for (int dir = -1; dir <= 1 && !boundary; dir += 2) {
        int ni = ij[0] + (axis == 0 ? dir : 0);
        int nj = ij[1] + (axis == 1 ? dir : 0);
        if (ni < 0 || ni >= grid.cells[0] || nj < 0 || (grid.dim == 2 && nj >= grid.cells[1]))
          continue;
        if (!in.count(grid.flat_index(ni, nj))) boundary = true;
      }
    }
    if (boundary) out.push_back(c);
  }
  if (out.empty()) out = R.cell_indices;  // region fills the grid
  return out;
}

double min_pair_distance(const std::vector<int>& A, const std::vector<int>& B,
                         const Grid& grid) {
  double best = std::numeric_limits<double>::infinity();
  for (int a : A) {
    Eigen::Vector2d xa = grid.cell_center(a);
    for (int b : B) {
      double d2 = (xa - grid.cell_center(b)).squaredNorm();
      if (d2 < best) best = d2;
    }
  }
  return std::sqrt(best);
}

}  // namespace

double region_distance(const Region& X, const Region& Y, const Grid& grid) {
  if (X.empty() || Y.empty())
    throw std::invalid_argument("empty region has no distance");
  if (regions_intersect(X, Y)) return 0.0;
  const std::size_t brute_limit = 1u << 22;
  if (X.cell_indices.size() * Y.cell_indices.size() <= brute_limit)
    return min_pair_distance(X.cell_indices, Y.cell_indices, grid);
  return min_pair_distance(region_boundary_cells(X, grid),
                           region_boundary_cells(Y, grid), grid);
}

double distance_to_region(const Eigen::Vector2d& x, const Region& X, const Grid& grid) {
  if (X.empty()) throw std::invalid_argument("empty region has no distance");
  double best = std::numeric_limits<double>::infinity();
  for (int c : X.cell_indices) {
    double d2 = (x - grid.cell_center(c)).squaredNorm();
    if (d2 < best) best = d2;
  }
  return std::sqrt(best);
}

Field indicator(const Region& X, const Grid& grid) {
  Field f = Field::Zero(grid.cell_count());
  for (int c : X.cell_indices) f[c] = 1.0;
  return f;
}

double lp_norm(const Field& f, double p, const Grid& grid) {
  if (f.size() != grid.cell_count())
    throw std::invalid_argument("field length does not match grid cell count");
  if (std::isinf(p)) return f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
  if (p < 1.0) throw std::invalid_argument("lp_norm requires p >= 1");
  const double meas = grid.cell_measure();
  if (p == 1.0) return meas * f.cwiseAbs().sum();
  if (p == 2.0) return std::sqrt(meas) * f.norm();
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p);
  return std::pow(meas * s, 1.0 / p);
}

double dot(const Field& f, const Field& g, const Grid& grid) {
  return grid.cell_measure() * f.dot(g);
}

}  // namespace dgb
