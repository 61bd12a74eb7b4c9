#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgb {

/// Cell values on a grid, one scalar per cell (x-fastest ordering in 2D).
using Field = Eigen::VectorXd;

enum class BoundaryKind { Neumann, Periodic };

/// Uniform cell-centered discretization of an axis-aligned box in 1 or 2
/// dimensions. Boundary faces are Neumann (zero conormal flux) by default;
/// periodic faces serve as a free-space proxy.
struct Grid {
  int dim = 1;
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{1.0, 0.0};
  std::array<int, 2> cells{1, 1};
  // face index: 2*axis + side, side 0 = lower, 1 = upper
  std::array<BoundaryKind, 4> boundary{BoundaryKind::Neumann, BoundaryKind::Neumann,
                                       BoundaryKind::Neumann, BoundaryKind::Neumann};

  static Grid make_1d(double lo, double hi, int n,
                      BoundaryKind bc = BoundaryKind::Neumann);
  static Grid make_2d(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, int nx,
                      int ny, BoundaryKind bc = BoundaryKind::Neumann);

  int cell_count() const { return cells[0] * (dim == 2 ? cells[1] : 1); }
  double spacing(int axis) const {
    return (upper[axis] - lower[axis]) / cells[axis];
  }
  /// Product of spacings: the measure of one cell.
  double cell_measure() const {
    return dim == 2 ? spacing(0) * spacing(1) : spacing(0);
  }
  int flat_index(int i, int j = 0) const { return i + cells[0] * j; }
  std::array<int, 2> multi_index(int flat) const {
    return {flat % cells[0], flat / cells[0]};
  }
  Eigen::Vector2d cell_center(int flat) const {
    auto ij = multi_index(flat);
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    x[0] = lower[0] + (ij[0] + 0.5) * spacing(0);
    if (dim == 2) x[1] = lower[1] + (ij[1] + 0.5) * spacing(1);
    return x;
  }
  bool periodic(int axis) const {
    return boundary[2 * axis] == BoundaryKind::Periodic;
  }

  void validate() const;
};

/// A set of cells of one grid.
struct Region {
  std::vector<int> cell_indices;  // sorted, unique
  std::string label;

  bool empty() const { return cell_indices.empty(); }
  int size() const { return static_cast<int>(cell_indices.size()); }
  bool contains(int cell) const;
};

Region make_region(std::vector<int> cells, const Grid& grid, std::string label = "");

/// Cells whose center lies in the axis-aligned box [lo, hi] (per-axis closed
/// intervals; in 1D only axis 0 is used).
Region region_from_box(const Grid& grid, const Eigen::Vector2d& lo,
                       const Eigen::Vector2d& hi, std::string label = "");

/// Cells whose center lies within Euclidean distance r of the point z.
Region region_ball(const Grid& grid, const Eigen::Vector2d& z, double r,
                   std::string label = "");

Region region_complement(const Region& r, const Grid& grid, std::string label = "");
Region region_union(const Region& a, const Region& b, std::string label = "");
bool regions_intersect(const Region& a, const Region& b);

/// Minimal Euclidean distance between cell centers of the two regions.
/// Symmetric; zero iff the regions share a cell.
double region_distance(const Region& X, const Region& Y, const Grid& grid);

/// Euclidean distance from point x to the nearest cell center of X.
double distance_to_region(const Eigen::Vector2d& x, const Region& X, const Grid& grid);

/// Characteristic function of X as a field: 1 on X's cells, 0 elsewhere.
Field indicator(const Region& X, const Grid& grid);

/// Cell-measure-weighted discrete L^p norm,
///   ||f||_p = (sum_i h^n |f_i|^p)^(1/p),   ||f||_inf = max_i |f_i|.
/// p must be >= 1; p = infinity is accepted.
double lp_norm(const Field& f, double p, const Grid& grid);

/// Measure-weighted dot product <f, g> = sum_i h^n f_i g_i.
double dot(const Field& f, const Field& g, const Grid& grid);

}  // namespace dgb
