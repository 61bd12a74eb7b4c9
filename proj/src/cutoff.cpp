#include "dgbound/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace dgb {

namespace {

// quintic smoothstep on [0,1]: C^2 glue with vanishing first and second
// derivatives at both ends
double quintic(double th) { return th * th * th * (10.0 + th * (-15.0 + 6.0 * th)); }
double quintic_d1(double th) {
  const double u = th * (1.0 - th);
  return 30.0 * u * u;
}
double quintic_d2(double th) { return 60.0 * th * (1.0 - th) * (1.0 - 2.0 * th); }

}  // namespace

double TransitionProfile::operator()(double t) const {
  if (t <= lo) return 0.0;
  if (t >= hi) return 1.0;
  return quintic((t - lo) / (hi - lo));
}

double TransitionProfile::derivative(double t) const {
  if (t <= lo || t >= hi) return 0.0;
  const double w = hi - lo;
  return quintic_d1((t - lo) / w) / w;
}

double TransitionProfile::second_derivative(double t) const {
  if (t <= lo || t >= hi) return 0.0;
  const double w = hi - lo;
  return quintic_d2((t - lo) / w) / (w * w);
}

double TransitionProfile::sup_d1() const { return (15.0 / 8.0) / (hi - lo); }

double TransitionProfile::sup_d2() const {
  return (10.0 / std::sqrt(3.0)) / ((hi - lo) * (hi - lo));
}

TransitionProfile build_eta(double c3) {
  if (!(c3 >= 1.0)) throw std::invalid_argument("build_eta requires c3 >= 1");
  return TransitionProfile{0.5 / c3, 1.0 / c3, c3};
}

Field build_regularized_distance(const Region& X, const Grid& grid, double c3) {
  if (X.empty()) throw std::invalid_argument("empty region has no distance field");
  if (!(c3 > 1.0)) throw std::invalid_argument("regularized distance requires c3 > 1");

  const int n = grid.cell_count();
  Field delta(n);
  {
    std::unordered_set<int> in(X.cell_indices.begin(), X.cell_indices.end());
    for (int c = 0; c < n; ++c)
      delta[c] = in.count(c) ? 0.0 : distance_to_region(grid.cell_center(c), X, grid);
  }

  // average delta over the ball of radius delta/(2 c3)
  Field rho(n);
  const double hx = grid.spacing(0);
  const double hy = grid.dim == 2 ? grid.spacing(1) : hx;
  for (int c = 0; c < n; ++c) {
    const double r = delta[c] / (2.0 * c3);
    if (r < std::min(hx, hy)) {
      rho[c] = delta[c];
      continue;
    }
    const auto ij = grid.multi_index(c);
    const Eigen::Vector2d x0 = grid.cell_center(c);
    const int wx = static_cast<int>(std::floor(r / hx));
    const int wy = grid.dim == 2 ? static_cast<int>(std::floor(r / hy)) : 0;
    double sum = 0.0;
    int count = 0;
    for (int dj = -wy; dj <= wy; ++dj) {
      const int j = ij[1] + dj;
      if (grid.dim == 2 && (j < 0 || j >= grid.cells[1])) continue;
      for (int di = -wx; di <= wx; ++di) {
        const int i = ij[0] + di;
        if (i < 0 || i >= grid.cells[0]) continue;
        const int cc = grid.flat_index(i, grid.dim == 2 ? j : 0);
        if ((grid.cell_center(cc) - x0).norm() > r) continue;
        sum += delta[cc];
        ++count;
      }
    }
    rho[c] = count > 0 ? sum / count : delta[c];
  }

  // a posteriori comparability certificate
  double worst_ratio = 1.0;
  for (int c = 0; c < n; ++c) {
    if (delta[c] == 0.0) {
      if (rho[c] != 0.0) worst_ratio = std::numeric_limits<double>::infinity();
      continue;
    }
    const double ratio = rho[c] / delta[c];
    worst_ratio = std::max(worst_ratio, std::max(ratio, 1.0 / ratio));
  }
  if (worst_ratio > c3) {
    std::ostringstream os;
    os << "regularized distance fails comparability: worst ratio " << worst_ratio
       << " exceeds c3 = " << c3 << " (c3 too small for this grid resolution)";
    throw std::runtime_error(os.str());
  }
  return rho;
}

namespace {

int wrap_or_clamp(int i, int n, bool periodic, bool& clamped) {
  if (periodic) return (i % n + n) % n;
  if (i < 0) {
    clamped = true;
    return 0;
  }
  if (i >= n) {
    clamped = true;
    return n - 1;
  }
  return i;
}

}  // namespace

std::vector<Eigen::Vector2d> field_gradient(const Field& f, const Grid& grid) {
  const int n = grid.cell_count();
  std::vector<Eigen::Vector2d> g(n, Eigen::Vector2d::Zero());
  for (int c = 0; c < n; ++c) {
    const auto ij = grid.multi_index(c);
    for (int axis = 0; axis < grid.dim; ++axis) {
      const int na = grid.cells[axis];
      const double h = grid.spacing(axis);
      const bool per = grid.periodic(axis);
      bool clamped_p = false, clamped_m = false;
      int ip = wrap_or_clamp(ij[axis] + 1, na, per, clamped_p);
      int im = wrap_or_clamp(ij[axis] - 1, na, per, clamped_m);
      const int cp = axis == 0 ? grid.flat_index(ip, ij[1]) : grid.flat_index(ij[0], ip);
      const int cm = axis == 0 ? grid.flat_index(im, ij[1]) : grid.flat_index(ij[0], im);
      const double denom = (clamped_p || clamped_m) ? h : 2.0 * h;
      g[c][axis] = (f[cp] - f[cm]) / denom;
    }
  }
  return g;
}

Field field_hessian_norm(const Field& f, const Grid& grid) {
  const int n = grid.cell_count();
  Field out = Field::Zero(n);
  const double hx = grid.spacing(0);
  const double hy = grid.dim == 2 ? grid.spacing(1) : 1.0;

  auto second_diff = [&](int c, int axis) {
    const auto ij = grid.multi_index(c);
    const int na = grid.cells[axis];
    const bool per = grid.periodic(axis);
    int i0 = ij[axis];
    if (!per) i0 = std::clamp(i0, 1, na - 2);  // shift the stencil inward
    bool dummy = false;
    const int ip = wrap_or_clamp(i0 + 1, na, per, dummy);
    const int im = wrap_or_clamp(i0 - 1, na, per, dummy);
    const double h = grid.spacing(axis);
    auto at = [&](int k) {
      return axis == 0 ? f[grid.flat_index(k, ij[1])] : f[grid.flat_index(ij[0], k)];
    };
    return (at(ip) - 2.0 * at(i0) + at(im)) / (h * h);
  };

  for (int c = 0; c < n; ++c) {
    const double fxx = second_diff(c, 0);
    if (grid.dim == 1) {
      out[c] = std::abs(fxx);
      continue;
    }
    const double fyy = second_diff(c, 1);
    auto ij = grid.multi_index(c);
    int i0 = ij[0], j0 = ij[1];
    if (!grid.periodic(0)) i0 = std::clamp(i0, 1, grid.cells[0] - 2);
    if (!grid.periodic(1)) j0 = std::clamp(j0, 1, grid.cells[1] - 2);
    bool dummy = false;
    const int ip = wrap_or_clamp(i0 + 1, grid.cells[0], grid.periodic(0), dummy);
    const int im = wrap_or_clamp(i0 - 1, grid.cells[0], grid.periodic(0), dummy);
    const int jp = wrap_or_clamp(j0 + 1, grid.cells[1], grid.periodic(1), dummy);
    const int jm = wrap_or_clamp(j0 - 1, grid.cells[1], grid.periodic(1), dummy);
    const double fxy = (f[grid.flat_index(ip, jp)] - f[grid.flat_index(ip, jm)] -
                        f[grid.flat_index(im, jp)] + f[grid.flat_index(im, jm)]) /
                       (4.0 * hx * hy);
    out[c] = std::sqrt(fxx * fxx + 2.0 * fxy * fxy + fyy * fyy);
  }
  return out;
}

CutoffCertificate build_xi_general(const Region& X, const Region& Y, const Grid& grid,
                                   double c3) {
  const double d = region_distance(X, Y, grid);
  if (!(d > 0.0)) throw std::invalid_argument("cutoff requires d_XY > 0");
  const double h = std::max(grid.spacing(0), grid.dim == 2 ? grid.spacing(1) : 0.0);
  if (h > d / (8.0 * c3 * c3))
    throw std::runtime_error("transition layer under-resolved: need h <= d_XY/(8 c3^2)");

  const Field rho = build_regularized_distance(X, grid, c3);
  const TransitionProfile eta = build_eta(c3);

  CutoffCertificate cert;
  cert.grid = grid;
  cert.X = X;
  cert.Y = Y;
  cert.d_XY = d;
  cert.c3 = c3;
  cert.mode = CutoffMode::General;
  cert.c1_analytic = c3 * eta.c4();
  cert.c2_analytic = 3.0 * c3 * c3 * c3 * eta.c4();

  const int n = grid.cell_count();
  cert.xi = Field(n);
  for (int c = 0; c < n; ++c) cert.xi[c] = eta(rho[c] / d);

  for (int c : X.cell_indices)
    if (cert.xi[c] != 0.0) throw std::logic_error("cutoff plateau violated on X");
  for (int c : Y.cell_indices)
    if (cert.xi[c] != 1.0) throw std::logic_error("cutoff plateau violated on Y");

  const auto grad = field_gradient(cert.xi, grid);
  const Field hess = field_hessian_norm(cert.xi, grid);
  double g1 = 0.0, g2 = 0.0;
  for (int c = 0; c < n; ++c) {
    g1 = std::max(g1, grid.dim == 2 ? grad[c].norm() : std::abs(grad[c][0]));
    g2 = std::max(g2, hess[c]);
  }
  cert.c1_measured = g1 * d;
  cert.c2_measured = g2 * d * d;
  if (cert.c1_measured > 1.1 * cert.c1_analytic ||
      cert.c2_measured > 1.1 * cert.c2_analytic) {
    std::ostringstream os;
    os << "measured cutoff constants exceed analytic bounds: c1 " << cert.c1_measured
       << " vs " << cert.c1_analytic << ", c2 " << cert.c2_measured << " vs "
       << cert.c2_analytic;
    throw std::runtime_error(os.str());
  }
  return cert;
}

namespace {

// A slab along `axis` is a region equal to {cells with index_axis in [lo, hi]}.
struct SlabInfo {
  int axis = -1;
  int lo = 0, hi = 0;
};

std::optional<SlabInfo> detect_slab(const Region& R, const Grid& grid) {
  for (int axis = 0; axis < grid.dim; ++axis) {
    int lo = grid.cells[axis], hi = -1;
    for (int c : R.cell_indices) {
      const int k = grid.multi_index(c)[axis];
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
    const int other = 1 - axis;
    const long expected =
        static_cast<long>(hi - lo + 1) * (grid.dim == 2 ? grid.cells[other] : 1);
    if (expected == static_cast<long>(R.cell_indices.size()))
      return SlabInfo{axis, lo, hi};
  }
  return std::nullopt;
}

}  // namespace

CutoffCertificate build_xi_sharp(const Region& X, const Region& Y, const Grid& grid,
                                 double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("sharp cutoff requires epsilon in (0, 0.5)");
  const auto sx = detect_slab(X, grid);
  const auto sy = detect_slab(Y, grid);
  if (!sx || !sy || sx->axis != sy->axis)
    throw std::runtime_error("sharp mode requires separated slabs");
  const int axis = sx->axis;
  int xlo = sx->lo, xhi = sx->hi, ylo = sy->lo, yhi = sy->hi;
  bool flipped = false;
  if (xlo > ylo) {
    std::swap(xlo, ylo);
    std::swap(xhi, yhi);
    flipped = true;  // X sits above Y along the axis
  }
  if (xhi >= ylo) throw std::runtime_error("sharp mode requires separated slabs");

  const double d = region_distance(X, Y, grid);
  const double h = grid.spacing(axis);
  // gap-side edge coordinate of the X slab (cell-center convention); after the
  // swap above, [xlo, xhi] is the lower slab and [ylo, yhi] the upper one
  const double edge = grid.lower[axis] + (static_cast<double>(flipped ? ylo : xhi) + 0.5) * h;

  const double kappa = 2.0 * (1.0 - epsilon) / epsilon;
  auto eta_sharp = [&](double m) {
    if (m <= 0.0) return 0.5 * epsilon * std::exp(kappa * m);
    if (m >= 1.0) return 1.0 - 0.5 * epsilon * std::exp(-kappa * (m - 1.0));
    return 0.5 * epsilon + (1.0 - epsilon) * m;
  };

  CutoffCertificate cert;
  cert.grid = grid;
  cert.X = X;
  cert.Y = Y;
  cert.d_XY = d;
  cert.c3 = 0.0;
  cert.mode = CutoffMode::Sharp;
  cert.epsilon = epsilon;
  cert.c1_analytic = 1.0;
  cert.c2_analytic = 0.0;

  const int n = grid.cell_count();
  cert.xi = Field(n);
  for (int c = 0; c < n; ++c) {
    double m = (grid.cell_center(c)[axis] - edge) / d;
    if (flipped) m = -m;  // X is the upper slab: xi must still vanish on X
    cert.xi[c] = eta_sharp(m);
  }

  for (int c : X.cell_indices)
    if (cert.xi[c] > 0.5 * epsilon + 1e-14)
      throw std::logic_error("sharp cutoff exceeds eps/2 on X");
  for (int c : Y.cell_indices)
    if (cert.xi[c] < 1.0 - 0.5 * epsilon - 1e-14)
      throw std::logic_error("sharp cutoff below 1 - eps/2 on Y");

  // Gradient and concavity measured inside the transition gap only, with
  // stencils that do not reach into the caps.
  const int glo = xhi + 1, ghi = ylo - 1;
  double grad_sup = (1.0 - epsilon) / d;
  double second_max = 0.0;
  const int other = 1 - axis;
  const int n_other = grid.dim == 2 ? grid.cells[other] : 1;
  for (int k = 0; k < n_other; ++k) {
    auto cell_at = [&](int idx) {
      return axis == 0 ? grid.flat_index(idx, grid.dim == 2 ? k : 0)
                       : grid.flat_index(k, idx);
    };
    for (int i = glo; i < ghi; ++i)
      grad_sup = std::max(grad_sup,
                          std::abs(cert.xi[cell_at(i + 1)] - cert.xi[cell_at(i)]) / h);
    for (int i = glo + 1; i < ghi; ++i) {
      const double sd = (cert.xi[cell_at(i + 1)] - 2.0 * cert.xi[cell_at(i)] +
                         cert.xi[cell_at(i - 1)]) /
                        (h * h);
      second_max = std::max(second_max, sd);
    }
    if (grid.dim == 2) break;  // xi is constant along the other axis
  }
  cert.c1_measured = grad_sup * d;
  cert.c2_measured = second_max * d * d;
  cert.concavity_ok = second_max <= 1e-10;
  return cert;
}

TiltingExponent build_phi(std::shared_ptr<const CutoffCertificate> cert, double mu) {
  if (mu < 0.0) throw std::invalid_argument("tilting strength mu must be >= 0");
  TiltingExponent te;
  te.mu = mu;
  te.phi = mu * (Field::Ones(cert->xi.size()) - 2.0 * cert->xi);
  te.certificate = std::move(cert);
  return te;
}

}  // namespace dgb
