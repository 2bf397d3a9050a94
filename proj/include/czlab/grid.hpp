#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace czlab {

inline constexpr int kMaxDim = 3;

using Index = std::ptrdiff_t;
using Point = std::array<double, kMaxDim>;
using MultiIndex = std::array<Index, kMaxDim>;

/// Uniform Cartesian grid on an axis-aligned box in dimension 1..3.
/// Spacing is the same on every axis; node coordinates are lo + i*h.
class Domain {
 public:
  Domain(int n, double lo, double hi, Index m) : Domain(n, filled(lo), filled(hi), m) {}

  Domain(int n, const Point& lo, const Point& hi, Index m) : n_(n), m_(m), lo_(lo), hi_(hi) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("Domain: dimension must be 1, 2 or 3");
    if (m < 8) throw std::invalid_argument("Domain: need at least 8 grid points per axis");
    h_ = (hi[0] - lo[0]) / static_cast<double>(m - 1);
    if (!(h_ > 0.0)) throw std::invalid_argument("Domain: spacing must be positive");
    for (int a = 1; a < n; ++a) {
      const double ha = (hi[a] - lo[a]) / static_cast<double>(m - 1);
      if (std::abs(ha - h_) > 1e-12 * h_) throw std::invalid_argument("Domain: spacing must be uniform across axes");
    }
    for (int a = n; a < kMaxDim; ++a) lo_[a] = hi_[a] = 0.0;
    nodes_ = 1;
    for (int a = 0; a < n; ++a) nodes_ *= m;
  }

  /// [-half, half]^n with `cells` intervals per axis.
  static Domain cube(int n, double half, Index cells) { return Domain(n, -half, half, cells + 1); }

  int dim() const { return n_; }
  Index points_per_axis() const { return m_; }
  double spacing() const { return h_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  Index node_count() const { return nodes_; }
  double cell_volume() const { return std::pow(h_, n_); }

  double coord(Index i, int axis) const { return lo_[axis] + static_cast<double>(i) * h_; }

  // Axis 0 varies slowest (row-major).
  Index stride(int axis) const {
    Index s = 1;
    for (int a = n_ - 1; a > axis; --a) s *= m_;
    return s;
  }

  Index flat(const MultiIndex& idx) const {
    Index f = 0;
    for (int a = 0; a < n_; ++a) f = f * m_ + idx[a];
    return f;
  }

  MultiIndex unflat(Index f) const {
    MultiIndex idx{0, 0, 0};
    for (int a = n_ - 1; a >= 0; --a) {
      idx[a] = f % m_;
      f /= m_;
    }
    return idx;
  }

  Point position(Index f) const {
    const MultiIndex idx = unflat(f);
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < n_; ++a) x[a] = coord(idx[a], a);
    return x;
  }

  /// Node nearest to x (clamped to the box).
  Index nearest(const Point& x) const {
    MultiIndex idx{0, 0, 0};
    for (int a = 0; a < n_; ++a) {
      const auto i = static_cast<Index>(std::llround((x[a] - lo_[a]) / h_));
      idx[a] = std::clamp<Index>(i, 0, m_ - 1);
    }
    return flat(idx);
  }

  bool operator==(const Domain& o) const { return n_ == o.n_ && m_ == o.m_ && lo_ == o.lo_ && hi_ == o.hi_; }

 private:
  static Point filled(double v) { return Point{v, v, v}; }

  int n_;
  Index m_;
  Point lo_;
  Point hi_;
  double h_ = 0.0;
  Index nodes_ = 0;
};

struct TimeAxis {
  double t_lo = 0.0;
  double tau = 0.0;
  Index nt = 0;

  double at(Index k) const { return t_lo + static_cast<double>(k) * tau; }
  double t_hi() const { return at(nt - 1); }
  bool operator==(const TimeAxis& o) const = default;
};

/// Spatial grid times a uniform time axis. The default step is the parabolic
/// scaling tau = h^2/2.
class SpaceTimeDomain {
 public:
  SpaceTimeDomain(Domain space, double t_lo, double tau, Index nt) : space_(std::move(space)), time_{t_lo, tau, nt} {
    if (!(tau > 0.0)) throw std::invalid_argument("SpaceTimeDomain: time step must be positive");
    if (nt < 8) throw std::invalid_argument("SpaceTimeDomain: need at least 8 time slices");
  }

  /// Covers [t_lo, t_hi] with tau = h^2/2 (the last slice may stop short of t_hi).
  static SpaceTimeDomain parabolic(Domain space, double t_lo, double t_hi) {
    const double tau = 0.5 * space.spacing() * space.spacing();
    const auto steps = static_cast<Index>(std::floor((t_hi - t_lo) / tau + 1e-9));
    return SpaceTimeDomain(std::move(space), t_lo, tau, steps + 1);
  }

  /// Time axis symmetric about t = 0 with t = 0 a node: [-K tau, K tau],
  /// K = ceil(half_extent / tau).
  static SpaceTimeDomain centered(Domain space, double half_extent, std::optional<double> tau = std::nullopt) {
    const double step = tau.value_or(0.5 * space.spacing() * space.spacing());
    const auto k = static_cast<Index>(std::ceil(half_extent / step - 1e-9));
    return SpaceTimeDomain(std::move(space), -static_cast<double>(k) * step, step, 2 * k + 1);
  }

  const Domain& space() const { return space_; }
  const TimeAxis& time() const { return time_; }
  bool operator==(const SpaceTimeDomain& o) const { return space_ == o.space_ && time_ == o.time_; }

 private:
  Domain space_;
  TimeAxis time_;
};

/// What a field lives on: a spatial Domain, optionally extended by a time axis.
/// Node order is time slowest, then spatial row-major.
class Grid {
 public:
  Grid(Domain space) : space_(std::move(space)) {}  // NOLINT(google-explicit-constructor)
  Grid(const SpaceTimeDomain& st) : space_(st.space()), time_(st.time()) {}  // NOLINT

  const Domain& space() const { return space_; }
  bool has_time() const { return time_.has_value(); }
  const TimeAxis& time() const {
    if (!time_) throw std::logic_error("Grid: field has no time axis");
    return *time_;
  }
  SpaceTimeDomain space_time() const { return SpaceTimeDomain(space_, time().t_lo, time().tau, time().nt); }

  int dim() const { return space_.dim(); }
  Index slices() const { return time_ ? time_->nt : 1; }
  Index slice_size() const { return space_.node_count(); }
  Index node_count() const { return slice_size() * slices(); }

  /// Quadrature weight of one node: h^n, times tau on space-time grids.
  double cell_measure() const { return space_.cell_volume() * (time_ ? time_->tau : 1.0); }

  Index slice_of(Index f) const { return f / slice_size(); }
  Index spatial_of(Index f) const { return f % slice_size(); }
  Index join(Index slice, Index spatial) const { return slice * slice_size() + spatial; }
  double time_of(Index f) const { return time_ ? time_->at(slice_of(f)) : 0.0; }

  bool operator==(const Grid& o) const { return space_ == o.space_ && time_ == o.time_; }

 private:
  Domain space_;
  std::optional<TimeAxis> time_;
};

enum class RegionKind { Ball, ParabolicCube };

/// B_r(center) or Q_r(center, t0) = B_r(center) x (t0 - r^2/2, t0 + r^2/2].
struct Region {
  RegionKind kind = RegionKind::Ball;
  Point center{0.0, 0.0, 0.0};
  double t0 = 0.0;
  double r = 1.0;

  static Region ball(double r, Point center = {0.0, 0.0, 0.0}) { return Region{RegionKind::Ball, center, 0.0, r}; }
  static Region cube(double r, Point center = {0.0, 0.0, 0.0}, double t0 = 0.0) {
    return Region{RegionKind::ParabolicCube, center, t0, r};
  }
};

namespace detail {

// Nodes exactly on the sphere (or at the open time end) are outside; the guard
// keeps that decision stable when r is an exact multiple of h.
inline constexpr double kMembershipGuard = 1e-12;

inline bool inside_ball_units(double dist2_units, double q) { return dist2_units < q * q * (1.0 - kMembershipGuard); }

// Snap centres that sit on a node to exact integer grid units.
inline double snap_units(double u) {
  const double r = std::round(u);
  return std::abs(u - r) < 1e-9 ? r : u;
}

inline bool inside_time_units(double dk, double qt) {
  const double g = kMembershipGuard * std::max(1.0, qt);
  return dk > -qt + g && dk <= qt + g;
}

}  // namespace detail

/// Flat indices of all grid nodes inside `reg`, in increasing (row-major) order.
inline std::vector<Index> region_nodes(const Grid& grid, const Region& reg) {
  const Domain& d = grid.space();
  const int n = d.dim();
  const double h = d.spacing();
  if (!(reg.r > 0.0)) throw std::invalid_argument("region: radius must be positive");
  const bool cube = reg.kind == RegionKind::ParabolicCube;
  if (cube != grid.has_time())
    throw std::invalid_argument(cube ? "region: parabolic cube on a spatial field" : "region: ball on a space-time field");

  const double q = reg.r / h;
  Point u{0.0, 0.0, 0.0};
  MultiIndex lo_i{0, 0, 0}, hi_i{0, 0, 0};
  for (int a = 0; a < n; ++a) {
    u[a] = detail::snap_units((reg.center[a] - d.lo(a)) / h);
    lo_i[a] = std::max<Index>(0, static_cast<Index>(std::floor(u[a] - q)));
    hi_i[a] = std::min<Index>(d.points_per_axis() - 1, static_cast<Index>(std::ceil(u[a] + q)));
  }
  Index k_lo = 0, k_hi = 0;
  double ut = 0.0, qt = 0.0;
  if (cube) {
    const TimeAxis& ta = grid.time();
    ut = detail::snap_units((reg.t0 - ta.t_lo) / ta.tau);
    qt = reg.r * reg.r / (2.0 * ta.tau);
    k_lo = std::max<Index>(0, static_cast<Index>(std::floor(ut - qt)));
    k_hi = std::min<Index>(ta.nt - 1, static_cast<Index>(std::ceil(ut + qt)));
  }

  std::vector<Index> out;
  for (Index k = k_lo; k <= k_hi; ++k) {
    if (cube && !detail::inside_time_units(static_cast<double>(k) - ut, qt)) continue;
    MultiIndex i{lo_i[0], n > 1 ? lo_i[1] : 0, n > 2 ? lo_i[2] : 0};
    for (i[0] = lo_i[0]; i[0] <= hi_i[0]; ++i[0]) {
      for (i[1] = (n > 1 ? lo_i[1] : 0); i[1] <= (n > 1 ? hi_i[1] : 0); ++i[1]) {
        for (i[2] = (n > 2 ? lo_i[2] : 0); i[2] <= (n > 2 ? hi_i[2] : 0); ++i[2]) {
          double s = 0.0;
          for (int a = 0; a < n; ++a) {
            const double da = static_cast<double>(i[a]) - u[a];
            s += da * da;
          }
          if (detail::inside_ball_units(s, q)) out.push_back(grid.join(k, d.flat(i)));
        }
      }
    }
  }
  return out;
}

inline double region_measure(const Grid& grid, const Region& reg) {
  return static_cast<double>(region_nodes(grid, reg).size()) * grid.cell_measure();
}

}  // namespace czlab
