#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "czlab/field.hpp"
#include "czlab/integrals.hpp"

namespace czlab {

enum class RadiusPolicy { Geometric, Dense, Explicit };

/// Mask: precomputed node-offset stencils per radius.
/// FftLike: row prefix sums (frequency-free fast summation, ~1e-9 of Mask).
/// Brute: exhaustive bounding-box scan with per-node membership tests.
enum class MaximalBackend { Mask, FftLike, Brute };

inline MaximalBackend parse_backend(std::string_view s) {
  if (s == "mask") return MaximalBackend::Mask;
  if (s == "fft-like") return MaximalBackend::FftLike;
  if (s == "brute") return MaximalBackend::Brute;
  throw std::invalid_argument("unknown maximal backend '" + std::string(s) + "'");
}

inline const char* to_string(MaximalBackend b) {
  switch (b) {
    case MaximalBackend::Mask: return "mask";
    case MaximalBackend::FftLike: return "fft-like";
    case MaximalBackend::Brute: return "brute";
  }
  return "?";
}

/// Node-offset stencil of B_r (spatial grids) or Q_r (space-time grids),
/// offsets in increasing flat order.
struct Stencil {
  double r = 0.0;
  double q = 0.0;   // r / h
  double qt = 0.0;  // r^2 / (2 tau), space-time only
  Index reach = 0;
  Index t_lo = 0, t_hi = 0;  // time offset range
  std::vector<Index> offsets;
};

inline Stencil make_stencil(const Grid& g, double r) {
  const Domain& d = g.space();
  const int n = d.dim();
  Stencil s;
  s.r = r;
  s.q = r / d.spacing();
  s.reach = static_cast<Index>(std::ceil(s.q));
  if (g.has_time()) {
    s.qt = r * r / (2.0 * g.time().tau);
    s.t_lo = -static_cast<Index>(std::ceil(s.qt));
    s.t_hi = static_cast<Index>(std::ceil(s.qt));
  }
  for (Index k = s.t_lo; k <= s.t_hi; ++k) {
    if (g.has_time() && !detail::inside_time_units(static_cast<double>(k), s.qt)) continue;
    MultiIndex o{0, 0, 0};
    for (o[0] = -s.reach; o[0] <= s.reach; ++o[0])
      for (o[1] = (n > 1 ? -s.reach : 0); o[1] <= (n > 1 ? s.reach : 0); ++o[1])
        for (o[2] = (n > 2 ? -s.reach : 0); o[2] <= (n > 2 ? s.reach : 0); ++o[2]) {
          double d2 = 0.0;
          Index flat = k * g.slice_size();
          for (int a = 0; a < n; ++a) {
            d2 += static_cast<double>(o[a] * o[a]);
            flat += o[a] * d.stride(a);
          }
          if (detail::inside_ball_units(d2, s.q)) s.offsets.push_back(flat);
        }
  }
  return s;
}

/// True when B_r(x) (or Q_r(x,t)) lies inside the computational box.
inline bool admissible(const Grid& g, Index node, double r) {
  const Domain& d = g.space();
  const double q = r / d.spacing() - 1e-9;
  const MultiIndex idx = d.unflat(g.spatial_of(node));
  for (int a = 0; a < d.dim(); ++a) {
    if (static_cast<double>(idx[a]) < q || static_cast<double>(d.points_per_axis() - 1 - idx[a]) < q) return false;
  }
  if (g.has_time()) {
    const double qt = r * r / (2.0 * g.time().tau) - 1e-9;
    const Index k = g.slice_of(node);
    if (static_cast<double>(k) < qt || static_cast<double>(g.slices() - 1 - k) < qt) return false;
  }
  return true;
}

/// Largest radius whose ball/cube centred in the box fits inside it.
inline double max_centered_radius(const Grid& g) {
  const Domain& d = g.space();
  double r = 0.5 * (d.hi(0) - d.lo(0));
  if (g.has_time()) r = std::min(r, std::sqrt(g.time().t_hi() - g.time().t_lo));
  return r;
}

/// The discrete radii over which maximal suprema are taken.
class RadiusSet {
 public:
  RadiusSet() = default;
  RadiusSet(std::vector<double> radii, RadiusPolicy policy) : radii_(std::move(radii)), policy_(policy) {
    if (radii_.empty()) throw std::invalid_argument("RadiusSet: empty");
    for (std::size_t i = 0; i < radii_.size(); ++i) {
      if (!(radii_[i] > 0.0)) throw std::invalid_argument("RadiusSet: radii must be positive");
      if (i > 0 && !(radii_[i] > radii_[i - 1])) throw std::invalid_argument("RadiusSet: radii must increase");
    }
  }

  /// r_j = 2h * kappa^j up to r_max, keeping radii whose stencil has >= 5 nodes.
  static RadiusSet geometric(const Grid& g, double r_max, double kappa = 1.25) {
    std::vector<double> radii;
    const double h = g.space().spacing();
    for (double r = 2.0 * h; r <= r_max * (1.0 + 1e-12); r *= kappa)
      if (make_stencil(g, r).offsets.size() >= 5) radii.push_back(r);
    return RadiusSet(std::move(radii), RadiusPolicy::Geometric);
  }

  /// Every multiple k*h (k >= 2) up to r_max.
  static RadiusSet dense(const Grid& g, double r_max) {
    std::vector<double> radii;
    const double h = g.space().spacing();
    for (Index k = 2; static_cast<double>(k) * h <= r_max * (1.0 + 1e-12); ++k) {
      const double r = static_cast<double>(k) * h;
      if (make_stencil(g, r).offsets.size() >= 5) radii.push_back(r);
    }
    return RadiusSet(std::move(radii), RadiusPolicy::Dense);
  }

  static RadiusSet build(const Grid& g, double r_max, RadiusPolicy policy) {
    return policy == RadiusPolicy::Dense ? dense(g, r_max) : geometric(g, r_max);
  }

  const std::vector<double>& radii() const { return radii_; }
  RadiusPolicy policy() const { return policy_; }
  std::size_t size() const { return radii_.size(); }
  double operator[](std::size_t i) const { return radii_[i]; }

  /// Throws unless every radius is >= 2h and admits >= 5 nodes on g.
  void validate(const Grid& g) const {
    const double h = g.space().spacing();
    for (double r : radii_) {
      if (r < 2.0 * h * (1.0 - 1e-12)) throw std::invalid_argument("RadiusSet: radius below 2h");
      if (make_stencil(g, r).offsets.size() < 5) throw std::invalid_argument("RadiusSet: radius admits fewer than 5 nodes");
    }
  }

 private:
  std::vector<double> radii_;
  RadiusPolicy policy_ = RadiusPolicy::Explicit;
};

/// Maximal-operator values at a set of evaluation nodes (squared convention,
/// no square root).
struct MaximalField {
  Grid grid;
  std::vector<Index> points;
  Eigen::VectorXd values;
  Eigen::VectorXd radius_argmax;
  Eigen::Array<bool, Eigen::Dynamic, 1> valid;

  bool all_valid() const { return valid.all(); }
};

/// Mean-square oscillation over a region, by two routes.
struct Oscillation {
  double direct = 0.0;        // mean |w - mean(w)|^2
  double via_identity = 0.0;  // mean |w|^2 - |mean w|^2
  Index nodes = 0;
  double value() const { return direct; }
};

namespace detail {

// Column views of a scalar or symmetric tensor field with Frobenius weights.
template <typename Scalar>
struct Channels {
  const Grid* grid;
  std::vector<const Scalar*> cols;
  std::vector<Scalar> weights;

  explicit Channels(const BasicScalarField<Scalar>& w) : grid(&w.grid()), cols{w.values().data()}, weights{Scalar(1)} {}
  explicit Channels(const BasicSymTensorField<Scalar>& w) : grid(&w.grid()) {
    for (int c = 0; c < w.components(); ++c) {
      cols.push_back(w.values().col(c).data());
      weights.push_back(static_cast<Scalar>(sym_weight(w.dim(), c)));
    }
  }
  std::size_t size() const { return cols.size(); }
};

// Per-channel running sums over one ball/cube.
template <typename Scalar>
struct Sums {
  std::vector<Scalar> s1, s2;
  Index count = 0;
  explicit Sums(std::size_t channels) : s1(channels, Scalar(0)), s2(channels, Scalar(0)) {}
};

// max(0, sum_c w_c (N*S2 - S1^2)) / N^2. The mean-square value is the same
// expression with S1 = 0, so the domination sharp <= mean-square survives
// rounding; on exactly summable data the numerator is shift invariant.
template <typename Scalar>
double finish(const Sums<Scalar>& s, const std::vector<Scalar>& wts, bool centred) {
  const auto n = static_cast<Scalar>(s.count);
  Scalar acc = 0;
  for (std::size_t c = 0; c < wts.size(); ++c) {
    const Scalar ns2 = n * s.s2[c];
    acc += wts[c] * (centred ? ns2 - s.s1[c] * s.s1[c] : ns2);
  }
  return std::max(0.0, static_cast<double>(acc / (n * n)));
}

template <typename Scalar>
double finish_oscillation(const Sums<Scalar>& s, const std::vector<Scalar>& wts) {
  return finish(s, wts, true);
}

template <typename Scalar>
double finish_mean_square(const Sums<Scalar>& s, const std::vector<Scalar>& wts) {
  return finish(s, wts, false);
}

template <typename Scalar>
Sums<Scalar> mask_sums(const Channels<Scalar>& ch, const Stencil& st, Index p) {
  Sums<Scalar> s(ch.size());
  for (std::size_t c = 0; c < ch.size(); ++c) {
    const Scalar* v = ch.cols[c];
    Scalar a = 0, b = 0;
    for (Index off : st.offsets) {
      const Scalar x = v[p + off];
      a += x;
      b += x * x;
    }
    s.s1[c] = a;
    s.s2[c] = b;
  }
  s.count = static_cast<Index>(st.offsets.size());
  return s;
}

// Same summation order as mask_sums, but membership is decided node by node.
template <typename Scalar>
Sums<Scalar> brute_sums(const Channels<Scalar>& ch, const Grid& g, double r, Index p) {
  const Domain& d = g.space();
  const int n = d.dim();
  const double q = r / d.spacing();
  const auto reach = static_cast<Index>(std::ceil(q));
  const MultiIndex c = d.unflat(g.spatial_of(p));
  const Index kc = g.slice_of(p);
  Index k_lo = kc, k_hi = kc;
  double qt = 0.0;
  if (g.has_time()) {
    qt = r * r / (2.0 * g.time().tau);
    k_lo = kc - static_cast<Index>(std::ceil(qt));
    k_hi = kc + static_cast<Index>(std::ceil(qt));
  }
  Sums<Scalar> s(ch.size());
  std::vector<Index> members;
  for (Index k = k_lo; k <= k_hi; ++k) {
    if (g.has_time() && !inside_time_units(static_cast<double>(k - kc), qt)) continue;
    MultiIndex i{0, 0, 0};
    for (i[0] = c[0] - reach; i[0] <= c[0] + reach; ++i[0])
      for (i[1] = (n > 1 ? c[1] - reach : 0); i[1] <= (n > 1 ? c[1] + reach : 0); ++i[1])
        for (i[2] = (n > 2 ? c[2] - reach : 0); i[2] <= (n > 2 ? c[2] + reach : 0); ++i[2]) {
          double d2 = 0.0;
          for (int a = 0; a < n; ++a) d2 += static_cast<double>((i[a] - c[a]) * (i[a] - c[a]));
          if (inside_ball_units(d2, q)) members.push_back(g.join(k, d.flat(i)));
        }
  }
  for (std::size_t ci = 0; ci < ch.size(); ++ci) {
    const Scalar* v = ch.cols[ci];
    Scalar a = 0, b = 0;
    for (Index f : members) {
      const Scalar x = v[f];
      a += x;
      b += x * x;
    }
    s.s1[ci] = a;
    s.s2[ci] = b;
  }
  s.count = static_cast<Index>(members.size());
  return s;
}

// Row prefix sums along the fastest spatial axis, long double accumulation.
template <typename Scalar>
class PrefixTables {
 public:
  explicit PrefixTables(const Channels<Scalar>& ch) : m_(ch.grid->space().points_per_axis()) {
    const Index nodes = ch.grid->node_count();
    const Index lines = nodes / m_;
    for (std::size_t c = 0; c < ch.size(); ++c) {
      std::vector<long double> p1(static_cast<std::size_t>(lines * (m_ + 1)));
      std::vector<long double> p2(p1.size());
      for (Index l = 0; l < lines; ++l) {
        long double a = 0, b = 0;
        p1[l * (m_ + 1)] = p2[l * (m_ + 1)] = 0;
        for (Index i = 0; i < m_; ++i) {
          const long double x = ch.cols[c][l * m_ + i];
          a += x;
          b += x * x;
          p1[l * (m_ + 1) + i + 1] = a;
          p2[l * (m_ + 1) + i + 1] = b;
        }
      }
      p1_.push_back(std::move(p1));
      p2_.push_back(std::move(p2));
    }
  }

  // Sum over the segment [f - len, f + len] of the row containing node f.
  void add_segment(std::size_t c, Index f, Index len, long double& a, long double& b) const {
    const Index line = f / m_;
    const Index i = f % m_;
    const Index base = line * (m_ + 1);
    a += p1_[c][base + i + len + 1] - p1_[c][base + i - len];
    b += p2_[c][base + i + len + 1] - p2_[c][base + i - len];
  }

 private:
  Index m_;
  std::vector<std::vector<long double>> p1_, p2_;
};

// Rows of a stencil: flat offset of the row centre and half-length.
struct RowSegments {
  std::vector<Index> centre;
  std::vector<Index> half;
  Index count = 0;
};

inline RowSegments row_segments(const Grid& g, const Stencil& st) {
  const Domain& d = g.space();
  const int n = d.dim();
  RowSegments rows;
  for (Index k = st.t_lo; k <= st.t_hi; ++k) {
    if (g.has_time() && !inside_time_units(static_cast<double>(k), st.qt)) continue;
    MultiIndex o{0, 0, 0};
    const Index outer_hi0 = n > 1 ? st.reach : 0;
    const Index outer_hi1 = n > 2 ? st.reach : 0;
    for (o[0] = -outer_hi0; o[0] <= outer_hi0; ++o[0])
      for (o[1] = -outer_hi1; o[1] <= outer_hi1; ++o[1]) {
        double d2 = 0.0;
        Index flat = k * g.slice_size();
        for (int a = 0; a < n - 1; ++a) {
          d2 += static_cast<double>(o[a] * o[a]);
          flat += o[a] * d.stride(a);
        }
        Index len = -1;
        for (Index l = 0; l <= st.reach; ++l)
          if (inside_ball_units(d2 + static_cast<double>(l * l), st.q)) len = l;
        if (len < 0) continue;
        rows.centre.push_back(flat);
        rows.half.push_back(len);
        rows.count += 2 * len + 1;
      }
  }
  return rows;
}

template <typename Scalar>
Sums<Scalar> prefix_sums(const Channels<Scalar>& ch, const PrefixTables<Scalar>& tab, const RowSegments& rows, Index p) {
  Sums<Scalar> s(ch.size());
  for (std::size_t c = 0; c < ch.size(); ++c) {
    long double a = 0, b = 0;
    for (std::size_t r = 0; r < rows.centre.size(); ++r) tab.add_segment(c, p + rows.centre[r], rows.half[r], a, b);
    s.s1[c] = static_cast<Scalar>(a);
    s.s2[c] = static_cast<Scalar>(b);
  }
  s.count = rows.count;
  return s;
}

enum class MaximalKind { Sharp, MeanSquare };

template <typename Scalar>
MaximalField evaluate_maximal(const Channels<Scalar>& ch, std::span<const Index> points, const RadiusSet& rs,
                              MaximalBackend backend, MaximalKind kind) {
  const Grid& g = *ch.grid;
  rs.validate(g);
  MaximalField out{g, std::vector<Index>(points.begin(), points.end()), Eigen::VectorXd::Zero(points.size()),
                   Eigen::VectorXd::Zero(points.size()), Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(points.size(), false)};
  std::vector<double> best(points.size(), -1.0);

  std::optional<PrefixTables<Scalar>> tables;
  if (backend == MaximalBackend::FftLike) tables.emplace(ch);

  for (double r : rs.radii()) {
    Stencil st;
    RowSegments rows;
    if (backend == MaximalBackend::Mask) st = make_stencil(g, r);
    if (backend == MaximalBackend::FftLike) rows = row_segments(g, make_stencil(g, r));
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Index p = points[i];
      if (!admissible(g, p, r)) continue;
      Sums<Scalar> s = backend == MaximalBackend::Mask      ? mask_sums(ch, st, p)
                       : backend == MaximalBackend::Brute   ? brute_sums(ch, g, r, p)
                                                            : prefix_sums(ch, *tables, rows, p);
      const double v = kind == MaximalKind::Sharp ? finish_oscillation(s, ch.weights) : finish_mean_square(s, ch.weights);
      // strict comparison: ties go to the smaller radius
      if (v > best[i]) {
        best[i] = v;
        out.values[static_cast<Index>(i)] = v;
        out.radius_argmax[static_cast<Index>(i)] = r;
        out.valid[static_cast<Index>(i)] = true;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Mean-square oscillation of w over reg, computed by the two-pass route and
/// by the local-variance identity.
template <typename Field>
Oscillation local_oscillation2(const Field& w, const Region& reg) {
  const auto nodes = detail::nonempty_region(w.grid(), reg);
  detail::Channels ch(w);
  Oscillation o;
  o.nodes = static_cast<Index>(nodes.size());
  const double n = static_cast<double>(nodes.size());
  for (std::size_t c = 0; c < ch.size(); ++c) {
    double s1 = 0.0, s2 = 0.0;
    for (Index f : nodes) {
      const double x = static_cast<double>(ch.cols[c][f]);
      s1 += x;
      s2 += x * x;
    }
    const double mean = s1 / n;
    double dev = 0.0;
    for (Index f : nodes) {
      const double e = static_cast<double>(ch.cols[c][f]) - mean;
      dev += e * e;
    }
    const double wt = static_cast<double>(ch.weights[c]);
    o.direct += wt * dev / n;
    o.via_identity += wt * (s2 / n - mean * mean);
  }
  return o;
}

/// Per-radius oscillation at one node; NaN-free: inadmissible radii are skipped
/// and reported through `admissible`.
struct OscillationProfile {
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<bool> admissible;
};

template <typename Field>
OscillationProfile oscillation_profile(const Field& w, Index point, const RadiusSet& rs) {
  detail::Channels ch(w);
  OscillationProfile prof;
  for (double r : rs.radii()) {
    prof.radii.push_back(r);
    const bool ok = admissible(w.grid(), point, r);
    prof.admissible.push_back(ok);
    prof.values.push_back(ok ? detail::finish_oscillation(detail::mask_sums(ch, make_stencil(w.grid(), r), point), ch.weights)
                             : 0.0);
  }
  return prof;
}

/// M#_2 w(x) = sup_r mean_{B_r(x)} |w - mean w|^2 over admissible radii.
template <typename Field>
MaximalField sharp_maximal_2(const Field& w, std::span<const Index> points, const RadiusSet& rs,
                             MaximalBackend backend = MaximalBackend::Mask) {
  if (w.grid().has_time()) throw std::invalid_argument("sharp_maximal_2: use sharp_maximal_2_parabolic on space-time fields");
  return detail::evaluate_maximal(detail::Channels(w), points, rs, backend, detail::MaximalKind::Sharp);
}

/// Parabolic version over Q_r(x, t).
template <typename Field>
MaximalField sharp_maximal_2_parabolic(const Field& w, std::span<const Index> points, const RadiusSet& rs,
                                       MaximalBackend backend = MaximalBackend::Mask) {
  if (!w.grid().has_time()) throw std::invalid_argument("sharp_maximal_2_parabolic: field has no time axis");
  return detail::evaluate_maximal(detail::Channels(w), points, rs, backend, detail::MaximalKind::Sharp);
}

/// sup_r mean_{B_r(x)} |w|^2 (or over Q_r on space-time fields).
template <typename Field>
MaximalField hl_maximal(const Field& w, std::span<const Index> points, const RadiusSet& rs,
                        MaximalBackend backend = MaximalBackend::Mask) {
  return detail::evaluate_maximal(detail::Channels(w), points, rs, backend, detail::MaximalKind::MeanSquare);
}

/// All nodes of g lying in reg, in flat order.
inline std::vector<Index> points_in(const Grid& g, const Region& reg) { return region_nodes(g, reg); }

/// Throws if any evaluation point had no admissible radius.
inline void require_valid(const MaximalField& m, const char* what) {
  if (!m.all_valid()) throw std::domain_error(std::string(what) + ": evaluation point with no admissible radius");
}

}  // namespace czlab
