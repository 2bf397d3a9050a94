#pragma once

#include <vector>

#include "czlab/field.hpp"

namespace czlab {

namespace detail {

// Position of node f along an axis with the given stride and length.
inline Index line_position(Index f, Index stride, Index count) { return (f / stride) % count; }

// Second-order first derivative along one axis; one-sided second-order at the ends.
template <typename Vec>
typename Vec::Scalar first_difference(const Vec& u, Index f, Index stride, Index count, double step) {
  using S = typename Vec::Scalar;
  const Index i = line_position(f, stride, count);
  const S inv = S(1) / static_cast<S>(2.0 * step);
  if (i == 0) return (-S(3) * u[f] + S(4) * u[f + stride] - u[f + 2 * stride]) * inv;
  if (i == count - 1) return (S(3) * u[f] - S(4) * u[f - stride] + u[f - 2 * stride]) * inv;
  return (u[f + stride] - u[f - stride]) * inv;
}

// Second-order second derivative along one axis; one-sided four-point
// second-order formula at the ends.
template <typename Vec>
typename Vec::Scalar second_difference(const Vec& u, Index f, Index stride, Index count, double step) {
  using S = typename Vec::Scalar;
  const Index i = line_position(f, stride, count);
  const S inv = S(1) / static_cast<S>(step * step);
  if (i == 0) return (S(2) * u[f] - S(5) * u[f + stride] + S(4) * u[f + 2 * stride] - u[f + 3 * stride]) * inv;
  if (i == count - 1) return (S(2) * u[f] - S(5) * u[f - stride] + S(4) * u[f - 2 * stride] - u[f - 3 * stride]) * inv;
  return (u[f + stride] - S(2) * u[f] + u[f - stride]) * inv;
}

template <typename Vec>
Vec first_along(const Vec& u, const Grid& g, int axis) {
  const Domain& d = g.space();
  const Index stride = d.stride(axis);
  const Index m = d.points_per_axis();
  Vec out(u.size());
  for (Index f = 0; f < u.size(); ++f) out[f] = first_difference(u, f, stride, m, d.spacing());
  return out;
}

template <typename Vec>
Vec second_along(const Vec& u, const Grid& g, int axis) {
  const Domain& d = g.space();
  const Index stride = d.stride(axis);
  const Index m = d.points_per_axis();
  Vec out(u.size());
  for (Index f = 0; f < u.size(); ++f) out[f] = second_difference(u, f, stride, m, d.spacing());
  return out;
}

}  // namespace detail

/// Spatial gradient, one field per axis. Applied slice by slice on space-time
/// fields.
template <typename Scalar>
std::vector<BasicScalarField<Scalar>> gradient(const BasicScalarField<Scalar>& u) {
  std::vector<BasicScalarField<Scalar>> out;
  for (int a = 0; a < u.grid().dim(); ++a)
    out.emplace_back(u.grid(), detail::first_along(u.values(), u.grid(), a));
  return out;
}

/// Finite-difference Hessian: central second differences on the diagonal,
/// centred cross differences off it. Exact on quadratics at interior nodes.
template <typename Scalar>
BasicSymTensorField<Scalar> hessian(const BasicScalarField<Scalar>& u) {
  const Grid& g = u.grid();
  const int n = g.dim();
  typename BasicSymTensorField<Scalar>::Matrix values(g.node_count(), sym_components(n));
  for (int j = 0; j < n; ++j) {
    values.col(sym_index(n, j, j)) = detail::second_along(u.values(), g, j);
    if (j + 1 < n) {
      const auto dj = detail::first_along(u.values(), g, j);
      for (int i = j + 1; i < n; ++i) values.col(sym_index(n, j, i)) = detail::first_along(dj, g, i);
    }
  }
  return BasicSymTensorField<Scalar>(g, std::move(values));
}

/// Trace of the Hessian, i.e. the (2n+1)-point Laplacian at interior nodes.
template <typename Scalar>
BasicScalarField<Scalar> laplacian(const BasicScalarField<Scalar>& u) {
  const Grid& g = u.grid();
  typename BasicScalarField<Scalar>::Vector acc = detail::second_along(u.values(), g, 0);
  for (int a = 1; a < g.dim(); ++a) acc += detail::second_along(u.values(), g, a);
  return BasicScalarField<Scalar>(g, std::move(acc));
}

/// Time derivative of a space-time field: centred in interior slices,
/// one-sided second order at the first and last slice.
template <typename Scalar>
BasicScalarField<Scalar> dt(const BasicScalarField<Scalar>& u) {
  const Grid& g = u.grid();
  if (!g.has_time()) throw std::invalid_argument("dt: field has no time axis");
  const TimeAxis& ta = g.time();
  if (ta.nt < 3) throw std::invalid_argument("dt: need at least 3 time slices");
  typename BasicScalarField<Scalar>::Vector out(u.size());
  for (Index f = 0; f < u.size(); ++f)
    out[f] = detail::first_difference(u.values(), f, g.slice_size(), ta.nt, ta.tau);
  return BasicScalarField<Scalar>(g, std::move(out));
}

/// True when node f is at least `margin` nodes away from every spatial face
/// (and, with time_margin > 0, from the first/last slice).
inline bool is_interior(const Grid& g, Index f, Index margin = 1, Index time_margin = 0) {
  const Domain& d = g.space();
  const MultiIndex idx = d.unflat(g.spatial_of(f));
  for (int a = 0; a < d.dim(); ++a)
    if (idx[a] < margin || idx[a] > d.points_per_axis() - 1 - margin) return false;
  if (time_margin > 0) {
    const Index k = g.slice_of(f);
    if (k < time_margin || k > g.slices() - 1 - time_margin) return false;
  }
  return true;
}

}  // namespace czlab
