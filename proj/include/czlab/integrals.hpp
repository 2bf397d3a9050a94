#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "czlab/field.hpp"
#include "czlab/stencils.hpp"

namespace czlab {

namespace detail {
inline std::vector<Index> nonempty_region(const Grid& g, const Region& reg) {
  auto nodes = region_nodes(g, reg);
  if (nodes.empty()) throw std::invalid_argument("region contains no grid node");
  return nodes;
}
}  // namespace detail

/// Mean of w over the nodes of reg.
template <typename Scalar>
Scalar region_average(const BasicScalarField<Scalar>& w, const Region& reg) {
  const auto nodes = detail::nonempty_region(w.grid(), reg);
  Scalar s = 0;
  for (Index f : nodes) s += w[f];
  return s / static_cast<Scalar>(nodes.size());
}

/// Entrywise mean of a tensor field over reg, as a symmetric n x n matrix.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> region_average(const BasicSymTensorField<Scalar>& w,
                                                                     const Region& reg) {
  const auto nodes = detail::nonempty_region(w.grid(), reg);
  const int n = w.dim();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> s = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(w.components());
  for (Index f : nodes) s += w.values().row(f).transpose();
  s /= static_cast<Scalar>(nodes.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = s[sym_index(n, i, j)];
  return m;
}

namespace detail {
template <typename Magnitude>
double lp_sum(const Grid& g, const Region& reg, double p, Magnitude&& mag) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const auto nodes = nonempty_region(g, reg);
  if (std::isinf(p)) {
    double m = 0.0;
    for (Index f : nodes) m = std::max(m, static_cast<double>(mag(f)));
    return m;
  }
  double s = 0.0;
  for (Index f : nodes) s += std::pow(static_cast<double>(mag(f)), p);
  return std::pow(s * g.cell_measure(), 1.0 / p);
}
}  // namespace detail

/// Riemann-sum L^p norm over reg; p = infinity gives the max.
template <typename Scalar>
double lp_norm(const BasicScalarField<Scalar>& w, const Region& reg, double p) {
  return detail::lp_sum(w.grid(), reg, p, [&](Index f) { return std::abs(w[f]); });
}

/// Tensor fields use the pointwise Frobenius magnitude.
template <typename Scalar>
double lp_norm(const BasicSymTensorField<Scalar>& w, const Region& reg, double p) {
  return detail::lp_sum(w.grid(), reg, p, [&](Index f) { return std::sqrt(w.frobenius2(f)); });
}

/// p-th power integral  sum |w|^p * cell  over reg (no root).
template <typename Field>
double lp_integral(const Field& w, const Region& reg, double p) {
  return std::pow(lp_norm(w, reg, p), p);
}

/// Result of mollification: values are meaningful only where `valid` is set
/// (kernel support inside the box); elsewhere they are zero.
template <typename Scalar>
struct Mollified {
  BasicScalarField<Scalar> field;
  Eigen::Array<bool, Eigen::Dynamic, 1> valid;
};

/// Convolution with the radial bump exp(-1/(1-s^2)), s = |y|/eps, supported in
/// B_eps and renormalised so the discrete weights sum to one.
template <typename Scalar>
Mollified<Scalar> mollify(const BasicScalarField<Scalar>& w, double eps) {
  const Grid& g = w.grid();
  const Domain& d = g.space();
  const double h = d.spacing();
  if (eps < 2.0 * h * (1.0 - 1e-12)) throw std::invalid_argument("mollify: eps < 2h leaves the kernel unresolved");
  const int n = d.dim();
  const double q = eps / h;
  const auto reach = static_cast<Index>(std::ceil(q));

  std::vector<Index> offsets;
  std::vector<Scalar> weights;
  Scalar total = 0;
  Index max_reach = 0;
  MultiIndex o{0, 0, 0};
  for (o[0] = -reach; o[0] <= reach; ++o[0]) {
    for (o[1] = (n > 1 ? -reach : 0); o[1] <= (n > 1 ? reach : 0); ++o[1]) {
      for (o[2] = (n > 2 ? -reach : 0); o[2] <= (n > 2 ? reach : 0); ++o[2]) {
        double s2 = 0.0;
        for (int a = 0; a < n; ++a) s2 += static_cast<double>(o[a] * o[a]);
        if (!detail::inside_ball_units(s2, q)) continue;
        const double s = s2 / (q * q);
        const auto wgt = static_cast<Scalar>(std::exp(-1.0 / (1.0 - s)));
        Index flat = 0;
        for (int a = 0; a < n; ++a) {
          flat += o[a] * d.stride(a);
          max_reach = std::max(max_reach, o[a] < 0 ? -o[a] : o[a]);
        }
        offsets.push_back(flat);
        weights.push_back(wgt);
        total += wgt;
      }
    }
  }
  for (auto& wgt : weights) wgt /= total;

  typename BasicScalarField<Scalar>::Vector out = BasicScalarField<Scalar>::Vector::Zero(w.size());
  Eigen::Array<bool, Eigen::Dynamic, 1> valid(w.size());
  for (Index f = 0; f < w.size(); ++f) {
    valid[f] = is_interior(g, f, max_reach);
    if (!valid[f]) continue;
    Scalar acc = 0;
    for (std::size_t k = 0; k < offsets.size(); ++k) acc += weights[k] * w[f + offsets[k]];
    out[f] = acc;
  }
  return {BasicScalarField<Scalar>(g, std::move(out)), std::move(valid)};
}

}  // namespace czlab
