#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

#include "czlab/grid.hpp"

namespace czlab {

/// Number of stored entries of a symmetric n x n tensor (upper triangle).
constexpr int sym_components(int n) { return n * (n + 1) / 2; }

/// Upper-triangle, row-major position of entry (i, j).
constexpr int sym_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

/// Frobenius weight of a stored component: off-diagonal entries appear twice.
inline double sym_weight(int n, int c) {
  for (int i = 0; i < n; ++i)
    if (c == sym_index(n, i, i)) return 1.0;
  return 2.0;
}

namespace detail {
template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& v, const char* what) {
  if (!v.derived().allFinite()) throw std::domain_error(std::string(what) + ": non-finite value");
}
}  // namespace detail

/// One real per grid node; immutable once built.
template <typename Scalar>
class BasicScalarField {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BasicScalarField(Grid grid) : grid_(std::move(grid)), values_(Vector::Zero(grid_.node_count())) {}

  BasicScalarField(Grid grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.node_count()) throw std::invalid_argument("ScalarField: value count != node count");
    detail::require_finite(values_, "ScalarField");
  }

  /// Samples fn(x) on a spatial grid, or fn(x, t) on a space-time grid.
  template <typename Fn>
  static BasicScalarField sample(const Grid& grid, Fn&& fn) {
    Vector v(grid.node_count());
    const Domain& d = grid.space();
    for (Index f = 0; f < grid.node_count(); ++f) {
      const Point x = d.position(grid.spatial_of(f));
      if constexpr (std::is_invocable_v<Fn, const Point&, double>) {
        v[f] = static_cast<Scalar>(fn(x, grid.time_of(f)));
      } else {
        v[f] = static_cast<Scalar>(fn(x));
      }
    }
    return BasicScalarField(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Index size() const { return values_.size(); }
  Scalar operator[](Index f) const { return values_[f]; }

  template <typename Fn>
  BasicScalarField map(Fn&& fn) const {
    return BasicScalarField(grid_, values_.unaryExpr(std::forward<Fn>(fn)).eval());
  }

  friend BasicScalarField operator+(const BasicScalarField& a, const BasicScalarField& b) {
    a.require_same(b);
    return BasicScalarField(a.grid_, (a.values_ + b.values_).eval());
  }
  friend BasicScalarField operator-(const BasicScalarField& a, const BasicScalarField& b) {
    a.require_same(b);
    return BasicScalarField(a.grid_, (a.values_ - b.values_).eval());
  }
  friend BasicScalarField operator*(Scalar s, const BasicScalarField& a) {
    return BasicScalarField(a.grid_, (s * a.values_).eval());
  }
  friend BasicScalarField operator+(const BasicScalarField& a, Scalar c) {
    return BasicScalarField(a.grid_, (a.values_.array() + c).matrix().eval());
  }

 private:
  void require_same(const BasicScalarField& b) const {
    if (!(grid_ == b.grid_)) throw std::invalid_argument("ScalarField: grids differ");
  }

  Grid grid_;
  Vector values_;
};

/// Symmetric n x n tensor per node, stored as the n(n+1)/2 upper-triangle
/// entries; column c holds component c for every node.
template <typename Scalar>
class BasicSymTensorField {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Column = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicSymTensorField(Grid grid, Matrix values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.rows() != grid_.node_count() || values_.cols() != sym_components(grid_.dim()))
      throw std::invalid_argument("SymTensorField: shape mismatch");
    detail::require_finite(values_, "SymTensorField");
  }

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  int components() const { return static_cast<int>(values_.cols()); }
  const Matrix& values() const { return values_; }
  Scalar operator()(Index f, int i, int j) const { return values_(f, sym_index(dim(), i, j)); }
  BasicScalarField<Scalar> component(int i, int j) const {
    return BasicScalarField<Scalar>(grid_, Column(values_.col(sym_index(dim(), i, j))));
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> at(Index f) const {
    const int n = dim();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = (*this)(f, i, j);
    return m;
  }

  /// |T|_F^2 at node f.
  Scalar frobenius2(Index f) const {
    Scalar s = 0;
    for (int c = 0; c < components(); ++c) s += static_cast<Scalar>(sym_weight(dim(), c)) * values_(f, c) * values_(f, c);
    return s;
  }

  BasicScalarField<Scalar> frobenius() const {
    typename BasicScalarField<Scalar>::Vector v(values_.rows());
    for (Index f = 0; f < values_.rows(); ++f) v[f] = std::sqrt(frobenius2(f));
    return BasicScalarField<Scalar>(grid_, std::move(v));
  }

  BasicScalarField<Scalar> trace() const {
    typename BasicScalarField<Scalar>::Vector v = Column::Zero(values_.rows());
    for (int i = 0; i < dim(); ++i) v += values_.col(sym_index(dim(), i, i));
    return BasicScalarField<Scalar>(grid_, std::move(v));
  }

 private:
  Grid grid_;
  Matrix values_;
};

using ScalarField = BasicScalarField<double>;
using SymTensorField = BasicSymTensorField<double>;

}  // namespace czlab
