#pragma once

#include "czlab/stencils.hpp"
#include "czlab/rng.hpp"

namespace testing {

inline czlab::ScalarField random_field(const czlab::Grid& g, std::uint64_t seed, double lo = -10.0, double hi = 10.0) {
  czlab::Rng rng(seed);
  Eigen::VectorXd v(g.node_count());
  for (auto& x : v) x = rng.uniform(lo, hi);
  return czlab::ScalarField(g, std::move(v));
}

inline double max_abs_interior(const czlab::ScalarField& a, const czlab::ScalarField& b, czlab::Index margin = 1) {
  double e = 0.0;
  for (czlab::Index f = 0; f < a.size(); ++f)
    if (czlab::is_interior(a.grid(), f, margin)) e = std::max(e, std::abs(a[f] - b[f]));
  return e;
}

}  // namespace testing
