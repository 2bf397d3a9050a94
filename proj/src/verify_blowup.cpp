#include <cmath>
#include <stdexcept>

#include "czlab/integrals.hpp"
#include "czlab/stencils.hpp"
#include "czlab/verify.hpp"

namespace czlab {

namespace {

// osc[k][i] over the radii admissible at `point`; `extra` adds a second field
// per k (the time derivatives in parabolic mode).
ThetaProfile build_profile(const std::vector<SymTensorField>& hessians, const std::vector<ScalarField>* extra, Index point,
                           const RadiusSet& rs, double delta) {
  if (hessians.empty()) throw std::invalid_argument("theta_profile: empty field list");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("theta_profile: need 0 < delta < 1");
  const Grid& g = hessians.front().grid();
  for (const auto& H : hessians)
    if (!(H.grid() == g)) throw std::invalid_argument("theta_profile: fields must share a grid");
  if (extra) {
    if (extra->size() != hessians.size()) throw std::invalid_argument("theta_profile: one time derivative per Hessian");
    for (const auto& w : *extra)
      if (!(w.grid() == g)) throw std::invalid_argument("theta_profile: fields must share a grid");
  }

  ThetaProfile tp;
  tp.delta = delta;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (admissible(g, point, rs[i])) {
      keep.push_back(i);
      tp.radii.push_back(rs[i]);
    }
  if (keep.empty()) throw std::domain_error("theta_profile: no admissible radius at the point");

  for (std::size_t k = 0; k < hessians.size(); ++k) {
    const auto prof = oscillation_profile(hessians[k], point, rs);
    std::vector<double> row;
    for (std::size_t i : keep) row.push_back(prof.values[i]);
    if (extra) {
      const auto pt = oscillation_profile((*extra)[k], point, rs);
      for (std::size_t j = 0; j < keep.size(); ++j) row[j] += pt.values[keep[j]];
    }
    tp.osc.push_back(std::move(row));
  }

  const Index nr = static_cast<Index>(tp.radii.size());
  const Index nk = static_cast<Index>(tp.osc.size());
  tp.theta.assign(nr, 0.0);
  tp.attaining.assign(nr, {0, 0});
  // suffix maximum; ties keep the smaller k, then the smaller radius
  for (Index i = nr - 1; i >= 0; --i) {
    double best = -1.0;
    std::pair<Index, Index> arg{0, i};
    for (Index k = 0; k < nk; ++k)
      if (tp.osc[k][i] > best) {
        best = tp.osc[k][i];
        arg = {k, i};
      }
    if (i + 1 < nr && tp.theta[i + 1] > best) {
      best = tp.theta[i + 1];
      arg = tp.attaining[i + 1];
    }
    tp.theta[i] = best;
    tp.attaining[i] = arg;
  }
  tp.degenerate = tp.theta.front() == 0.0;
  if (tp.degenerate) return tp;

  for (Index e = nr - 1; e >= 0; --e) {
    const double target = (1.0 - delta) * tp.theta[e];
    bool found = false;
    for (Index j = e; j < nr && !found; ++j)
      for (Index k = 0; k < nk && !found; ++k)
        if (tp.osc[k][j] > 0.0 && tp.osc[k][j] >= target) {
          tp.selections.push_back({e, j, k, tp.osc[k][j], tp.osc[k][j] / (1.0 - delta)});
          found = true;
        }
  }
  return tp;
}

}  // namespace

bool ThetaProfile::monotone() const {
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (theta[i] > theta[i - 1]) return false;
  return true;
}

bool ThetaProfile::selection_holds() const {
  for (const auto& s : selections)
    for (const auto& row : osc)
      for (std::size_t j = static_cast<std::size_t>(s.r_index); j < row.size(); ++j)
        if ((1.0 - delta) * row[j] > s.oscillation) return false;
  return true;
}

ThetaProfile theta_profile(const std::vector<SymTensorField>& hessians, Index point, const RadiusSet& rs, double delta) {
  if (!hessians.empty() && hessians.front().grid().has_time())
    throw std::invalid_argument("theta_profile: use theta_profile_parabolic on space-time fields");
  return build_profile(hessians, nullptr, point, rs, delta);
}

ThetaProfile theta_profile_parabolic(const std::vector<SymTensorField>& hessians, const std::vector<ScalarField>& dts,
                                     Index point, const RadiusSet& rs, double delta) {
  if (!hessians.empty() && !hessians.front().grid().has_time())
    throw std::invalid_argument("theta_profile_parabolic: fields have no time axis");
  return build_profile(hessians, &dts, point, rs, delta);
}

namespace {

// Multilinear interpolation of w at (x, t); coordinates within 1e-9 of a node
// snap to it, so aligned zoom windows reproduce node values exactly.
double interpolate(const ScalarField& w, const Point& x, double t) {
  const Grid& g = w.grid();
  const Domain& d = g.space();
  const int n = d.dim();
  std::array<Index, kMaxDim + 1> base{};
  std::array<double, kMaxDim + 1> frac{};
  std::array<Index, kMaxDim + 1> stride{};
  std::array<Index, kMaxDim + 1> count{};
  int axes = n;
  for (int a = 0; a < n; ++a) {
    const double u = detail::snap_units((x[a] - d.lo(a)) / d.spacing());
    base[a] = static_cast<Index>(std::floor(u));
    frac[a] = u - static_cast<double>(base[a]);
    stride[a] = d.stride(a);
    count[a] = d.points_per_axis();
  }
  if (g.has_time()) {
    const TimeAxis& ta = g.time();
    const double u = detail::snap_units((t - ta.t_lo) / ta.tau);
    base[n] = static_cast<Index>(std::floor(u));
    frac[n] = u - static_cast<double>(base[n]);
    stride[n] = g.slice_size();
    count[n] = ta.nt;
    axes = n + 1;
  }
  Index origin = 0;
  for (int a = 0; a < axes; ++a) {
    if (base[a] < 0 || base[a] > count[a] - 1 || (base[a] == count[a] - 1 && frac[a] > 0.0))
      throw std::invalid_argument("blowup_rescale: zoom window leaves the box");
    origin += base[a] * stride[a];
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << axes); ++corner) {
    double wt = 1.0;
    Index f = origin;
    for (int a = 0; a < axes && wt != 0.0; ++a) {
      if (corner & (1 << a)) {
        wt *= frac[a];
        f += stride[a];
      } else {
        wt *= 1.0 - frac[a];
      }
    }
    if (wt != 0.0) acc += wt * w[f];
  }
  return acc;
}

template <typename Field>
double mean_over(const Field& w, const std::vector<Index>& nodes) {
  double s = 0.0;
  for (Index f : nodes) s += w[f];
  return s / static_cast<double>(nodes.size());
}

}  // namespace

BlowupState blowup_rescale(const SolutionPair& pair, double r, double theta, BlowupMode mode) {
  const Grid& g = pair.u.grid();
  const bool par = mode == BlowupMode::Parabolic;
  if (par != g.has_time())
    throw std::invalid_argument(par ? "blowup_rescale: parabolic mode needs a space-time pair"
                                    : "blowup_rescale: elliptic mode needs a spatial pair");
  if (!(theta > 0.0)) throw std::invalid_argument("blowup_rescale: Theta must be positive");
  const Domain& d = g.space();
  const double h = d.spacing();
  if (r < 8.0 * h * (1.0 - 1e-12)) throw std::invalid_argument("blowup_rescale: radius resolves fewer than 16 nodes across");
  origin_node(g);

  const int n = d.dim();
  const auto K = static_cast<Index>(std::ceil(2.0 * r / h - 1e-9)) + 2;
  const Domain zd = Domain::cube(n, static_cast<double>(K) * h / r, 2 * K);
  std::optional<Grid> zoom;
  if (par) {
    const double tau = g.time().tau;
    const auto Kt = static_cast<Index>(std::ceil(2.0 * r * r / tau - 1e-9)) + 2;
    zoom.emplace(SpaceTimeDomain(zd, -static_cast<double>(Kt) * tau / (r * r), tau / (r * r), 2 * Kt + 1));
  } else {
    zoom.emplace(zd);
  }
  const Grid& zg = *zoom;

  auto resample = [&](const ScalarField& w) {
    return ScalarField::sample(zg, [&](const Point& y, double s) {
      Point x{0.0, 0.0, 0.0};
      for (int a = 0; a < n; ++a) x[a] = r * y[a];
      return interpolate(w, x, r * r * s);
    });
  };
  const ScalarField U = resample(pair.u);
  const ScalarField F = resample(pair.f);

  const Region unit = par ? Region::cube(1.0) : Region::ball(1.0);
  const Region two = par ? Region::cube(2.0) : Region::ball(2.0);
  const auto nodes = region_nodes(zg, unit);

  BlowupState s{r, theta, U, F, 0.0, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  const SymTensorField HU = hessian(U);
  s.A = region_average(HU, unit);
  const auto gradU = gradient(U);
  Eigen::VectorXd xbar = Eigen::VectorXd::Zero(n);
  for (Index f : nodes) {
    const Point y = zd.position(zg.spatial_of(f));
    for (int a = 0; a < n; ++a) xbar[a] += y[a];
  }
  xbar /= static_cast<double>(nodes.size());
  for (int a = 0; a < n; ++a) s.b[a] = mean_over(gradU[a], nodes);
  s.b -= s.A * xbar;
  if (par) s.d = mean_over(dt(U), nodes);

  auto poly_no_c = [&](const Point& y, double t) {
    Eigen::VectorXd x(n);
    for (int a = 0; a < n; ++a) x[a] = y[a];
    return s.b.dot(x) + 0.5 * x.dot(s.A * x) + s.d * t;
  };
  const ScalarField P0 = ScalarField::sample(zg, poly_no_c);
  s.c = mean_over(U, nodes) - mean_over(P0, nodes);

  const double scale = 1.0 / (r * r * std::sqrt(theta));
  s.v = scale * (U - (P0 + s.c));
  const double fbar = mean_over(F, nodes);
  s.g = (1.0 / std::sqrt(theta)) * (F + (-fbar));

  s.mean_v = std::abs(mean_over(s.v, nodes));
  const auto gv = gradient(s.v);
  for (const auto& ga : gv) s.mean_grad = std::max(s.mean_grad, std::abs(mean_over(ga, nodes)));
  const SymTensorField Hv = hessian(s.v);
  const Eigen::MatrixXd Av = region_average(Hv, unit);
  s.mean_hess = Av.cwiseAbs().maxCoeff();
  s.mean_g = std::abs(mean_over(s.g, nodes));

  const ScalarField Lv = laplacian(s.v);
  double energy = 0.0, defect = 0.0;
  std::optional<ScalarField> dtv;
  if (par) {
    dtv = dt(s.v);
    s.mean_dt = std::abs(mean_over(*dtv, nodes));
  }
  for (Index f : nodes) {
    energy += Hv.frobenius2(f);
    double res = Lv[f] - s.g[f];
    if (par) {
      energy += (*dtv)[f] * (*dtv)[f];
      res = (*dtv)[f] - Lv[f] - s.g[f];
    }
    defect = std::max(defect, std::abs(res));
  }
  s.hess_energy = energy / static_cast<double>(nodes.size());
  s.equation_defect = defect;
  s.v_l2_2 = lp_norm(s.v, two, 2.0);
  s.g_l2_2 = lp_norm(s.g, two, 2.0);
  return s;
}

}  // namespace czlab
