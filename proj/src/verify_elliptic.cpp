#include <cmath>
#include <stdexcept>

#include "czlab/integrals.hpp"
#include "czlab/stencils.hpp"
#include "czlab/verify.hpp"

namespace czlab {

namespace {

// Largest |w| on nodes within `ring` nodes of a face.
double face_ring_max(const ScalarField& w, Index ring) {
  double m = 0.0;
  for (Index f = 0; f < w.size(); ++f)
    if (!is_interior(w.grid(), f, ring)) m = std::max(m, std::abs(w[f]));
  return m;
}

void require_compact(const ScalarField& w, const char* what) {
  if (face_ring_max(w, 2) > 1e-12) throw std::invalid_argument(std::string(what) + ": field does not vanish near the box faces");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

EstimateReport p2_identity_check(const ScalarField& v) {
  const Grid& g = v.grid();
  if (g.has_time()) throw std::invalid_argument("p2_identity_check: spatial field expected");
  require_compact(v, "p2_identity_check");
  const SymTensorField H = hessian(v);
  const ScalarField L = laplacian(v);
  double hh = 0.0, ll = 0.0;
  for (Index f = 0; f < v.size(); ++f) {
    hh += H.frobenius2(f);
    ll += L[f] * L[f];
  }
  const double cell = g.cell_measure();
  return make_report("p2_identity", g, 2.0, hh * cell, {{"laplacian_l2_sq", ll * cell}});
}

std::vector<EstimateReport> fefferman_stein_report(const ScalarField& w, std::span<const double> ps, const RadiusSet& rs,
                                                   const FsOptions& opt) {
  const Grid& g = w.grid();
  const Region reg = Region::ball(opt.r);
  const auto pts = region_nodes(g, reg);
  const MaximalField m = sharp_maximal_2(w, pts, rs, opt.backend);
  require_valid(m, "fefferman_stein_report");

  // M#₂w^{1/2} as a field supported on the sampled nodes
  Eigen::VectorXd root = Eigen::VectorXd::Zero(g.node_count());
  for (std::size_t i = 0; i < pts.size(); ++i) root[pts[i]] = std::sqrt(m.values[static_cast<Index>(i)]);
  const ScalarField root_field(g, std::move(root));
  const double l1 = lp_norm(w, reg, 1.0);

  std::vector<EstimateReport> out;
  for (double p : ps) {
    if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("fefferman_stein_report: need 1 < p < inf");
    const double lp = lp_norm(w, reg, p);
    const double sharp = lp_norm(root_field, reg, p);
    EstimateReport r = make_report("fefferman_stein", g, p, lp, {{"sharp_root_lp", sharp}, {"l1", l1}});
    r.points = static_cast<Index>(pts.size());
    r.extras.push_back({"upper_ratio", lp > 0.0 ? (sharp + l1) / lp : 0.0});
    out.push_back(std::move(r));
  }
  return out;
}

EstimateReport pointwise_estimate_report(const SolutionPair& pair, std::span<const Index> points, const RadiusSet& rs,
                                         MaximalBackend backend) {
  const Grid& g = pair.u.grid();
  if (g.has_time()) throw std::invalid_argument("pointwise_estimate_report: spatial pair expected");
  const MaximalField mh = sharp_maximal_2(hessian(pair.u), points, rs, backend);
  const MaximalField mf = sharp_maximal_2(pair.f, points, rs, backend);
  require_valid(mh, "pointwise_estimate_report");
  require_valid(mf, "pointwise_estimate_report");
  const double nu = std::pow(lp_norm(pair.u, Region::ball(1.0), 2.0), 2);
  const double nf = std::pow(lp_norm(pair.f, Region::ball(1.0), 2.0), 2);

  Index best = 0;
  double best_ratio = -1.0;
  for (Index i = 0; i < mh.values.size(); ++i) {
    const double rhs = nu + nf + mf.values[i];
    const double q = rhs > 0.0 ? mh.values[i] / rhs : 0.0;
    if (q > best_ratio) {
      best_ratio = q;
      best = i;
    }
  }
  EstimateReport r = make_report("pointwise_elliptic", g, 2.0, mh.values[best],
                                 {{"u_l2_sq", nu}, {"f_l2_sq", nf}, {"sharp_f", mf.values[best]}});
  r.points = static_cast<Index>(points.size());
  r.extras.push_back({"argmax_radius", mh.radius_argmax[best]});
  return r;
}

EstimateReport cz_elliptic_report(const SolutionPair& pair, double p) {
  const Grid& g = pair.u.grid();
  if (g.has_time()) throw std::invalid_argument("cz_elliptic_report: spatial pair expected");
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("cz_elliptic_report: need 1 < p < inf");
  const double lhs = lp_integral(hessian(pair.u), Region::ball(0.5), p);
  return make_report("cz_elliptic", g, p, lhs,
                     {{"u_lp", lp_integral(pair.u, Region::ball(1.0), p)}, {"f_lp", lp_integral(pair.f, Region::ball(1.0), p)}});
}

std::vector<EstimateReport> sharpness_demo_pinf(std::span<const Index> cells) {
  std::vector<EstimateReport> out;
  int level = 0;
  for (Index c : cells) {
    const Grid g = Domain::cube(2, 1.0, c);
    auto u = ScalarField::sample(g, [](const Point& x) {
      const double r2 = x[0] * x[0] + x[1] * x[1];
      return r2 == 0.0 ? 0.0 : 0.5 * x[0] * x[1] * std::log(r2);
    });
    auto f = ScalarField::sample(g, [](const Point& x) {
      const double r2 = x[0] * x[0] + x[1] * x[1];
      return r2 == 0.0 ? 0.0 : 4.0 * x[0] * x[1] / r2;
    });
    const double inf = std::numeric_limits<double>::infinity();
    const SymTensorField H = hessian(u);
    EstimateReport r = make_report("sharpness_pinf", g, inf, lp_norm(H, Region::ball(0.5), inf),
                                   {{"f_linf", lp_norm(f, Region::ball(1.0), inf)}});
    const SolutionPair pair{u, f, Provenance::Manufactured, discrete_residual(u, f), "x1*x2*log|x|"};
    r.extras.push_back({"p4_ratio", *cz_elliptic_report(pair, 4.0).ratio});
    r.extras.push_back({"f_max", f.values().cwiseAbs().maxCoeff()});
    r.level = level++;
    out.push_back(std::move(r));
  }
  return out;
}

EstimateReport duality_identity_check(const SolutionPair& uf, const SolutionPair& vg) {
  const Grid& g = uf.u.grid();
  if (g.has_time() || !(vg.u.grid() == g)) throw std::invalid_argument("duality_identity_check: pairs must share a spatial grid");
  require_compact(uf.u, "duality_identity_check");
  const SymTensorField Hu = hessian(uf.u);
  const SymTensorField Hv = hessian(vg.u);
  const double cell = g.cell_measure();
  const int n = g.dim();
  double defect = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const int c = sym_index(n, i, j);
      double a = 0.0, b = 0.0;
      for (Index f = 0; f < g.node_count(); ++f) {
        a += Hu.values()(f, c) * vg.f[f];
        b += uf.f[f] * Hv.values()(f, c);
      }
      defect = std::max(defect, std::abs(a - b) * cell);
    }
  double hu2 = 0.0, hv2 = 0.0, f2 = 0.0, g2 = 0.0;
  for (Index f = 0; f < g.node_count(); ++f) {
    hu2 += Hu.frobenius2(f);
    hv2 += Hv.frobenius2(f);
    f2 += uf.f[f] * uf.f[f];
    g2 += vg.f[f] * vg.f[f];
  }
  const double scale = (std::sqrt(hu2 * g2) + std::sqrt(f2 * hv2)) * cell;
  return make_report("duality_elliptic", g, 2.0, defect, {{"cauchy_schwarz_scale", scale}});
}

namespace {

// Fourth-order second difference along one axis at node f (needs a two-node margin).
double d2_fourth(const ScalarField& u, Index f, Index stride, double h) {
  return (-u[f + 2 * stride] + 16.0 * u[f + stride] - 30.0 * u[f] + 16.0 * u[f - stride] - u[f - 2 * stride]) /
         (12.0 * h * h);
}

}  // namespace

double harmonicity_defect(const ScalarField& u, std::span<const Region> balls) {
  const Grid& g = u.grid();
  const Domain& d = g.space();
  double m = 0.0;
  for (const Region& b : balls)
    for (Index f : region_nodes(g, b)) {
      if (!is_interior(g, f, 2)) continue;
      double lap = 0.0;
      for (int a = 0; a < d.dim(); ++a) lap += d2_fourth(u, f, d.stride(a), d.spacing());
      m = std::max(m, std::abs(lap));
    }
  return m;
}

EstimateReport mean_value_check(const ScalarField& u, std::span<const Point> centers, std::span<const double> radii) {
  const Grid& g = u.grid();
  if (g.has_time()) throw std::invalid_argument("mean_value_check: spatial field expected");
  const Domain& d = g.space();
  std::vector<Region> balls;
  for (const Point& c : centers)
    for (double r : radii) balls.push_back(Region::ball(r, d.position(d.nearest(c))));
  const double hd = harmonicity_defect(u, balls);
  if (hd > 1e-8) throw std::domain_error("mean_value_check: field is not harmonic (|Δu| = " + fmt(hd) + ")");

  double worst = 0.0;
  for (const Region& b : balls) worst = std::max(worst, std::abs(u[d.nearest(b.center)] - region_average(u, b)));
  const double h2 = d.spacing() * d.spacing();
  EstimateReport r = make_report("mean_value", g, 2.0, worst, {{"h_sq", h2}});
  r.points = static_cast<Index>(balls.size());
  r.extras.push_back({"harmonicity_defect", hd});
  r.note = "centres snapped to nodes";
  return r;
}

EstimateReport growth_bound_check(const ScalarField& u, std::span<const double> radii) {
  const Grid& g = u.grid();
  if (g.has_time()) throw std::invalid_argument("growth_bound_check: spatial field expected");
  if (radii.empty()) throw std::invalid_argument("growth_bound_check: empty radius ladder");
  std::vector<Region> balls;
  for (double R : radii) balls.push_back(Region::ball(R));
  const double hd = harmonicity_defect(u, balls);
  if (hd > 1e-8) throw std::domain_error("growth_bound_check: field is not harmonic (|Δu| = " + fmt(hd) + ")");

  const SymTensorField H = hessian(u);
  const int n = g.dim();
  double cmax = 0.0, cmin = std::numeric_limits<double>::infinity();
  bool degenerate = true;
  std::vector<NamedValue> extras;
  for (double R : radii) {
    double lhs = 0.0;
    for (Index f : region_nodes(g, Region::ball(0.5 * R))) lhs = std::max(lhs, std::sqrt(H.frobenius2(f)));
    const double rhs = std::pow(R, -0.5 * n) * lp_norm(H, Region::ball(R), 2.0);
    if (rhs == 0.0 && lhs == 0.0) {
      extras.push_back({"C_R=" + fmt(R), 0.0});
      continue;
    }
    if (rhs == 0.0) throw std::domain_error("growth_bound_check: pointwise Hessian without L2 mass");
    degenerate = false;
    const double c = lhs / rhs;
    extras.push_back({"C_R=" + fmt(R), c});
    cmax = std::max(cmax, c);
    cmin = std::min(cmin, c);
  }
  EstimateReport r = degenerate ? make_report("growth_bound", g, 2.0, 0.0, {{"min_C", 0.0}})
                                : make_report("growth_bound", g, 2.0, cmax, {{"min_C", cmin}});
  r.extras = std::move(extras);
  r.extras.push_back({"harmonicity_defect", hd});
  return r;
}

}  // namespace czlab
