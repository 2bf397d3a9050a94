#include <cmath>
#include <sstream>
#include <stdexcept>

#include "czlab/integrals.hpp"
#include "czlab/stencils.hpp"
#include "czlab/verify.hpp"

namespace czlab {

EstimateReport pointwise_parabolic_report(const SolutionPair& pair, std::span<const Index> points, const RadiusSet& rs,
                                          MaximalBackend backend) {
  const Grid& g = pair.u.grid();
  if (!g.has_time()) throw std::invalid_argument("pointwise_parabolic_report: space-time pair expected");
  const MaximalField mt = sharp_maximal_2_parabolic(dt(pair.u), points, rs, backend);
  const MaximalField mh = sharp_maximal_2_parabolic(hessian(pair.u), points, rs, backend);
  const MaximalField mf = sharp_maximal_2_parabolic(pair.f, points, rs, backend);
  require_valid(mt, "pointwise_parabolic_report");
  require_valid(mh, "pointwise_parabolic_report");
  require_valid(mf, "pointwise_parabolic_report");
  const double nu = std::pow(lp_norm(pair.u, Region::cube(1.0), 2.0), 2);
  const double nf = std::pow(lp_norm(pair.f, Region::cube(1.0), 2.0), 2);

  Index best = 0;
  double best_ratio = -1.0;
  for (Index i = 0; i < mh.values.size(); ++i) {
    const double rhs = nu + nf + mf.values[i];
    const double q = rhs > 0.0 ? (mt.values[i] + mh.values[i]) / rhs : 0.0;
    if (q > best_ratio) {
      best_ratio = q;
      best = i;
    }
  }
  EstimateReport r = make_report("pointwise_parabolic", g, 2.0, mt.values[best] + mh.values[best],
                                 {{"u_l2_sq", nu}, {"f_l2_sq", nf}, {"sharp_f", mf.values[best]}});
  r.points = static_cast<Index>(points.size());
  r.extras.push_back({"sharp_dt", mt.values[best]});
  r.extras.push_back({"sharp_hessian", mh.values[best]});
  return r;
}

EstimateReport cz_parabolic_report(const SolutionPair& pair, double p) {
  const Grid& g = pair.u.grid();
  if (!g.has_time()) throw std::invalid_argument("cz_parabolic_report: space-time pair expected");
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("cz_parabolic_report: need 1 < p < inf");
  const Region half = Region::cube(0.5);
  const Region one = Region::cube(1.0);
  const double lh = lp_integral(hessian(pair.u), half, p);
  const double lt = lp_integral(dt(pair.u), half, p);
  EstimateReport r = make_report("cz_parabolic", g, p, lh + lt,
                                 {{"u_lp", lp_integral(pair.u, one, p)}, {"f_lp", lp_integral(pair.f, one, p)}});
  r.extras.push_back({"hessian_lp", lh});
  r.extras.push_back({"dt_lp", lt});
  return r;
}

ScalarField time_reverse(const ScalarField& w) {
  const Grid& g = w.grid();
  if (!g.has_time()) throw std::invalid_argument("time_reverse: field has no time axis");
  const Index nt = g.slices();
  const Index ss = g.slice_size();
  Eigen::VectorXd out(w.size());
  for (Index k = 0; k < nt; ++k) out.segment(k * ss, ss) = w.values().segment((nt - 1 - k) * ss, ss);
  return ScalarField(g, std::move(out));
}

EstimateReport parabolic_duality_check(const SolutionPair& uf, const SolutionPair& vg) {
  const Grid& g = uf.u.grid();
  if (!g.has_time() || !(vg.u.grid() == g)) throw std::invalid_argument("parabolic_duality_check: pairs must share a space-time grid");
  const Index ss = g.slice_size();
  for (Index s = 0; s < ss; ++s)
    if (std::abs(uf.u[s]) > 1e-12 || std::abs(vg.u[s]) > 1e-12)
      throw std::invalid_argument("parabolic_duality_check: nonzero initial data");
  for (Index f = 0; f < g.node_count(); ++f)
    if (!is_interior(g, f, 2) && std::abs(uf.u[f]) > 1e-12)
      throw std::invalid_argument("parabolic_duality_check: u does not vanish near the box faces");

  const ScalarField ut = dt(uf.u);
  const ScalarField g_rev = time_reverse(vg.f);
  const ScalarField vt_rev = dt(time_reverse(vg.u));
  const Index nt = g.slices();
  double a = 0.0, b = 0.0;
  for (Index k = 0; k < nt; ++k) {
    const double wt = (k == 0 || k == nt - 1) ? 0.5 : 1.0;
    double sa = 0.0, sb = 0.0;
    for (Index s = 0; s < ss; ++s) {
      const Index f = g.join(k, s);
      sa += ut[f] * g_rev[f];
      sb += uf.f[f] * vt_rev[f];
    }
    a += wt * sa;
    b += wt * sb;
  }
  const double cell = g.cell_measure();
  a *= cell;
  b *= -cell;
  EstimateReport r = make_report("duality_parabolic", g, 2.0, std::abs(a - b), {{"abs_dt_u_g", std::abs(a)}, {"abs_f_dt_v", std::abs(b)}});
  r.extras.push_back({"dt_u_g", a});
  r.extras.push_back({"minus_f_dt_v", b});
  return r;
}

double Polynomial::operator()(const Point& x, double t) const {
  double s = 0.0;
  for (const auto& m : terms) {
    double v = m.coef;
    for (int a = 0; a < n; ++a) v *= std::pow(x[a], m.alpha[a]);
    s += v * std::pow(t, m.beta);
  }
  return s;
}

int Polynomial::parabolic_degree() const {
  int deg = 0;
  for (const auto& m : terms) {
    if (m.coef == 0.0) continue;
    int d = 2 * m.beta;
    for (int a = 0; a < n; ++a) d += m.alpha[a];
    deg = std::max(deg, d);
  }
  return deg;
}

std::string Polynomial::to_string() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& m : terms) {
    if (!first) os << " + ";
    first = false;
    os << m.coef;
    for (int a = 0; a < n; ++a)
      if (m.alpha[a] > 0) os << "*x" << (a + 1) << (m.alpha[a] > 1 ? "^" + std::to_string(m.alpha[a]) : "");
    if (m.beta > 0) os << "*t" << (m.beta > 1 ? "^" + std::to_string(m.beta) : "");
  }
  return first ? "0" : os.str();
}

EstimateReport poly_growth_check(const Polynomial& p, std::span<const double> radii, Index cells) {
  if (radii.size() < 3) throw std::invalid_argument("poly_growth_check: need at least 3 radii");
  if (cells < 4) throw std::invalid_argument("poly_growth_check: need at least 4 cells per unit radius");
  const int N = p.parabolic_degree();
  std::vector<double> osc;
  std::optional<Grid> last;
  for (double R : radii) {
    if (!(R > 0.0)) throw std::invalid_argument("poly_growth_check: radii must be positive");
    const Domain space = Domain::cube(p.n, R, 2 * cells);
    const Grid g = SpaceTimeDomain::centered(space, 0.5 * R * R);
    const ScalarField w = ScalarField::sample(g, [&](const Point& x, double t) { return p(x, t); });
    osc.push_back(local_oscillation2(w, Region::cube(R)).direct);
    last.emplace(g);
  }

  std::size_t zeros = 0;
  for (double o : osc) zeros += o == 0.0;
  if (zeros == osc.size()) {
    EstimateReport r = make_report("poly_growth", *last, 2.0, 0.0, {{"two_N", 2.0 * N}});
    r.note = p.to_string();
    return r;
  }
  if (zeros > 0) throw std::domain_error("poly_growth_check: oscillation vanishes on part of the ladder");

  // least-squares line through (log R, log osc)
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double k = static_cast<double>(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double x = std::log(radii[i]), y = std::log(osc[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double sigma = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double c = std::exp((sy - sigma * sx) / k);
  EstimateReport r = make_report("poly_growth", *last, 2.0, sigma, {{"two_N", 2.0 * N}});
  r.extras.push_back({"c", c});
  for (std::size_t i = 0; i < radii.size(); ++i) {
    char name[48];
    std::snprintf(name, sizeof name, "osc_R=%.6g", radii[i]);
    r.extras.push_back({name, osc[i]});
  }
  r.note = p.to_string();
  return r;
}

std::vector<Polynomial> monomials_up_to(int n, int max_degree) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("monomials_up_to: dimension must be 1, 2 or 3");
  std::vector<Polynomial> out;
  for (int beta = 0; 2 * beta <= max_degree; ++beta) {
    const int room = max_degree - 2 * beta;
    for (int a0 = 0; a0 <= room; ++a0)
      for (int a1 = 0; a1 <= (n > 1 ? room - a0 : 0); ++a1)
        for (int a2 = 0; a2 <= (n > 2 ? room - a0 - a1 : 0); ++a2) {
          Polynomial p;
          p.n = n;
          p.terms.push_back({1.0, {a0, a1, a2}, beta});
          out.push_back(std::move(p));
        }
  }
  return out;
}

}  // namespace czlab
