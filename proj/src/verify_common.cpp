#include <cmath>
#include <stdexcept>

#include "czlab/verify.hpp"

namespace czlab {

GridInfo GridInfo::of(const Grid& g) {
  GridInfo gi{g.dim(), g.space().points_per_axis(), g.space().spacing(), g.has_time(), 0.0, g.slices()};
  if (g.has_time()) gi.tau = g.time().tau;
  return gi;
}

double EstimateReport::extra(const std::string& name) const {
  for (const auto& e : extras)
    if (e.name == name) return e.value;
  throw std::out_of_range("report '" + label + "' has no extra '" + name + "'");
}

bool EstimateReport::has_extra(const std::string& name) const {
  for (const auto& e : extras)
    if (e.name == name) return true;
  return false;
}

EstimateReport make_report(std::string label, const Grid& g, double p, double lhs, std::vector<NamedValue> terms) {
  EstimateReport r;
  r.label = std::move(label);
  r.p = p;
  r.grid = GridInfo::of(g);
  r.lhs = lhs;
  r.rhs_terms = std::move(terms);
  for (const auto& t : r.rhs_terms) r.rhs += t.value;
  if (!std::isfinite(r.lhs) || !std::isfinite(r.rhs) || r.lhs < 0.0 || r.rhs < 0.0)
    throw std::domain_error(r.label + ": non-finite or negative estimate side");
  if (r.rhs > 0.0) {
    r.ratio = r.lhs / r.rhs;
  } else if (r.lhs == 0.0) {
    r.degenerate = true;
  } else {
    throw std::domain_error(r.label + ": positive left side with vanishing right side");
  }
  return r;
}

Index origin_node(const Grid& g) {
  const Domain& d = g.space();
  const Index s = d.nearest({0.0, 0.0, 0.0});
  const Point x = d.position(s);
  for (int a = 0; a < d.dim(); ++a)
    if (std::abs(x[a]) > 1e-12 * d.spacing()) throw std::invalid_argument("grid has no node at the origin");
  if (!g.has_time()) return s;
  const TimeAxis& ta = g.time();
  const auto k = static_cast<Index>(std::llround(-ta.t_lo / ta.tau));
  if (k < 0 || k >= ta.nt || std::abs(ta.at(k)) > 1e-9 * ta.tau) throw std::invalid_argument("grid has no slice at t = 0");
  return g.join(k, s);
}

std::vector<Index> sample_points(const Grid& g, double radius, int count) {
  const Domain& d = g.space();
  const int n = d.dim();
  std::vector<Index> out;
  auto inside = [&](Index f) {
    const Point x = d.position(g.spatial_of(f));
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
    if (r2 >= radius * radius) return false;
    if (!g.has_time()) return true;
    const double t = g.time_of(f);
    return t > -0.5 * radius * radius && t <= 0.5 * radius * radius;
  };
  auto push = [&](Index f) {
    if (!inside(f)) throw std::invalid_argument("sample_points: grid too coarse for the sampling region");
    out.push_back(f);
  };

  if (!g.has_time()) {
    const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
    if (k * k != count || k < 2) throw std::invalid_argument("sample_points: count must be a square >= 4");
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < (n > 1 ? k : 1); ++j) {
        Point x{0, 0, 0};
        x[0] = 0.6 * radius * (-1.0 + 2.0 * i / (k - 1));
        if (n > 1) x[1] = 0.6 * radius * (-1.0 + 2.0 * j / (k - 1));
        push(d.nearest(x));
      }
    return out;
  }
  // space-time: five spatial points times count/5 instants
  if (count % 5 != 0) throw std::invalid_argument("sample_points: space-time count must be a multiple of 5");
  const int nt = count / 5;
  const TimeAxis& ta = g.time();
  const double a = 0.4 * radius;
  const std::array<Point, 5> xs{Point{0, 0, 0}, Point{a, a, 0}, Point{-a, a, 0}, Point{a, -a, 0}, Point{-a, -a, 0}};
  for (int j = 0; j < nt; ++j) {
    const double t = nt == 1 ? 0.0 : 0.4 * radius * radius * (-1.0 + 2.0 * j / (nt - 1));
    const auto k = static_cast<Index>(std::llround((t - ta.t_lo) / ta.tau));
    if (k < 0 || k >= ta.nt) throw std::invalid_argument("sample_points: time axis too short");
    for (const Point& x : xs) {
      Point y = x;
      if (n == 1) y[1] = 0.0;
      push(g.join(k, d.nearest(y)));
    }
  }
  return out;
}

}  // namespace czlab
