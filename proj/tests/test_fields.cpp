#include <cmath>
#include <numbers>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "czlab/field_io.hpp"
#include "czlab/integrals.hpp"
#include "czlab/stencils.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace czlab;
using std::numbers::pi;

namespace {

Domain box2(Index cells) { return Domain::cube(2, 2.0, cells); }

double max_err(const ScalarField& a, const std::function<double(const Point&)>& exact, Index margin = 1) {
  double e = 0.0;
  for (Index f = 0; f < a.size(); ++f)
    if (is_interior(a.grid(), f, margin)) e = std::max(e, std::abs(a[f] - exact(a.grid().space().position(f))));
  return e;
}

}  // namespace

TEST_CASE("domain geometry and indexing") {
  Domain d = box2(64);
  CHECK(d.points_per_axis() == 65);
  CHECK(d.spacing() == 0.0625);
  CHECK(d.node_count() == 65 * 65);
  const Index f = d.flat({3, 7, 0});
  CHECK(d.unflat(f)[0] == 3);
  CHECK(d.unflat(f)[1] == 7);
  CHECK(d.position(f)[0] == -2.0 + 3 * 0.0625);
  CHECK_THROWS_AS(Domain(2, -1.0, 1.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(Domain(4, -1.0, 1.0, 9), std::invalid_argument);
  CHECK_THROWS_AS(Domain(2, Point{0, 0, 0}, Point{1, 2, 0}, 9), std::invalid_argument);

  SpaceTimeDomain st = SpaceTimeDomain::centered(Domain::cube(2, 1.0, 16), 0.5);
  CHECK(st.time().tau == doctest::Approx(0.5 * 0.125 * 0.125));
  CHECK(st.time().nt % 2 == 1);
  CHECK(st.time().at(st.time().nt / 2) == 0.0);
  CHECK_THROWS_AS(SpaceTimeDomain(d, 0.0, 0.1, 7), std::invalid_argument);
}

TEST_CASE("field invariants") {
  Grid g = box2(8);
  CHECK_THROWS_AS(ScalarField(g, Eigen::VectorXd::Zero(3)), std::invalid_argument);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(g.node_count());
  v[4] = std::nan("");
  CHECK_THROWS_AS(ScalarField(g, v), std::domain_error);
  CHECK(sym_index(3, 1, 2) == sym_index(3, 2, 1));
  CHECK(sym_components(3) == 6);
}

TEST_CASE("gradient") {
  Grid g = box2(64);
  auto c = ScalarField::sample(g, [](const Point&) { return 5.0; });
  for (const auto& comp : gradient(c)) CHECK(comp.values().cwiseAbs().maxCoeff() == 0.0);

  auto x1 = ScalarField::sample(g, [](const Point& x) { return x[0]; });
  auto gx = gradient(x1);
  CHECK(max_err(gx[0], [](const Point&) { return 1.0; }) == 0.0);
  CHECK(max_err(gx[1], [](const Point&) { return 0.0; }) == 0.0);

  auto err = [](Index cells) {
    Grid gg = box2(cells);
    auto s = ScalarField::sample(gg, [](const Point& x) { return std::sin(x[0]); });
    return max_err(gradient(s)[0], [](const Point& x) { return std::cos(x[0]); });
  };
  CHECK(err(32) / err(64) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("hessian and laplacian") {
  Grid g = box2(64);
  auto aff = ScalarField::sample(g, [](const Point& x) { return 3.0 * x[0] - x[1] + 2.0; });
  CHECK(hessian(aff).values().cwiseAbs().maxCoeff() == 0.0);

  auto bil = ScalarField::sample(g, [](const Point& x) { return x[0] * x[1]; });
  CHECK(max_err(hessian(bil).component(0, 1), [](const Point&) { return 1.0; }) == 0.0);

  auto cube = ScalarField::sample(g, [](const Point& x) { return x[0] * x[0] * x[0]; });
  CHECK(max_err(hessian(cube).component(0, 0), [](const Point& x) { return 6.0 * x[0]; }) <= 1e-12);

  auto q = ScalarField::sample(g, [](const Point& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); });
  CHECK(max_err(laplacian(q), [](const Point&) { return 2.0; }) == 0.0);

  auto harm = ScalarField::sample(g, [](const Point& x) { return x[0] * x[0] - x[1] * x[1]; });
  CHECK(max_err(laplacian(harm), [](const Point&) { return 0.0; }) == 0.0);

  auto rnd = testing::random_field(g, 11);
  CHECK(laplacian(rnd).values() == hessian(rnd).trace().values());

  auto err = [](Index cells) {
    Grid gg = box2(cells);
    auto s = ScalarField::sample(gg, [](const Point& x) { return std::sin(x[0]) * std::sin(x[1]); });
    return max_err(laplacian(s), [](const Point& x) { return -2.0 * std::sin(x[0]) * std::sin(x[1]); });
  };
  CHECK(err(32) / err(64) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("hessian is exact on quadratics in 3d") {
  Grid g = Domain::cube(3, 2.0, 16);
  auto q = ScalarField::sample(g, [](const Point& x) { return x[0] * x[2] + 2.0 * x[1] * x[1] - x[0] * x[1]; });
  auto H = hessian(q);
  CHECK(max_err(H.component(0, 2), [](const Point&) { return 1.0; }) == 0.0);
  CHECK(max_err(H.component(1, 1), [](const Point&) { return 4.0; }) == 0.0);
  CHECK(max_err(H.component(0, 1), [](const Point&) { return -1.0; }) == 0.0);
  CHECK(max_err(H.component(1, 2), [](const Point&) { return 0.0; }) == 0.0);
}

TEST_CASE("time derivative") {
  SpaceTimeDomain st(Domain(2, 0.0, 1.0, 9), 0.0, 0.125, 9);
  auto c = ScalarField::sample(st, [](const Point&, double) { return 3.0; });
  CHECK(dt(c).values().cwiseAbs().maxCoeff() == 0.0);
  auto t = ScalarField::sample(st, [](const Point&, double tt) { return tt; });
  CHECK((dt(t).values().array() - 1.0).abs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(dt(ScalarField(Grid(Domain(2, 0.0, 1.0, 9)))), std::invalid_argument);

  auto err = [](Index nt) {
    const double tau = 0.1 / static_cast<double>(nt - 1);
    SpaceTimeDomain s(Domain(2, 0.0, 1.0, 17), 0.0, tau, nt);
    auto exact = [](const Point& x, double tt) { return std::exp(-2 * pi * pi * tt) * std::sin(pi * x[0]) * std::sin(pi * x[1]); };
    auto u = ScalarField::sample(s, exact);
    auto d = dt(u);
    double e = 0.0;
    for (Index f = 0; f < u.size(); ++f) {
      const Index k = s.time().nt > 0 ? Grid(s).slice_of(f) : 0;
      if (k == 0 || k == nt - 1) continue;
      const Point x = s.space().position(Grid(s).spatial_of(f));
      e = std::max(e, std::abs(d[f] + 2 * pi * pi * exact(x, s.time().at(k))));
    }
    return e;
  };
  CHECK(err(11) / err(21) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("region membership") {
  Grid g = box2(64);
  // r an exact multiple of h: on-sphere nodes are outside
  auto nodes = region_nodes(g, Region::ball(0.125));
  CHECK(nodes.size() == 9);  // lattice points with i^2 + j^2 < 4
  for (Index f : nodes) {
    const Point x = g.space().position(f);
    CHECK(x[0] * x[0] + x[1] * x[1] < 0.125 * 0.125);
  }
  CHECK_THROWS_AS(region_nodes(g, Region::cube(0.5)), std::invalid_argument);
  CHECK_THROWS_AS(region_nodes(g, Region::ball(0.0)), std::invalid_argument);

  SpaceTimeDomain st = SpaceTimeDomain::centered(Domain::cube(2, 1.0, 16), 0.5);
  const double tau = st.time().tau;
  // half-open (t0 - r^2/2, t0 + r^2/2]: with r^2/2 = 2 tau the slices -1,0,1,2 are in
  auto cube = region_nodes(st, Region::cube(std::sqrt(4.0 * tau)));
  std::set<Index> slices;
  for (Index f : cube) slices.insert(Grid(st).slice_of(f) - st.time().nt / 2);
  CHECK(slices == std::set<Index>{-1, 0, 1, 2});
}

TEST_CASE("region_average") {
  Grid g = box2(64);
  auto c = ScalarField::sample(g, [](const Point&) { return 2.5; });
  CHECK(region_average(c, Region::ball(0.7, {0.1, -0.2, 0})) == 2.5);
  auto x1 = ScalarField::sample(g, [](const Point& x) { return x[0]; });
  CHECK(region_average(x1, Region::ball(1.0)) == 0.0);
  auto sq = ScalarField::sample(g, [](const Point& x) { return x[0] * x[0]; });
  const double h = g.space().spacing();
  for (double r : {0.5, 1.0, 1.5}) CHECK(std::abs(region_average(sq, Region::ball(r)) - r * r / 4.0) <= 3.0 * h * h);
  CHECK_THROWS_AS(region_average(c, Region::ball(0.01, {0.03, 0.03, 0})), std::invalid_argument);

  auto H = hessian(ScalarField::sample(g, [](const Point& x) { return x[0] * x[1] + x[1] * x[1]; }));
  auto m = region_average(H, Region::ball(0.5));
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 0) == 1.0);
  CHECK(m(1, 1) == 2.0);
  CHECK(m(0, 0) == 0.0);
}

TEST_CASE("lp_norm") {
  Grid g = box2(128);
  auto one = ScalarField::sample(g, [](const Point&) { return 1.0; });
  const double h = g.space().spacing();
  for (double p : {1.0, 2.0, 3.5}) {
    const double exact = std::pow(pi, 1.0 / p);
    CHECK(std::abs(lp_norm(one, Region::ball(1.0), p) - exact) <= 4.0 * h * exact);
  }
  CHECK(lp_norm(one, Region::ball(1.0), std::numeric_limits<double>::infinity()) == 1.0);
  auto zero = ScalarField(g);
  for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) CHECK(lp_norm(zero, Region::ball(1.0), p) == 0.0);
  CHECK_THROWS_AS(lp_norm(one, Region::ball(1.0), 0.5), std::invalid_argument);

  auto w = testing::random_field(g, 3);
  auto w2 = w.map([](double v) { return v * v; });
  const Region reg = Region::ball(0.9, {0.2, 0.1, 0});
  const double lhs = lp_norm(w, reg, 2.0);
  const double rhs = std::sqrt(region_average(w2, reg) * region_measure(g, reg));
  CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
}

TEST_CASE("lp_norm properties on random fields") {
  Grid g = box2(32);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto w = testing::random_field(g, seed);
    const double meas = region_measure(g, Region::ball(1.0));
    double prev = 0.0;
    for (double p : {1.0, 1.5, 2.0, 3.0, 6.0}) {
      const double avg = lp_norm(w, Region::ball(1.0), p) / std::pow(meas, 1.0 / p);
      CHECK(avg >= prev * (1.0 - 1e-12));
      prev = avg;
    }
    CHECK(lp_norm(w, Region::ball(0.5), 2.0) <= lp_norm(w, Region::ball(1.0), 2.0));
    CHECK(lp_norm(w, Region::ball(1.0), 2.0) <= lp_norm(w, Region::ball(1.5), 2.0));
  }
}

TEST_CASE("linearity of derivative and averaging operators") {
  Grid g = box2(32);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto a = testing::random_field(g, seed);
    auto b = testing::random_field(g, seed + 100);
    const double al = 1.7, be = -0.3;
    auto comb = al * a + be * b;
    auto close = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
      return (x - y).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff());
    };
    CHECK(close(laplacian(comb).values(), al * laplacian(a).values() + be * laplacian(b).values()));
    CHECK(close(hessian(comb).values(), al * hessian(a).values() + be * hessian(b).values()));
    CHECK(close(gradient(comb)[1].values(), al * gradient(a)[1].values() + be * gradient(b)[1].values()));
    const Region reg = Region::ball(0.8);
    const double lhs = region_average(comb, reg);
    const double rhs = al * region_average(a, reg) + be * region_average(b, reg);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)) * 10.0);
  }
}

TEST_CASE("mean minimizes the mean-square deviation") {
  Grid g = box2(32);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto w = testing::random_field(g, seed);
    const Region reg = Region::ball(1.0);
    const double m = region_average(w, reg);
    auto dev = [&](double c) { return region_average(w.map([c](double v) { return (v - c) * (v - c); }), reg); };
    CHECK(dev(m) < dev(m + 0.01));
    CHECK(dev(m) < dev(m - 0.01));
  }
}

TEST_CASE("mollify") {
  Grid g = box2(64);
  const double h = g.space().spacing();
  CHECK_THROWS_AS(mollify(ScalarField(g), 1.5 * h), std::invalid_argument);

  auto c = ScalarField::sample(g, [](const Point&) { return 0.75; });
  auto mc = mollify(c, 0.25);
  auto x1 = ScalarField::sample(g, [](const Point& x) { return x[0]; });
  auto mx = mollify(x1, 0.25);
  Index valid = 0;
  for (Index f = 0; f < c.size(); ++f) {
    if (!mc.valid[f]) {
      CHECK(mc.field[f] == 0.0);
      continue;
    }
    ++valid;
    CHECK(std::abs(mc.field[f] - 0.75) <= 2e-16);
    CHECK(std::abs(mx.field[f] - x1[f]) <= 1e-15);
  }
  CHECK(valid > 0);
  CHECK_FALSE(mc.valid[0]);

  auto err = [&](double eps) {
    auto s = ScalarField::sample(g, [](const Point& x) { return std::sin(x[0]); });
    auto m = mollify(s, eps);
    double e = 0.0;
    for (Index f = 0; f < s.size(); ++f)
      if (m.valid[f]) e = std::max(e, std::abs(m.field[f] - s[f]));
    return e;
  };
  // O(eps^2): halving eps divides the error by ~4
  CHECK(err(0.5) / err(0.25) == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("CZF1 round trip and CSV dump") {
  SpaceTimeDomain st = SpaceTimeDomain::centered(Domain::cube(2, 1.0, 8), 0.1);
  auto w = testing::random_field(st, 5);
  std::stringstream ss;
  write_czf(ss, to_raw(w));
  auto back = scalar_from_raw(read_czf(ss));
  CHECK(back.grid() == w.grid());
  CHECK(back.values() == w.values());

  auto H = hessian(testing::random_field(Domain::cube(3, 1.0, 8), 6));
  std::stringstream s2;
  write_czf(s2, to_raw(H));
  auto raw = read_czf(s2);
  CHECK(raw.channels == 6);
  CHECK(raw.at(17, 4) == H.values()(17, 4));

  std::stringstream bad("CZF2....");
  CHECK_THROWS(read_czf(bad));

  std::stringstream csv;
  write_csv(csv, to_raw(ScalarField::sample(Domain::cube(1, 1.0, 8), [](const Point& x) { return x[0]; })));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "x1,c0");
}
