#include <cmath>
#include <functional>
#include <numbers>

#include "czlab/integrals.hpp"
#include "czlab/solvers.hpp"
#include "czlab/stencils.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace czlab;
using std::numbers::pi;

namespace {

double sinsin(const Point& x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); }

double max_diff(const ScalarField& a, const std::function<double(const Point&, double)>& exact) {
  double e = 0.0;
  for (Index i = 0; i < a.size(); ++i)
    e = std::max(e, std::abs(a[i] - exact(a.grid().space().position(a.grid().spatial_of(i)), a.grid().time_of(i))));
  return e;
}

}  // namespace

TEST_CASE("expression parser and jets") {
  auto e = Expr::parse("u=sin(pi*x1)*x2^2 - 3*t");
  CHECK(e.uses_time());
  CHECK(e.max_axis() == 2);
  const Jet j = e.eval({0.25, 2.0, 0.0}, 1.0);
  CHECK(j.v == doctest::Approx(std::sin(pi / 4) * 4.0 - 3.0));
  CHECK(j.d[0] == doctest::Approx(pi * std::cos(pi / 4) * 4.0));
  CHECK(j.d[1] == doctest::Approx(std::sin(pi / 4) * 4.0));
  CHECK(j.d[3] == doctest::Approx(-3.0));
  CHECK(j.dd(0, 0) == doctest::Approx(-pi * pi * std::sin(pi / 4) * 4.0));
  CHECK(j.dd(0, 1) == doctest::Approx(pi * std::cos(pi / 4) * 4.0));
  CHECK(j.dd(1, 1) == doctest::Approx(2.0 * std::sin(pi / 4)));

  CHECK(Expr::parse("2^3^2").value({0, 0, 0}, 0) == 512.0);
  CHECK(Expr::parse("-x1^2").value({3, 0, 0}, 0) == -9.0);
  CHECK(Expr::parse("pow(x1, x2)").value({2, 3, 0}, 0) == doctest::Approx(8.0));
  CHECK(Expr::parse("pos(1-x1^2)^6").eval({1.5, 0, 0}, 0).dd.isZero());
  auto q = Expr::parse("x1/(1+x2)").eval({1.0, 1.0, 0.0}, 0);
  CHECK(q.dd(1, 1) == doctest::Approx(2.0 / 8.0));
  CHECK(q.dd(0, 1) == doctest::Approx(-0.25));
  auto lg = Expr::parse("log(x1)*exp(x2)+sqrt(x1)+tanh(x2)+cosh(x1)-sinh(x2)+tan(x1)").eval({0.5, 0.3, 0}, 0);
  CHECK(std::isfinite(lg.dd.sum()));
  CHECK_THROWS_AS(Expr::parse("sin(x1"), std::invalid_argument);
  CHECK_THROWS_AS(Expr::parse("y1+1"), std::invalid_argument);
  CHECK_THROWS_AS(Expr::parse("1+"), std::invalid_argument);
  CHECK_THROWS_AS(Expr::parse("x1 x2"), std::invalid_argument);
}

TEST_CASE("manufactured pairs") {
  Grid g = Domain::cube(2, 2.0, 64);
  auto q = manufactured_pair("(x1^2+x2^2)/4", g);
  CHECK((q.f.values().array() - 1.0).abs().maxCoeff() <= 1e-15);
  CHECK(q.residual <= 1e-12);
  CHECK(q.provenance == Provenance::Manufactured);
  auto hq = manufactured_pair("x1^2-x2^2", g);
  CHECK(hq.f.values().cwiseAbs().maxCoeff() == 0.0);
  CHECK(hq.residual == 0.0);

  auto res = [](Index cells) { return manufactured_pair("sin(pi*x1)*sin(pi*x2)", Grid(Domain::cube(2, 2.0, cells))).residual; };
  CHECK(res(64) / res(128) == doctest::Approx(4.0).epsilon(0.1));
  auto s = manufactured_pair("sin(pi*x1)*sin(pi*x2)", g);
  CHECK(max_diff(s.f, [](const Point& x, double) { return -2 * pi * pi * sinsin(x); }) <= 1e-12);

  CHECK_THROWS_AS(manufactured_pair("1/x1", Grid(Domain::cube(2, 1.0, 8))), std::domain_error);
  CHECK_THROWS_AS(manufactured_pair("x3", g), std::invalid_argument);
  CHECK_THROWS_AS(manufactured_pair("t*x1", g), std::invalid_argument);

  SpaceTimeDomain st = SpaceTimeDomain::centered(Domain::cube(2, 1.0, 16), 0.25);
  auto p = manufactured_pair("t+(x1^2+x2^2)/4", st);
  CHECK(p.f.values().cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(p.residual <= 1e-12);
}

TEST_CASE("solve_poisson") {
  Grid g = Domain::cube(2, 2.0, 64);
  auto harm = ScalarField::sample(g, [](const Point& x) { return x[0] * x[0] - x[1] * x[1]; });
  auto sol = solve_poisson(ScalarField(g), harm);
  CHECK((sol.u.values() - harm.values()).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(sol.residual <= 1e-8);
  CHECK(sol.provenance == Provenance::Solved);

  auto err = [](Index cells) {
    Grid gg = Domain(2, 0.0, 1.0, cells + 1);
    auto f = ScalarField::sample(gg, [](const Point& x) { return -2 * pi * pi * sinsin(x); });
    auto s = solve_poisson(f, ScalarField(gg));
    CHECK(s.residual <= 1e-8);
    return max_diff(s.u, [](const Point& x, double) { return sinsin(x); });
  };
  CHECK(err(32) / err(64) == doctest::Approx(4.0).epsilon(0.15));

  auto d2 = [](Index cells) {
    Grid gg = Domain::cube(2, 2.0, cells);
    auto f = capped_radial_power(gg, {1.0, 0.5, {0, 0, 0}});
    auto s = solve_poisson(f, ScalarField(gg));
    CHECK(s.residual <= 1e-8);
    return lp_norm(hessian(s.u), Region::ball(0.5), 2.0);
  };
  const double a = d2(64), b = d2(128);
  CHECK(std::isfinite(a));
  CHECK(std::abs(a - b) <= 0.05 * b);

  Grid small = Domain::cube(2, 1.0, 24);
  auto f1 = testing::random_field(small, 1), f2 = testing::random_field(small, 2);
  auto s12 = solve_poisson(2.0 * f1 + (-0.5) * f2, ScalarField(small)).u;
  auto lin = 2.0 * solve_poisson(f1, ScalarField(small)).u + (-0.5) * solve_poisson(f2, ScalarField(small)).u;
  CHECK((s12.values() - lin.values()).cwiseAbs().maxCoeff() <= 1e-9);

  SolverOptions starved;
  starved.max_iterations = 2;
  CHECK_THROWS_AS(solve_poisson(f1, ScalarField(small), starved), std::runtime_error);
}

TEST_CASE("solve_heat") {
  auto decay_err = [](Index cells) {
    SpaceTimeDomain st = SpaceTimeDomain::parabolic(Domain(2, 0.0, 1.0, cells + 1), 0.0, 0.05);
    auto u0 = ScalarField::sample(st.space(), sinsin);
    auto s = solve_heat(ScalarField(st), u0, ScalarField(st));
    CHECK(s.residual <= 1e-8);
    const double T = st.time().t_hi();
    (void)T;
    return max_diff(s.u, [](const Point& x, double t) { return std::exp(-2 * pi * pi * t) * sinsin(x); });
  };
  CHECK(decay_err(16) / decay_err(32) == doctest::Approx(4.0).epsilon(0.15));

  SpaceTimeDomain st = SpaceTimeDomain::parabolic(Domain(2, 0.0, 1.0, 17), 0.0, 0.1);
  auto one = ScalarField::sample(st, [](const Point&, double) { return 1.0; });
  HeatOptions implicit;
  implicit.theta = 1.0;
  auto grow = solve_heat(one, ScalarField(st.space()), ScalarField(st), implicit);
  const Grid g = st;
  for (Index i = g.slice_size(); i < g.node_count(); ++i)
    if (is_interior(g, i, 1)) CHECK(grow.u[i] > grow.u[i - g.slice_size()]);

  auto manufactured_err = [](Index cells) {
    SpaceTimeDomain s = SpaceTimeDomain::parabolic(Domain(2, 0.0, 1.0, cells + 1), 0.0, 0.05);
    auto m = manufactured_pair("t*sin(pi*x1)*sin(pi*x2)", s);
    auto sol = solve_heat(m.f, ScalarField(s.space()), ScalarField(s));
    return (sol.u.values() - m.u.values()).cwiseAbs().maxCoeff();
  };
  CHECK(manufactured_err(16) / manufactured_err(32) == doctest::Approx(4.0).epsilon(0.15));

  // f = 0, zero boundary: the slice L2 norm never increases
  for (double theta : {0.5, 0.75, 1.0}) {
    SpaceTimeDomain s = SpaceTimeDomain::parabolic(Domain(2, 0.0, 1.0, 17), 0.0, 0.05);
    auto u0 = testing::random_field(s.space(), 3);
    Eigen::VectorXd v = u0.values();
    for (Index i = 0; i < v.size(); ++i)
      if (!is_interior(Grid(s.space()), i, 1)) v[i] = 0.0;
    HeatOptions o;
    o.theta = theta;
    auto sol = solve_heat(ScalarField(s), ScalarField(s.space(), v), ScalarField(s), o);
    const Grid gg = s;
    double prev = INFINITY;
    for (Index k = 0; k < gg.slices(); ++k) {
      const double n2 = sol.u.values().segment(k * gg.slice_size(), gg.slice_size()).squaredNorm();
      CHECK(n2 <= prev * (1.0 + 1e-12));
      prev = n2;
    }
  }
  HeatOptions bad;
  bad.theta = 0.3;
  CHECK_THROWS_AS(solve_heat(one, ScalarField(st.space()), ScalarField(st), bad), std::invalid_argument);
}

TEST_CASE("corpus") {
  Grid g = Domain::cube(2, 2.0, 64);
  CorpusSpec spec;
  CHECK(corpus(spec, g).empty());
  spec.count = 5;
  auto a = corpus(spec, g), b = corpus(spec, g);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].u.values() == b[i].u.values());
    CHECK(a[i].f.values() == b[i].f.values());
    CHECK(a[i].recipe == b[i].recipe);
  }
  spec.seed = 2;
  CHECK(corpus(spec, g)[0].u.values() != a[0].u.values());

  // residual <= C h^2 with C of the same size for every seed
  const double h = g.space().spacing();
  double cmin = INFINITY, cmax = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CorpusSpec s{seed, 1, CorpusFamily::TrigPolynomial, 3.0};
    const double c = corpus(s, g)[0].residual / (h * h);
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  CHECK(cmax < 50.0);
  CHECK(cmax / cmin < 5.0);

  CorpusSpec bumps{7, 3, CorpusFamily::Bump};
  auto coarse = corpus(bumps, g), fine = corpus(bumps, Grid(Domain::cube(2, 2.0, 128)));
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    CHECK(coarse[i].residual / fine[i].residual == doctest::Approx(4.0).epsilon(0.15));
    CHECK(coarse[i].u[0] == 0.0);
  }
  CorpusSpec radial{7, 2, CorpusFamily::RadialPower};
  for (const auto& p : corpus(radial, Grid(Domain::cube(2, 2.0, 32)))) {
    CHECK(p.provenance == Provenance::Solved);
    CHECK(p.residual <= 1e-8);
  }
  SpaceTimeDomain st = SpaceTimeDomain::centered(Domain::cube(2, 1.0, 16), 0.25);
  for (auto fam : {CorpusFamily::TrigPolynomial, CorpusFamily::Bump, CorpusFamily::RadialPower}) {
    CorpusSpec ps{3, 2, fam};
    auto pc = corpus(ps, st);
    CHECK(pc.size() == 2);
    CHECK(pc[0].u.grid().has_time());
  }
  CHECK(parse_family("bump") == CorpusFamily::Bump);
  CHECK_THROWS_AS(parse_family("spline"), std::invalid_argument);
}
