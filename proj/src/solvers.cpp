#include "czlab/solvers.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "czlab/rng.hpp"
#include "czlab/stencils.hpp"

namespace czlab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Interior (non-face) nodes of a spatial domain and their unknown numbers.
struct InteriorMap {
  std::vector<Index> nodes;       // unknown -> spatial node
  std::vector<Index> unknown_of;  // spatial node -> unknown or -1

  explicit InteriorMap(const Domain& d) : unknown_of(static_cast<std::size_t>(d.node_count()), -1) {
    for (Index f = 0; f < d.node_count(); ++f) {
      if (!is_interior(Grid(d), f, 1)) continue;
      unknown_of[static_cast<std::size_t>(f)] = static_cast<Index>(nodes.size());
      nodes.push_back(f);
    }
  }
  Index size() const { return static_cast<Index>(nodes.size()); }
};

// A = −Δ_h on the unknowns (symmetric positive definite).
SpMat negative_laplacian(const Domain& d, const InteriorMap& im) {
  const double ih2 = 1.0 / (d.spacing() * d.spacing());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(im.size() * (2 * d.dim() + 1)));
  for (Index r = 0; r < im.size(); ++r) {
    const Index f = im.nodes[static_cast<std::size_t>(r)];
    trip.emplace_back(r, r, 2.0 * d.dim() * ih2);
    for (int a = 0; a < d.dim(); ++a)
      for (Index s : {-d.stride(a), d.stride(a)}) {
        const Index c = im.unknown_of[static_cast<std::size_t>(f + s)];
        if (c >= 0) trip.emplace_back(r, c, -ih2);
      }
  }
  SpMat A(im.size(), im.size());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

// Contribution of face values to Δ_h at each unknown: Σ boundary neighbours / h².
Eigen::VectorXd boundary_term(const Domain& d, const InteriorMap& im, const double* slice) {
  const double ih2 = 1.0 / (d.spacing() * d.spacing());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(im.size());
  for (Index r = 0; r < im.size(); ++r) {
    const Index f = im.nodes[static_cast<std::size_t>(r)];
    for (int a = 0; a < d.dim(); ++a)
      for (Index s : {-d.stride(a), d.stride(a)})
        if (im.unknown_of[static_cast<std::size_t>(f + s)] < 0) b[r] += slice[f + s] * ih2;
  }
  return b;
}

Eigen::VectorXd cg_solve(const SpMat& A, const Eigen::VectorXd& rhs, const Eigen::VectorXd& guess,
                         const SolverOptions& opt) {
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(opt.tolerance);
  if (opt.max_iterations > 0) cg.setMaxIterations(opt.max_iterations);
  cg.compute(A);
  Eigen::VectorXd x = cg.solveWithGuess(rhs, guess);
  if (cg.info() != Eigen::Success)
    throw std::runtime_error("conjugate gradients did not converge (" + std::to_string(cg.iterations()) +
                             " iterations, error " + fmt(cg.error()) + ")");
  return x;
}

void require_finite_field(const Eigen::VectorXd& v, const std::string& what) {
  if (!v.allFinite()) throw std::domain_error(what + ": recipe is not finite on the grid");
}

}  // namespace

double discrete_residual(const ScalarField& u, const ScalarField& f) {
  const Grid& g = u.grid();
  if (!(g == f.grid())) throw std::invalid_argument("discrete_residual: grids differ");
  const ScalarField lap = laplacian(u);
  double r = 0.0;
  if (!g.has_time()) {
    for (Index i = 0; i < u.size(); ++i)
      if (is_interior(g, i, 1)) r = std::max(r, std::abs(lap[i] - f[i]));
    return r;
  }
  const ScalarField ut = dt(u);
  for (Index i = 0; i < u.size(); ++i)
    if (is_interior(g, i, 1, 1)) r = std::max(r, std::abs(ut[i] - lap[i] - f[i]));
  return r;
}

SolutionPair manufactured_pair(const Expr& e, const Grid& grid) {
  if (e.max_axis() > grid.dim()) throw std::invalid_argument("recipe uses x" + std::to_string(e.max_axis()) + " on a " +
                                                             std::to_string(grid.dim()) + "-d grid");
  if (e.uses_time() && !grid.has_time()) throw std::invalid_argument("recipe depends on t but the grid has no time axis");
  const Domain& d = grid.space();
  Eigen::VectorXd u(grid.node_count()), f(grid.node_count());
  for (Index i = 0; i < grid.node_count(); ++i) {
    const LapJet j = e.eval_laplacian(d.position(grid.spatial_of(i)), grid.time_of(i));
    u[i] = j.v;
    f[i] = grid.has_time() ? j.time_derivative() - j.lap : j.lap;
  }
  require_finite_field(u, "manufactured_pair u");
  require_finite_field(f, "manufactured_pair f");
  SolutionPair p{ScalarField(grid, std::move(u)), ScalarField(grid, std::move(f)), Provenance::Manufactured, 0.0, e.text()};
  p.residual = discrete_residual(p.u, p.f);
  return p;
}

SolutionPair manufactured_pair(const std::string& recipe, const Grid& grid) {
  return manufactured_pair(Expr::parse(recipe), grid);
}

SolutionPair solve_poisson(const ScalarField& f, const ScalarField& boundary, const SolverOptions& opt) {
  const Grid& g = f.grid();
  if (g.has_time()) throw std::invalid_argument("solve_poisson: spatial field expected");
  if (!(g == boundary.grid())) throw std::invalid_argument("solve_poisson: boundary grid differs");
  const Domain& d = g.space();
  const InteriorMap im(d);
  const SpMat A = negative_laplacian(d, im);
  Eigen::VectorXd rhs = boundary_term(d, im, boundary.values().data());
  for (Index r = 0; r < im.size(); ++r) rhs[r] -= f[im.nodes[static_cast<std::size_t>(r)]];
  const Eigen::VectorXd x = cg_solve(A, rhs, Eigen::VectorXd::Zero(im.size()), opt);

  Eigen::VectorXd u = boundary.values();
  for (Index r = 0; r < im.size(); ++r) u[im.nodes[static_cast<std::size_t>(r)]] = x[r];
  SolutionPair p{ScalarField(g, std::move(u)), f, Provenance::Solved, 0.0, "solve_poisson"};
  p.residual = discrete_residual(p.u, p.f);
  return p;
}

double theta_scheme_residual(const ScalarField& u, const ScalarField& f, double theta) {
  const Grid& g = u.grid();
  const double tau = g.time().tau;
  const ScalarField lap = laplacian(u);
  const Index ss = g.slice_size();
  double r = 0.0;
  for (Index i = ss; i < u.size(); ++i) {
    if (!is_interior(g, i, 1)) continue;
    const double lhs = (u[i] - u[i - ss]) / tau;
    const double rhs = theta * (lap[i] + f[i]) + (1.0 - theta) * (lap[i - ss] + f[i - ss]);
    r = std::max(r, std::abs(lhs - rhs));
  }
  return r;
}

SolutionPair solve_heat(const ScalarField& f, const ScalarField& u0, const ScalarField& boundary, const HeatOptions& opt) {
  const Grid& g = f.grid();
  if (!g.has_time()) throw std::invalid_argument("solve_heat: space-time forcing expected");
  if (u0.grid().has_time() || !(u0.grid().space() == g.space())) throw std::invalid_argument("solve_heat: u0 must live on the spatial grid");
  if (!(boundary.grid() == g)) throw std::invalid_argument("solve_heat: boundary grid differs");
  if (opt.theta < 0.5 || opt.theta > 1.0) throw std::invalid_argument("solve_heat: theta must lie in [1/2, 1]");

  const Domain& d = g.space();
  const double tau = g.time().tau, th = opt.theta;
  const InteriorMap im(d);
  const SpMat A = negative_laplacian(d, im);
  SpMat I(im.size(), im.size());
  I.setIdentity();
  const SpMat M = I + (th * tau) * A;
  const Index ss = g.slice_size();

  Eigen::VectorXd u(g.node_count());
  Eigen::VectorXd U(im.size()), F0(im.size()), F1(im.size());
  for (Index s = 0; s < ss; ++s) u[s] = boundary[s];
  for (Index r = 0; r < im.size(); ++r) U[r] = u0[im.nodes[static_cast<std::size_t>(r)]];
  auto forcing = [&](Index k, Eigen::VectorXd& out) {
    out = boundary_term(d, im, boundary.values().data() + k * ss);
    for (Index r = 0; r < im.size(); ++r) out[r] += f[k * ss + im.nodes[static_cast<std::size_t>(r)]];
  };
  forcing(0, F0);
  for (Index r = 0; r < im.size(); ++r) u[im.nodes[static_cast<std::size_t>(r)]] = U[r];

  for (Index k = 1; k < g.slices(); ++k) {
    forcing(k, F1);
    const Eigen::VectorXd rhs = U - ((1.0 - th) * tau) * (A * U) + tau * (th * F1 + (1.0 - th) * F0);
    U = cg_solve(M, rhs, U, opt.cg);
    for (Index s = 0; s < ss; ++s) u[k * ss + s] = boundary[k * ss + s];
    for (Index r = 0; r < im.size(); ++r) u[k * ss + im.nodes[static_cast<std::size_t>(r)]] = U[r];
    std::swap(F0, F1);
  }
  SolutionPair p{ScalarField(g, std::move(u)), f, Provenance::Solved, 0.0, "solve_heat theta=" + fmt(th)};
  p.residual = theta_scheme_residual(p.u, p.f, th);
  return p;
}

CorpusFamily parse_family(const std::string& s) {
  if (s == "trig-polynomial") return CorpusFamily::TrigPolynomial;
  if (s == "radial-power") return CorpusFamily::RadialPower;
  if (s == "bump") return CorpusFamily::Bump;
  throw std::invalid_argument("unknown corpus family '" + s + "'");
}

const char* to_string(CorpusFamily f) {
  switch (f) {
    case CorpusFamily::TrigPolynomial: return "trig-polynomial";
    case CorpusFamily::RadialPower: return "radial-power";
    case CorpusFamily::Bump: return "bump";
  }
  return "?";
}

std::vector<RadialPower> radial_power_parameters(const CorpusSpec& spec) {
  std::vector<RadialPower> out;
  for (int i = 0; i < spec.count; ++i) {
    Rng rng(spec.seed, static_cast<std::uint64_t>(i));
    RadialPower rp{rng.sign() * rng.uniform(spec.amp_lo, spec.amp_hi), rng.uniform(0.2, 0.5), {0, 0, 0}};
    for (auto& c : rp.center) c = rng.uniform(-0.25, 0.25);
    out.push_back(rp);
  }
  return out;
}

std::vector<std::string> corpus_recipes(const CorpusSpec& spec, int dim, bool parabolic) {
  std::vector<std::string> out;
  const double w = 0.5 * std::numbers::pi;  // one half-wave across the unit length
  const auto radial = radial_power_parameters(spec);
  for (int i = 0; i < spec.count; ++i) {
    Rng rng(spec.seed, static_cast<std::uint64_t>(i));
    std::string r;
    switch (spec.family) {
      case CorpusFamily::TrigPolynomial: {
        std::array<int, 3> k{0, 0, 0};
        const int K = spec.max_mode;
        for (k[0] = 0; k[0] <= K; ++k[0])
          for (k[1] = 0; k[1] <= (dim > 1 ? K : 0); ++k[1])
            for (k[2] = 0; k[2] <= (dim > 2 ? K : 0); ++k[2]) {
              const double norm = std::sqrt(static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
              if (norm == 0.0) continue;
              const double a = rng.sign() * rng.uniform(spec.amp_lo, spec.amp_hi) * std::pow(norm, -spec.decay);
              const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
              std::string arg;
              for (int ax = 0; ax < dim; ++ax)
                if (k[ax] != 0) arg += (arg.empty() ? "" : "+") + std::to_string(k[ax]) + "*x" + std::to_string(ax + 1);
              std::string term = fmt(a) + "*sin(" + fmt(w) + "*(" + arg + ")+" + fmt(phi) + ")";
              if (parabolic) term += "*exp(" + fmt(rng.uniform(-1.0, 1.0)) + "*t)";
              r += (r.empty() ? "" : "+") + term;
            }
        break;
      }
      case CorpusFamily::Bump: {
        for (int j = 0; j < 3; ++j) {
          const double a = rng.sign() * rng.uniform(spec.amp_lo, spec.amp_hi);
          const double rho = rng.uniform(0.4, 0.9);
          std::string sum;
          for (int ax = 0; ax < dim; ++ax) {
            const double c = rng.uniform(-0.5, 0.5);
            sum += (ax ? "+" : "") + std::string("(x") + std::to_string(ax + 1) + "-(" + fmt(c) + "))^2";
          }
          std::string term = fmt(a) + "*pos(1-(" + sum + ")/" + fmt(rho * rho) + ")^6";
          if (parabolic) term += "*exp(" + fmt(rng.uniform(-1.0, 1.0)) + "*t)";
          r += (r.empty() ? "" : "+") + term;
        }
        break;
      }
      case CorpusFamily::RadialPower: {
        if (parabolic) {
          // regularised radial profile: smooth, with the same growth away from x0
          const RadialPower& rp = radial[static_cast<std::size_t>(i)];
          std::string q = "0.0025";
          for (int ax = 0; ax < dim; ++ax)
            q += "+(x" + std::to_string(ax + 1) + "-(" + fmt(rp.center[static_cast<std::size_t>(ax)]) + "))^2";
          r = fmt(rp.amplitude) + "*(" + q + ")^" + fmt(1.0 - 0.5 * rp.beta) + "*exp(" + fmt(rng.uniform(-1.0, 1.0)) + "*t)";
        }
        break;
      }
    }
    out.push_back(r);
  }
  return out;
}

ScalarField capped_radial_power(const Grid& grid, const RadialPower& rp) {
  const Domain& d = grid.space();
  const double h = d.spacing();
  return ScalarField::sample(grid, [&](const Point& x) {
    double r2 = 0.0;
    for (int a = 0; a < d.dim(); ++a) r2 += (x[a] - rp.center[a]) * (x[a] - rp.center[a]);
    const double r = std::max(std::sqrt(r2), h);
    return rp.amplitude * std::pow(r, -rp.beta);
  });
}

std::vector<SolutionPair> corpus(const CorpusSpec& spec, const Grid& grid) {
  std::vector<SolutionPair> out;
  if (spec.count < 0) throw std::invalid_argument("corpus: negative count");
  if (spec.family == CorpusFamily::RadialPower && !grid.has_time()) {
    for (const RadialPower& rp : radial_power_parameters(spec)) {
      ScalarField f = capped_radial_power(grid, rp);
      SolutionPair p = solve_poisson(f, ScalarField(grid));
      p.recipe = "radial-power a=" + fmt(rp.amplitude) + " beta=" + fmt(rp.beta) + " x0=(" + fmt(rp.center[0]) + "," +
                 fmt(rp.center[1]) + "," + fmt(rp.center[2]) + ")";
      out.push_back(std::move(p));
    }
    return out;
  }
  for (const std::string& r : corpus_recipes(spec, grid.dim(), grid.has_time())) out.push_back(manufactured_pair(r, grid));
  return out;
}

}  // namespace czlab
