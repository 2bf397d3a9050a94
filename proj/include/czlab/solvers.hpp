#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "czlab/expr.hpp"
#include "czlab/field.hpp"

namespace czlab {

enum class Provenance { Manufactured, Solved };

/// (u, f) with Δu = f on a spatial grid, or ∂ₜu − Δu = f on a space-time grid.
struct SolutionPair {
  ScalarField u;
  ScalarField f;
  Provenance provenance = Provenance::Manufactured;
  /// Measured max-norm of the discrete equation defect over interior nodes.
  double residual = 0.0;
  /// Recipe or construction that regenerates the pair on another grid.
  std::string recipe;
};

/// max |Δ_h u − f| over nodes one step inside the box (spatial), or
/// max |D_t u − Δ_h u − f| over interior nodes of interior slices.
double discrete_residual(const ScalarField& u, const ScalarField& f);

/// Samples u from the recipe and f from its analytic Laplacian (spatial grids)
/// or ∂ₜu − Δu (space-time grids). Throws if u or f is not finite on the grid.
SolutionPair manufactured_pair(const std::string& recipe, const Grid& grid);
SolutionPair manufactured_pair(const Expr& u, const Grid& grid);

struct SolverOptions {
  double tolerance = 1e-12;  // relative 2-norm residual of each CG solve
  Index max_iterations = 0;  // 0: Eigen's default (2 x unknowns)
};

/// Discrete Dirichlet problem Δ_h u = f in the box interior, u = boundary on
/// the box faces. Throws std::runtime_error if CG does not converge.
SolutionPair solve_poisson(const ScalarField& f, const ScalarField& boundary, const SolverOptions& opt = {});

struct HeatOptions {
  double theta = 0.5;
  SolverOptions cg;
};

/// θ-scheme for ∂ₜu − Δu = f on a space-time grid, starting from u0 on the
/// first slice with Dirichlet values taken from `boundary` on each slice.
/// The stored residual is the defect of the scheme itself.
SolutionPair solve_heat(const ScalarField& f, const ScalarField& u0, const ScalarField& boundary, const HeatOptions& opt = {});

/// Defect of the θ-scheme on u, f: max over interior nodes of slices k >= 1 of
/// (u^k − u^{k−1})/τ − θ(Δu^k + f^k) − (1−θ)(Δu^{k−1} + f^{k−1}).
double theta_scheme_residual(const ScalarField& u, const ScalarField& f, double theta);

enum class CorpusFamily { TrigPolynomial, RadialPower, Bump };

struct CorpusSpec {
  std::uint64_t seed = 1;
  int count = 0;
  CorpusFamily family = CorpusFamily::TrigPolynomial;
  double decay = 3.0;
  double amp_lo = 0.5;
  double amp_hi = 1.5;
  int max_mode = 3;
};

CorpusFamily parse_family(const std::string& s);
const char* to_string(CorpusFamily f);

/// Seeded pairs on `grid`. Spatial grids: trig-polynomial and bump pairs are
/// manufactured; radial-power pairs solve Δu = capped |x − x0|^(−β) with zero
/// boundary data. Space-time grids give manufactured pairs for every family.
/// The same spec yields the same analytic data on every grid.
std::vector<SolutionPair> corpus(const CorpusSpec& spec, const Grid& grid);

/// The recipe strings a spec generates (grid independent); empty entries for
/// radial-power pairs, which are described by `radial_power_parameters`.
std::vector<std::string> corpus_recipes(const CorpusSpec& spec, int dim, bool parabolic);

struct RadialPower {
  double amplitude;
  double beta;
  Point center;
};
std::vector<RadialPower> radial_power_parameters(const CorpusSpec& spec);

/// a·|x − x0|^(−β), with nodes closer than h to x0 given the value at distance h.
ScalarField capped_radial_power(const Grid& grid, const RadialPower& rp);

}  // namespace czlab
