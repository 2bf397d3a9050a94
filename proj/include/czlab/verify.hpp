#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "czlab/maximal.hpp"
#include "czlab/solvers.hpp"

namespace czlab {

struct NamedValue {
  std::string name;
  double value = 0.0;
};

struct GridInfo {
  int n = 0;
  Index points_per_axis = 0;
  double h = 0.0;
  bool has_time = false;
  double tau = 0.0;
  Index slices = 1;

  static GridInfo of(const Grid& g);
};

/// Measured sides of one estimate instance. `ratio` is lhs / rhs and is absent
/// when both sides vanish (`degenerate`).
struct EstimateReport {
  std::string label;
  double p = 2.0;
  GridInfo grid;
  double lhs = 0.0;
  std::vector<NamedValue> rhs_terms;
  double rhs = 0.0;
  std::optional<double> ratio;
  bool degenerate = false;
  Index points = 0;
  std::uint64_t seed = 0;
  int level = 0;
  std::vector<NamedValue> extras;
  std::string note;

  double extra(const std::string& name) const;
  bool has_extra(const std::string& name) const;
};

/// Sets rhs = Σ terms and the ratio; both sides zero gives a degenerate report.
/// Throws if lhs > 0 with rhs == 0.
EstimateReport make_report(std::string label, const Grid& g, double p, double lhs, std::vector<NamedValue> terms);

/// Nodes of a fixed lattice of `count` = k² sample points inside B_radius (or
/// count spatial x time points inside Q_radius on space-time grids), snapped
/// to the nearest node.
std::vector<Index> sample_points(const Grid& g, double radius, int count = 25);

/// Node at the origin (and t = 0); throws if the grid has no such node.
Index origin_node(const Grid& g);

// ---- elliptic ------------------------------------------------------------

/// Σ|D²v|² / Σ|Δv|² over the whole box; v must vanish on a two-node ring at the faces.
EstimateReport p2_identity_check(const ScalarField& v);

struct FsOptions {
  double r = 0.5;
  MaximalBackend backend = MaximalBackend::Mask;
};
/// One report per p: lhs = ‖w‖_{L^p(B_r)}, rhs = ‖(M#₂w)^{1/2}‖_{L^p(B_r)} + ‖w‖_{L¹(B_r)};
/// ratio is the lower sandwich ratio, extra "upper_ratio" its inverse.
std::vector<EstimateReport> fefferman_stein_report(const ScalarField& w, std::span<const double> ps, const RadiusSet& rs,
                                                   const FsOptions& opt = {});

/// max over points of M#₂D²u(x) / (‖u‖²_{L²(B₁)} + ‖f‖²_{L²(B₁)} + M#₂f(x)).
EstimateReport pointwise_estimate_report(const SolutionPair& pair, std::span<const Index> points, const RadiusSet& rs,
                                         MaximalBackend backend = MaximalBackend::Mask);

/// ∫_{B_{1/2}}|D²u|^p / (∫_{B₁}|u|^p + ∫_{B₁}|f|^p).
EstimateReport cz_elliptic_report(const SolutionPair& pair, double p);

/// u = x₁x₂ log|x| (u(0) = 0), f = 4x₁x₂/|x|² (f(0) = 0) on [−1,1]² with the
/// given cell counts: lhs = ‖D²u‖_{L^∞(B_{1/2})}, rhs = ‖f‖_{L^∞(B₁)}; extras
/// "p4_ratio" (the finite-p ratio at p = 4) and "f_max" (max |f| over the box).
std::vector<EstimateReport> sharpness_demo_pinf(std::span<const Index> cells);

/// max_ij |Σ ∂ᵢⱼu·g − Σ f·∂ᵢⱼv|·cell relative to ‖D²u‖₂‖g‖₂ + ‖f‖₂‖D²v‖₂.
/// u must vanish near the box faces.
EstimateReport duality_identity_check(const SolutionPair& uf, const SolutionPair& vg);

/// |u(x) − mean_{B_r(x)} u| / h² maximised over centres (snapped to nodes) and radii.
/// Throws std::domain_error when the fourth-order Laplacian of u exceeds 1e-8
/// on a sampled ball.
EstimateReport mean_value_check(const ScalarField& u, std::span<const Point> centers, std::span<const double> radii);

/// C_R = max_{x∈B_{R/2}} |D²u(x)| / (R^{−n/2} ‖D²u‖_{L²(B_R)}) for each R;
/// lhs = max C_R (the smallest constant that works on the ladder), rhs = min C_R.
EstimateReport growth_bound_check(const ScalarField& u, std::span<const double> radii);

/// max |Δ₄u| over nodes of the balls with a two-node margin, using the
/// fourth-order five-point second difference per axis.
double harmonicity_defect(const ScalarField& u, std::span<const Region> balls);

// ---- blow-up ----------------------------------------------------------------

struct ThetaSelection {
  Index eps_index = 0;  // ε = radii[eps_index]
  Index r_index = 0;    // r_m = radii[r_index] >= ε
  Index k = 0;          // k_m
  double oscillation = 0.0;
  double weight = 0.0;  // oscillation / (1 − δ): the blow-up normalisation Θ(r_m)
};

struct ThetaProfile {
  std::vector<double> radii;                // admissible radii at the point, increasing
  std::vector<std::vector<double>> osc;     // osc[k][i]
  std::vector<double> theta;                // Θ(radii[i])
  std::vector<std::pair<Index, Index>> attaining;  // (k, ρ index) per radius
  std::vector<ThetaSelection> selections;   // for ε running down the ladder
  double delta = 0.5;
  bool degenerate = false;

  bool monotone() const;
  /// (1 − δ) osc[k][ρ] <= osc[k_m][r_m] for every k and ρ >= r_m, every selection.
  bool selection_holds() const;
};

/// Θ(r) = max_k max_{ρ≥r} oscillation of hessians[k] on B_ρ(point).
ThetaProfile theta_profile(const std::vector<SymTensorField>& hessians, Index point, const RadiusSet& rs, double delta = 0.5);
/// Parabolic version: oscillation of D²u_k plus that of ∂ₜu_k on Q_ρ(point).
ThetaProfile theta_profile_parabolic(const std::vector<SymTensorField>& hessians, const std::vector<ScalarField>& dts,
                                     Index point, const RadiusSet& rs, double delta = 0.5);

enum class BlowupMode { Elliptic, Parabolic };

struct BlowupState {
  double r = 0.0;
  double theta = 0.0;
  ScalarField v;
  ScalarField g;
  // p(x, t) = c + b·x + xᵀAx/2 + d t
  double c = 0.0;
  Eigen::VectorXd b;
  Eigen::MatrixXd A;
  double d = 0.0;
  // diagnostics over the unit ball / cube of the rescaled grid
  double mean_v = 0.0;
  double mean_grad = 0.0;  // max |component average|
  double mean_hess = 0.0;  // max |entry average|
  double mean_dt = 0.0;
  double mean_g = 0.0;
  double hess_energy = 0.0;  // mean over B₁ (Q₁) of |D²v|² (+ |∂ₜv|²)
  double v_l2_2 = 0.0;       // ‖v‖_{L²(B₂)} (Q₂)
  double g_l2_2 = 0.0;
  double equation_defect = 0.0;  // max over B₁ (Q₁) of |Δv − g| (|∂ₜv − Δv − g|)
};

/// Zooms the pair at the origin by r: v(x) = (u(r x) − p(x)) / (r² Θ^{1/2}),
/// g(x) = (f(r x) − mean_{B_r} f) / Θ^{1/2} (times scaled by r² in parabolic
/// mode). The rescaled grid has spacing h/r so its nodes are nodes of the
/// original grid. Throws if Θ <= 0, r < 8h, or the zoom window leaves the box.
BlowupState blowup_rescale(const SolutionPair& pair, double r, double theta, BlowupMode mode);

// ---- parabolic -----------------------------------------------------------

/// max over points of (M#ₚ∂ₜu + M#ₚD²u) / (‖u‖²_{L²(Q₁)} + ‖f‖²_{L²(Q₁)} + M#ₚf).
EstimateReport pointwise_parabolic_report(const SolutionPair& pair, std::span<const Index> points, const RadiusSet& rs,
                                          MaximalBackend backend = MaximalBackend::Mask);

/// (∫_{Q_{1/2}}|D²u|^p + |∂ₜu|^p) / (∫_{Q₁}|u|^p + |f|^p).
EstimateReport cz_parabolic_report(const SolutionPair& pair, double p);

/// Slice order reversed: w(x, t_lo + t_hi − t).
ScalarField time_reverse(const ScalarField& w);

/// |∫ ∂ₜu·g̃ + ∫ f·∂ₜṽ| (trapezoidal in time) relative to the size of the two
/// sides, with g̃, ṽ the time reversals of g, v. Requires u(·, t_lo) = 0 and
/// v(·, t_lo) = 0.
EstimateReport parabolic_duality_check(const SolutionPair& uf, const SolutionPair& vg);

struct Monomial {
  double coef = 1.0;
  std::array<int, 3> alpha{0, 0, 0};
  int beta = 0;
};

struct Polynomial {
  int n = 2;
  std::vector<Monomial> terms;

  double operator()(const Point& x, double t) const;
  int parabolic_degree() const;
  std::string to_string() const;
};

/// Mean-square oscillation of p on Q_R (grids scaled with R, `cells` per unit
/// radius) for each R, and the fitted exponent σ of R^σ and constant c.
/// lhs = σ, rhs = 2N; degenerate when every oscillation vanishes.
EstimateReport poly_growth_check(const Polynomial& p, std::span<const double> radii, Index cells = 16);

/// All monomials x^α t^β in n variables with |α| + 2β <= max_degree.
std::vector<Polynomial> monomials_up_to(int n, int max_degree);

}  // namespace czlab
