// Acceptance gate: one PASS/FAIL line per criterion. Every check is
// recomputed here from the report values; the experiments' own rule flags
// are not consulted.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "czlab/run.hpp"

using namespace czlab;
namespace fs = std::filesystem;

namespace {

// pinned tolerances
constexpr double kOracleSeconds = 30.0;
constexpr int kOracleSeeds = 50;
constexpr double kClosedFormH2 = 3.0;
constexpr double kP2At128 = 2e-2;
constexpr double kP2At256 = 5e-3;
constexpr double kContractionLo = 3.0, kContractionHi = 5.0;
constexpr double kFsDrift = 0.20;
constexpr double kPointwiseDrift = 0.25;
constexpr double kCzDrift = 0.25;
constexpr double kP4Drift = 0.25;
constexpr double kAverageTol = 1e-8;
constexpr double kEnergyLo = 0.49, kEnergyHi = 0.51;
constexpr double kExponentTol = 0.1;
constexpr double kTConstant = 1.0 / 12.0, kTConstantRel = 0.05;
constexpr double kDualityFactor = 4.0, kDualityRel = 0.15;
constexpr double kSymmetricTol = 1e-10;
constexpr double kMeanValueC = 1.0;  // defect <= C h²
constexpr double kGrowthSpread = 1.10;
constexpr double kSuiteSeconds = 600.0;
constexpr std::uint64_t kSeed = 20240601;
constexpr int kJobs = 4;

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string f6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double drift(double a, double b) { return a == b ? 0.0 : std::abs(b - a) / std::abs(a); }

ExperimentResult run(const std::string& name, const std::function<void(ExperimentConfig&)>& tweak = {}) {
  ExperimentConfig cfg = default_config(*find_experiment(name), kSeed);
  if (tweak) tweak(cfg);
  return run_experiment(cfg);
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

double h2(const EstimateReport& r) { return r.grid.h * r.grid.h; }

Verdict criterion1() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = run("maximal_oracle_equivalence", [](ExperimentConfig& c) {
    c.grids = {31};
    c.options["seeds"] = std::to_string(kOracleSeeds);
    c.options["parabolic_cells"] = "15";
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.require(res.reports.size() == 2, "expected an elliptic and a parabolic report");
  for (const auto& r : res.reports) {
    const bool par = r.grid.has_time;
    const Index nodes = par ? 16 * 16 * 16 : 32 * 32;
    v.require(r.grid.points_per_axis == (par ? 16 : 32) && (!par || r.grid.slices == 16), "grid size");
    v.require(r.points == kOracleSeeds * nodes, r.label + " compared " + std::to_string(r.points) + " nodes");
    v.require(r.lhs == 0.0, r.label + ": " + f6(r.lhs) + " nodes differ");
    if (r.has_extra("fft_like_rel_dev")) v.note("fft-like deviation " + f6(r.extra("fft_like_rel_dev")));
  }
  v.require(secs < kOracleSeconds, "took " + f6(secs) + " s");
  v.note(f6(secs) + " s");
  return v;
}

Verdict criterion2() {
  Verdict v;
  const auto res = run("maximal_closed_form", [](ExperimentConfig& c) { c.grids = {64, 128}; });
  v.require(res.reports.size() == 4, "expected 4 reports");
  for (const auto& r : res.reports) {
    const double err = std::abs(r.extra("value") - r.extra("closed_form"));
    const double tol = r.grid.has_time ? kClosedFormH2 * (h2(r) + r.grid.tau) : kClosedFormH2 * h2(r);
    v.require(err <= tol, r.label + " error " + f6(err) + " > " + f6(tol));
    v.note(r.label + "@" + std::to_string(r.grid.points_per_axis - 1) + " " + f6(err / tol));
  }
  return v;
}

Verdict criterion3() {
  Verdict v;
  const auto res = run("p2_identity_check", [](ExperimentConfig& c) { c.grids = {64, 128, 256}; });
  std::map<Index, double> err;
  for (const auto& r : res.reports) err[r.grid.points_per_axis - 1] = std::abs(*r.ratio - 1.0);
  v.require(err.size() == 3, "expected three levels");
  v.require(err[128] <= kP2At128, "error at 128 = " + f6(err[128]));
  v.require(err[256] <= kP2At256, "error at 256 = " + f6(err[256]));
  for (const auto& [a, b] : {std::pair{64, 128}, std::pair{128, 256}}) {
    const double f = err[a] / err[b];
    v.require(f >= kContractionLo && f <= kContractionHi, "contraction " + f6(f));
    v.note("factor " + f6(f));
  }
  v.note("err@256 " + f6(err[256]));
  return v;
}

Verdict criterion4() {
  Verdict v;
  const auto res = run("fefferman_stein_report", [](ExperimentConfig& c) {
    c.grids = {64, 128};
    c.ps = {1.5, 2.0, 3.0, 4.0};
    c.corpus.count = 20;
  });
  // [p][level] -> (min lower, max upper)
  std::map<double, std::map<int, std::pair<double, double>>> agg;
  std::size_t rows = 0;
  for (const auto& r : res.reports) {
    auto& slot = agg[r.p].try_emplace(r.level, std::numeric_limits<double>::infinity(), 0.0).first->second;
    slot.first = std::min(slot.first, *r.ratio);
    slot.second = std::max(slot.second, r.extra("upper_ratio"));
    ++rows;
  }
  v.require(rows == 20 * 4 * 2, "expected 160 reports, got " + std::to_string(rows));
  for (const auto& [p, lv] : agg) {
    const auto& [lo0, hi0] = lv.at(0);
    const auto& [lo1, hi1] = lv.at(1);
    v.require(lo0 > 0.0 && lo1 > 0.0, "p=" + f6(p) + " lower ratio not positive");
    v.require(std::isfinite(hi0) && std::isfinite(hi1), "p=" + f6(p) + " upper ratio not finite");
    v.require(drift(lo0, lo1) < kFsDrift, "p=" + f6(p) + " lower drift " + f6(drift(lo0, lo1)));
    v.require(drift(hi0, hi1) < kFsDrift, "p=" + f6(p) + " upper drift " + f6(drift(hi0, hi1)));
    v.note("p=" + f6(p) + " lower " + f6(lo1) + " upper " + f6(hi1));
  }
  return v;
}

Verdict criterion5() {
  Verdict v;
  const auto res = run("pointwise_estimate_report", [](ExperimentConfig& c) {
    c.grids = {64, 128};
    c.corpus.count = 20;
  });
  std::map<int, double> best;
  int trivial = 0;
  for (const auto& r : res.reports) {
    if (starts_with(r.note, "pair ")) {
      v.require(r.points == 25, "expected 25 sample points");
      best[r.level] = std::max(best[r.level], *r.ratio);
    } else {
      ++trivial;
      v.require(r.lhs == 0.0, r.note + " gives " + f6(r.lhs));
    }
  }
  v.require(trivial == 4, "expected quadratic and harmonic cases at both levels");
  v.require(best.size() == 2 && drift(best[0], best[1]) < kPointwiseDrift,
            "max ratio drift " + f6(drift(best[0], best[1])));
  v.note("max ratio " + f6(best[0]) + " -> " + f6(best[1]));
  return v;
}

// Per-pair ratio drift for each (family, p).
void cz_drift(Verdict& v, const ExperimentResult& res, const char* tag) {
  std::map<std::string, std::map<int, double>> series;  // note + p -> level -> ratio
  for (const auto& r : res.reports) {
    if (r.note.find("pair") == std::string::npos) continue;
    v.require(r.ratio && std::isfinite(*r.ratio), std::string(tag) + " ratio not finite");
    series[r.note + " p=" + f6(r.p)][r.level] = r.ratio ? *r.ratio : NAN;
  }
  double worst = 0.0;
  for (const auto& [key, lv] : series) {
    v.require(lv.size() == 2, key + " missing a level");
    if (lv.size() == 2) worst = std::max(worst, drift(lv.at(0), lv.at(1)));
  }
  v.require(worst < kCzDrift, std::string(tag) + " worst drift " + f6(worst));
  v.require(series.size() == 2 * 10 * 2, std::string(tag) + " expected 40 series");
  v.note(std::string(tag) + " worst drift " + f6(worst));
}

Verdict criterion6() {
  Verdict v;
  auto cz = [](ExperimentConfig& c) {
    c.ps = {1.5, 3.0};
    c.corpus.count = 10;
  };
  cz_drift(v, run("cz_elliptic_report", cz), "elliptic");
  cz_drift(v, run("cz_parabolic_report", cz), "parabolic");
  const auto sh = run("sharpness_demo_pinf", [](ExperimentConfig& c) { c.grids = {32, 64, 128, 256}; });
  v.require(sh.reports.size() == 4, "sharpness needs 4 levels");
  for (std::size_t i = 1; i < sh.reports.size(); ++i) {
    const auto& a = sh.reports[i - 1];
    const auto& b = sh.reports[i];
    v.require(*b.ratio > *a.ratio, "L^inf ratio not increasing at level " + std::to_string(i));
    v.require(drift(a.extra("p4_ratio"), b.extra("p4_ratio")) < kP4Drift,
              "p=4 drift " + f6(drift(a.extra("p4_ratio"), b.extra("p4_ratio"))));
  }
  if (sh.reports.size() == 4)
    v.note("L^inf ratio " + f6(*sh.reports.front().ratio) + " -> " + f6(*sh.reports.back().ratio) + ", p=4 " +
           f6(sh.reports.front().extra("p4_ratio")) + " -> " + f6(sh.reports.back().extra("p4_ratio")));
  return v;
}

Verdict criterion7() {
  Verdict v;
  const auto th = run("theta_profile");
  std::size_t sets = 0;
  for (const auto& r : th.reports) {
    ++sets;
    v.require(r.extra("monotone") == 1.0, "Theta not monotone (" + r.note + ")");
    v.require(r.extra("selection_holds") == 1.0, "selection inequality fails (" + r.note + ")");
  }
  std::size_t states = 0;
  for (const char* name : {"blowup_rescale", "blowup_rescale_parabolic"}) {
    const auto res = run(name);
    std::size_t here = 0;
    for (const auto& r : res.reports) {
      ++here;
      const double avg = std::max({std::abs(r.extra("mean_v")), std::abs(r.extra("mean_grad")),
                                   std::abs(r.extra("mean_hess")), std::abs(r.extra("mean_dt"))});
      v.require(avg <= kAverageTol, std::string(name) + " average " + f6(avg));
      v.require(r.lhs >= kEnergyLo && r.lhs <= kEnergyHi, std::string(name) + " energy " + f6(r.lhs));
    }
    v.require(here > 0, std::string(name) + " produced no states");
    states += here;
  }
  v.note(std::to_string(sets) + " Theta sets, " + std::to_string(states) + " rescaled states");
  return v;
}

Verdict criterion8() {
  Verdict v;
  const auto res = run("poly_growth_check");
  double worst = 0.0;
  bool saw_t = false;
  std::size_t fitted = 0;
  for (const auto& r : res.reports) {
    if (r.degenerate) continue;
    ++fitted;
    const double two_n = r.rhs;
    worst = std::max(worst, std::abs(r.lhs - two_n));
    v.require(std::abs(r.lhs - two_n) <= kExponentTol, r.note + " exponent " + f6(r.lhs) + " vs " + f6(two_n));
    if (r.note == "1*t") {
      saw_t = true;
      const double c = r.extra("c");
      v.require(std::abs(c - kTConstant) <= kTConstantRel * kTConstant, "c(t) = " + f6(c));
      v.note("c(t) " + f6(c));
    }
  }
  v.require(saw_t, "no report for p = t");
  v.require(fitted == 49, "expected 49 nonconstant monomials, got " + std::to_string(fitted));
  v.note("max |sigma - 2N| " + f6(worst));
  return v;
}

Verdict criterion9() {
  Verdict v;
  auto factors = [&](const ExperimentResult& res, const std::string& note) {
    std::vector<double> d;
    for (const auto& r : res.reports)
      if (r.note == note) d.push_back(r.lhs);
    v.require(d.size() >= 2, res.name + " needs two levels");
    for (std::size_t i = 1; i < d.size(); ++i) {
      const double f = d[i - 1] / d[i];
      v.require(std::abs(f - kDualityFactor) <= kDualityRel * kDualityFactor, res.name + " factor " + f6(f));
      v.note(res.name + " " + f6(f));
    }
  };
  const auto ell = run("duality_identity_check");
  factors(ell, "u bump, v solved");
  double sym = 0.0;
  for (const auto& r : ell.reports)
    if (r.note == "v = u") sym = std::max(sym, r.ratio ? *r.ratio : 0.0);
  v.require(sym <= kSymmetricTol, "symmetric defect " + f6(sym));
  factors(run("parabolic_duality_check"), "u = t bump, v solved");
  v.note("symmetric " + f6(sym));
  return v;
}

Verdict criterion10() {
  Verdict v;
  const auto mv = run("mean_value_check");
  for (const auto& r : mv.reports) {
    v.require(r.lhs <= kMeanValueC * h2(r), r.note + " defect " + f6(r.lhs) + " > h^2 = " + f6(h2(r)));
    if (r.note == "x1^3-3x1x2^2") v.note("cubic defect/h^2 " + f6(r.lhs / h2(r)));
  }
  const auto gb = run("growth_bound_check");
  double worst = 0.0;
  for (const auto& r : gb.reports) {
    if (r.degenerate) continue;
    const double spread = r.lhs / r.rhs;
    worst = std::max(worst, spread);
    v.require(spread <= kGrowthSpread, r.note + " C_R spread " + f6(spread));
  }
  v.note("max C_R spread " + f6(worst));
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Verdict criterion11() {
  Verdict v;
  const fs::path base = fs::temp_directory_path() / ("czlab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);
  double worst = 0.0;
  for (const char* run_dir : {"a", "b"}) {
    const std::string cmd = std::string("'") + CZLAB_BIN + "' run --seed " + std::to_string(kSeed) + " --jobs " +
                            std::to_string(kJobs) + " --out '" + (base / run_dir).string() + "' > '" +
                            (base / (std::string(run_dir) + ".log")).string() + "' 2>&1";
    const auto t0 = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    worst = std::max(worst, secs);
    v.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, std::string("suite run ") + run_dir + " exit status " +
                                                                 std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
    v.note(std::string("run ") + run_dir + " " + f6(secs) + " s");
  }
  for (const char* file : {"reports.json", "reports.csv", "summary.txt"}) {
    const std::string a = slurp(base / "a" / file);
    v.require(!a.empty() && a == slurp(base / "b" / file), std::string(file) + " differs between runs");
  }
  v.require(worst < kSuiteSeconds, "suite took " + f6(worst) + " s");
  fs::remove_all(base);
  return v;
}

}  // namespace

int main() {
  const std::pair<const char*, Verdict (*)()> criteria[] = {
      {"maximal operator: mask path equals brute force bitwise", criterion1},
      {"closed-form sharp maximal values", criterion2},
      {"p=2 identity error bounds and contraction", criterion3},
      {"Fefferman-Stein sandwich ratios stable", criterion4},
      {"pointwise estimate stable, trivial cases zero", criterion5},
      {"CZ ratios stable; L^inf ratio grows, p=4 stays", criterion6},
      {"blow-up normalisation, Theta monotone, selection", criterion7},
      {"polynomial growth exponent 2N", criterion8},
      {"duality defects contract by 4", criterion9},
      {"harmonic mean value and growth bound", criterion10},
      {"full suite deterministic and under 10 minutes", criterion11},
  };
  int failed = 0, index = 0;
  for (const auto& [title, fn] : criteria) {
    ++index;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("threw: ") + e.what();
    }
    failed += v.ok ? 0 : 1;
    std::printf("%s %2d %s (%s)\n", v.ok ? "PASS" : "FAIL", index, title, v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
