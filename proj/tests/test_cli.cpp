#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "czlab/run.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace czlab;
namespace fs = std::filesystem;

namespace {

std::string bin() {
  const char* b = std::getenv("CZLAB_BIN");
  REQUIRE_MESSAGE(b != nullptr, "CZLAB_BIN not set");
  return b;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("czlab_cli_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome invoke(const std::string& args, const fs::path& dir) {
  const fs::path o = dir / "stdout.txt", e = dir / "stderr.txt";
  const std::string cmd = "'" + bin() + "' " + args + " > '" + o.string() + "' 2> '" + e.string() + "'";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), slurp(o), slurp(e)};
}

}  // namespace

TEST_CASE("empty experiment list exits 0 with empty reports") {
  const auto dir = scratch("empty");
  write(dir / "run.ini", "[run]\nseed = 5\n");
  const auto r = invoke("run --config '" + (dir / "run.ini").string() + "' --out '" + (dir / "out").string() + "'", dir);
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "out" / "reports.json"));
  CHECK(j["schema"] == "czlab-reports/1");
  CHECK(j["seed"] == 5);
  CHECK(j["experiments"].empty());
  const std::string csv = slurp(dir / "out" / "reports.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
  CHECK(fs::exists(dir / "out" / "summary.txt"));
}

TEST_CASE("unknown experiment exits 2 naming it") {
  const auto dir = scratch("unknown");
  auto r = invoke("run --experiment no_such_thing --out '" + (dir / "out").string() + "'", dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("no_such_thing") != std::string::npos);

  write(dir / "run.ini", "[run]\n[bogus_section]\ngrids = 64\n");
  r = invoke("run --config '" + (dir / "run.ini").string() + "' --out '" + (dir / "out").string() + "'", dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("bogus_section") != std::string::npos);

  write(dir / "list.ini", "[run]\nexperiments = p2_identity_check, typo_experiment\n");
  r = invoke("run --config '" + (dir / "list.ini").string() + "' --out '" + (dir / "out").string() + "'", dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("typo_experiment") != std::string::npos);
}

TEST_CASE("I/O failures exit 3") {
  const auto dir = scratch("io");
  write(dir / "blocker", "a file where a directory should be\n");
  write(dir / "run.ini", "[run]\n");
  auto r = invoke("run --config '" + (dir / "run.ini").string() + "' --out '" + (dir / "blocker" / "out").string() + "'", dir);
  CHECK(r.code == 3);
  r = invoke("run --config '" + (dir / "missing.ini").string() + "'", dir);
  CHECK(r.code == 3);
}

TEST_CASE("config errors exit 1") {
  const auto dir = scratch("config");
  const auto out = " --out '" + (dir / "out").string() + "'";
  const std::pair<const char*, const char*> bad[] = {
      {"unknown_key.ini", "[run]\ncolour = blue\n"},
      {"section_key.ini", "[p2_identity_check]\ngrid = 64\n"},
      {"decreasing.ini", "[p2_identity_check]\ngrids = 128, 64\n"},
      {"cap.ini", "[p2_identity_check]\ngrids = 128, 512\n"},
      {"p_one.ini", "[cz_elliptic_report]\np = 1, 2\n"},
      {"p_inf.ini", "[cz_elliptic_report]\np = inf\n"},
      {"backend.ini", "[run]\nmaximal_backend = gpu\n"},
      {"not_a_number.ini", "[run]\nseed = twelve\n"},
  };
  for (const auto& [name, text] : bad) {
    CAPTURE(name);
    write(dir / name, text);
    CHECK(invoke("run --config '" + (dir / name).string() + "'" + out, dir).code == 1);
  }
}

TEST_CASE("catalog lists every experiment with an anchor") {
  const auto dir = scratch("list");
  auto r = invoke("list --json", dir);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == "czlab-catalog/1");
  REQUIRE(j["experiments"].is_array());
  CHECK(j["experiments"].size() >= 14);
  for (const auto& e : j["experiments"]) {
    CHECK(e["name"].is_string());
    CHECK_FALSE(e["anchor"].get<std::string>().empty());
    CHECK_FALSE(e["description"].get<std::string>().empty());
    CHECK(e["default_grids"].is_array());
    CHECK(e["options"].is_array());
  }
  r = invoke("list", dir);
  CHECK(r.code == 0);
  for (const auto& info : experiment_catalog()) CHECK(r.out.find(info.name) != std::string::npos);
}

TEST_CASE("p2 identity over two grids") {
  const auto dir = scratch("p2");
  write(dir / "run.ini", "[p2_identity_check]\ngrids = 64, 128\n");
  const auto r = invoke("run --config '" + (dir / "run.ini").string() + "' --out '" + (dir / "out").string() + "'", dir);
  // the contraction rule passes; the error bound at 128 is checked as well
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "out" / "reports.json"));
  REQUIRE(j["experiments"].size() == 1);
  const auto& reps = j["experiments"][0]["reports"];
  REQUIRE(reps.size() == 2);
  CHECK(reps[0]["grid"]["points_per_axis"] == 65);
  CHECK(reps[1]["grid"]["points_per_axis"] == 129);
  const double e64 = std::abs(reps[0]["ratio"].get<double>() - 1.0);
  const double e128 = std::abs(reps[1]["ratio"].get<double>() - 1.0);
  CHECK(e128 < e64);
  const std::string csv = slurp(dir / "out" / "reports.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  const std::string summary = slurp(dir / "out" / "summary.txt");
  CHECK(summary.find("PASS error_contraction") != std::string::npos);
  CHECK(summary.find("overall: PASS") != std::string::npos);
}

TEST_CASE("same config and seed give identical reports at any job count") {
  const auto dir = scratch("determinism");
  write(dir / "run.ini",
        "[run]\nseed = 77\n"
        "[p2_identity_check]\ngrids = 32, 64\n"
        "[fefferman_stein_report]\ngrids = 32, 64\ncorpus_count = 3\np = 2, 3\n"
        "[theta_profile]\ngrids = 32, 64\ncorpus_count = 2\n"
        "[maximal_closed_form]\n");
  const std::string cfg = "run --config '" + (dir / "run.ini").string() + "'";
  invoke(cfg + " --jobs 1 --out '" + (dir / "a").string() + "'", dir);
  invoke(cfg + " --jobs 3 --out '" + (dir / "b").string() + "'", dir);
  const std::string a = slurp(dir / "a" / "reports.json");
  CHECK_FALSE(a.empty());
  CHECK(a == slurp(dir / "b" / "reports.json"));
  CHECK(slurp(dir / "a" / "reports.csv") == slurp(dir / "b" / "reports.csv"));
  CHECK(slurp(dir / "a" / "summary.txt") == slurp(dir / "b" / "summary.txt"));

  invoke(cfg + " --seed 78 --out '" + (dir / "c").string() + "'", dir);
  const auto ja = nlohmann::json::parse(a), jc = nlohmann::json::parse(slurp(dir / "c" / "reports.json"));
  // p2 has no corpus, so only the seed field differs; the corpus experiments change inputs
  CHECK(ja["experiments"][1]["inputs_hash"] != jc["experiments"][1]["inputs_hash"]);
  CHECK(ja["experiments"][0]["reports"][0]["lhs"] == jc["experiments"][0]["reports"][0]["lhs"]);
}

TEST_CASE("dump fields writes readable field files") {
  const auto dir = scratch("dump");
  write(dir / "run.ini", "[p2_identity_check]\ngrids = 32, 64\n");
  const auto r = invoke("run --dump-fields --config '" + (dir / "run.ini").string() + "' --out '" + (dir / "out").string() + "'", dir);
  CHECK(r.code == 0);
  const auto f = load_czf((dir / "out" / "fields" / "p2_identity_check.v_64.czf").string());
  CHECK(f.grid.space().points_per_axis() == 65);
  CHECK(f.channels == 1);
}

TEST_CASE("config parsing") {
  auto rc = parse_run_config(
      "[run]\nseed = 9\ndimension = 3\nmaximal_backend = fft-like\nradius_ladder = dense\njobs = 2\n"
      "[cz_elliptic_report]\ngrids = 16, 32\np = 2\ncorpus_family = radial-power\ncorpus_count = 4\n"
      "[p2_identity_check]\nrecipe = pos(1-x1^2-x2^2)^5\n");
  REQUIRE(rc.experiments.size() == 2);
  const auto& cz = rc.experiments[0];
  CHECK(cz.name == "cz_elliptic_report");
  CHECK(cz.n == 3);
  CHECK(cz.grids == std::vector<Index>{16, 32});
  CHECK(cz.ps == std::vector<double>{2.0});
  CHECK(cz.corpus.seed == 9);
  CHECK(cz.corpus.count == 4);
  CHECK(cz.corpus.family == CorpusFamily::RadialPower);
  CHECK(cz.backend == MaximalBackend::FftLike);
  CHECK(cz.policy == RadiusPolicy::Dense);
  // fixed two-dimensional experiments ignore the run dimension
  CHECK(rc.experiments[1].n == 2);
  CHECK(rc.experiments[1].option("recipe", std::string()) == "pos(1-x1^2-x2^2)^5");

  // overrides survive a change of run-level settings
  rc.seed = 10;
  rc.backend = MaximalBackend::Mask;
  propagate(rc);
  CHECK(rc.experiments[0].corpus.seed == 10);
  CHECK(rc.experiments[0].grids == std::vector<Index>{16, 32});
  CHECK(rc.experiments[0].backend == MaximalBackend::Mask);

  select_experiments(rc, {"p2_identity_check", "theta_profile"});
  REQUIRE(rc.experiments.size() == 2);
  CHECK(rc.experiments[0].options.count("recipe") == 1);
  CHECK(rc.experiments[1].grids == find_experiment("theta_profile")->default_grids);

  // the experiments key picks and orders the list
  const auto listed = parse_run_config("[run]\nexperiments = theta_profile, p2_identity_check\n[p2_identity_check]\ngrids = 64\n");
  REQUIRE(listed.experiments.size() == 2);
  CHECK(listed.experiments[0].name == "theta_profile");
  CHECK(listed.experiments[1].grids == std::vector<Index>{64});

  CHECK(full_suite().experiments.size() == experiment_catalog().size());
  CHECK_THROWS_AS(parse_run_config("[nope]\n"), UnknownExperiment);
  CHECK_THROWS_AS(parse_run_config("[p2_identity_check]\ngrids = 64, 64\n"), std::invalid_argument);
}

TEST_CASE("inputs hash") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  const auto& info = *find_experiment("fefferman_stein_report");
  auto a = default_config(info, 1), b = default_config(info, 1);
  CHECK(inputs_hash(a) == inputs_hash(b));
  b.corpus.seed = 2;
  CHECK(inputs_hash(a) != inputs_hash(b));
  b = a;
  b.grids = {32, 64};
  CHECK(inputs_hash(a) != inputs_hash(b));
}
