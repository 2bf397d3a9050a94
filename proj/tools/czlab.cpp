// Experiment runner: `czlab run [--config FILE] ...` and `czlab list [--json]`.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "czlab/run.hpp"

using namespace czlab;

namespace {

struct RunFlags {
  std::string config;
  std::vector<std::string> experiments;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string backend;
  std::string ladder;
  std::optional<int> jobs;
  bool dump_fields = false;
  bool json = false;
};

int run(const RunFlags& f) {
  RunConfig rc = f.config.empty() ? full_suite() : load_run_config(f.config);
  if (f.seed) rc.seed = *f.seed;
  if (!f.out.empty()) rc.out = f.out;
  if (!f.backend.empty()) rc.backend = parse_backend(f.backend);
  if (!f.ladder.empty()) {
    if (f.ladder != "geometric" && f.ladder != "dense")
      throw std::invalid_argument("--radius-ladder must be geometric or dense");
    rc.policy = f.ladder == "dense" ? RadiusPolicy::Dense : RadiusPolicy::Geometric;
  }
  if (f.jobs) rc.jobs = *f.jobs;
  if (f.dump_fields) rc.dump_fields = true;
  propagate(rc);
  if (!f.experiments.empty()) select_experiments(rc, f.experiments);
  for (const auto& c : rc.experiments) validate(c);

  const auto results = run_experiments(rc.experiments, rc.jobs);
  write_outputs(rc, results);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed();
  if (f.json) std::cout << reports_json(rc, results);
  else std::cout << summary_text(results);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"czlab: measured constants of Calderon-Zygmund and maximal-function estimates"};
  app.require_subcommand(1);

  RunFlags f;
  auto* run_cmd = app.add_subcommand("run", "run experiments and write reports.json, reports.csv, summary.txt");
  run_cmd->add_option("--config", f.config, "INI run configuration");
  run_cmd->add_option("--experiment", f.experiments, "run only this experiment (repeatable)");
  run_cmd->add_option("--seed", f.seed, "corpus seed");
  run_cmd->add_option("--out", f.out, "output directory");
  run_cmd->add_option("--maximal-backend", f.backend, "mask | fft-like | brute");
  run_cmd->add_option("--radius-ladder", f.ladder, "geometric | dense");
  run_cmd->add_option("--jobs", f.jobs, "experiments run concurrently")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--dump-fields", f.dump_fields, "also write intermediate fields as .czf files");
  run_cmd->add_flag("--json", f.json, "print reports.json instead of the summary");

  bool list_json = false;
  auto* list_cmd = app.add_subcommand("list", "list the experiment catalog");
  list_cmd->add_flag("--json", list_json, "machine-readable catalog");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_cmd) {
      std::cout << (list_json ? catalog_json() : catalog_text());
      return 0;
    }
    return run(f);
  } catch (const UnknownExperiment& e) {
    std::cerr << "czlab: unknown experiment: " << e.experiment << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "czlab: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "czlab: " << e.what() << "\n";
    return 1;
  }
}
