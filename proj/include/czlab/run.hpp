#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "czlab/experiments.hpp"

namespace czlab {

/// Exit 2 from the command-line runner.
struct UnknownExperiment : std::invalid_argument {
  std::string experiment;
  explicit UnknownExperiment(const std::string& name)
      : std::invalid_argument("unknown experiment '" + name + "'"), experiment(name) {}
};

/// Exit 3: unreadable config, unwritable output.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::uint64_t seed = 20240601;
  int n = 2;
  std::string out = "czlab-out";
  MaximalBackend backend = MaximalBackend::Mask;
  RadiusPolicy policy = RadiusPolicy::Geometric;
  int jobs = 1;
  bool dump_fields = false;
  std::vector<ExperimentConfig> experiments;
};

/// Every catalog experiment with its defaults.
RunConfig full_suite(std::uint64_t seed = 20240601);

/// INI file: an optional [run] section (seed, dimension, out, maximal_backend,
/// radius_ladder, jobs, dump_fields, experiments) and one section per
/// experiment (grids, p, corpus_count, corpus_family, plus the experiment's
/// own options). The experiment list is the `experiments` key if present,
/// otherwise the experiment sections in file order. Unknown keys are errors.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text);

/// Re-derives the per-experiment settings after run-level fields changed
/// (seed, dimension, backend, ladder, dump flag).
void propagate(RunConfig& rc);

/// Replaces the experiment list by `names`, keeping sections already
/// configured and using catalog defaults for the rest.
void select_experiments(RunConfig& rc, const std::vector<std::string>& names);

std::string reports_json(const RunConfig& rc, const std::vector<ExperimentResult>& results);
std::string reports_csv(const std::vector<ExperimentResult>& results);
std::string summary_text(const std::vector<ExperimentResult>& results);
/// Catalog as JSON: {"schema": "czlab-catalog/1", "experiments": [...]}.
std::string catalog_json();
std::string catalog_text();

/// Writes reports.json, reports.csv, summary.txt and, if requested,
/// fields/<experiment>.<name>.czf into rc.out. Throws IoError.
void write_outputs(const RunConfig& rc, const std::vector<ExperimentResult>& results);

}  // namespace czlab
