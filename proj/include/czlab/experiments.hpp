#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "czlab/field_io.hpp"
#include "czlab/verify.hpp"

namespace czlab {

/// Settings for one experiment after merging run-level defaults, the
/// experiment's own section and command-line overrides.
struct ExperimentConfig {
  std::string name;
  int n = 2;
  std::vector<Index> grids;  // cells per axis, strictly increasing
  std::vector<double> ps;
  CorpusSpec corpus;
  MaximalBackend backend = MaximalBackend::Mask;
  RadiusPolicy policy = RadiusPolicy::Geometric;
  bool dump_fields = false;
  std::map<std::string, std::string> options;  // experiment-specific keys

  std::string option(const std::string& key, const std::string& fallback) const;
  double option(const std::string& key, double fallback) const;
  std::vector<double> option_list(const std::string& key, std::vector<double> fallback) const;
};

/// Whether a grid depends on the experiment's time axis; used for ladder caps.
enum class GridKind { Planar, Spatial, SpaceTime, None };

struct ExperimentInfo {
  std::string name;
  std::string anchor;       // the estimate or identity being measured
  std::string description;  // what is computed and what the rules check
  GridKind kind = GridKind::Planar;
  std::vector<Index> default_grids;
  std::vector<double> default_ps;
  int default_corpus_count = 0;
  CorpusFamily default_family = CorpusFamily::TrigPolynomial;
  std::vector<std::string> option_keys;
};

/// Every experiment the runner knows, in run order.
const std::vector<ExperimentInfo>& experiment_catalog();
const ExperimentInfo* find_experiment(const std::string& name);

/// Defaults of the catalog entry with the run-level seed, backend and ladder.
ExperimentConfig default_config(const ExperimentInfo& info, std::uint64_t seed);

/// Throws std::invalid_argument for grids that are not strictly increasing,
/// exceed the ladder cap, or p values outside (1, inf).
void validate(const ExperimentConfig& cfg);

struct Rule {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct DumpedField {
  std::string name;
  RawField field;
};

struct ExperimentResult {
  std::string name;
  std::string anchor;
  std::string inputs_hash;
  std::vector<EstimateReport> reports;
  std::vector<Rule> rules;
  std::vector<DumpedField> fields;

  bool passed() const;
  const Rule* rule(const std::string& name) const;
};

/// FNV-1a 64 of the canonical text form of the inputs, as 16 hex digits.
std::string inputs_hash(const ExperimentConfig& cfg);
std::string fnv1a_hex(const std::string& text);

/// Runs one experiment; throws std::invalid_argument for unknown names.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Runs the list with up to `jobs` experiments at a time; results come back
/// in list order.
std::vector<ExperimentResult> run_experiments(const std::vector<ExperimentConfig>& cfgs, int jobs = 1);

}  // namespace czlab
