#include "czlab/run.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace czlab {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument("'" + key + "': not an integer: '" + s + "'");
  return v;
}

double to_p(const std::string& key, const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument("'" + key + "': not a number: '" + s + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("'" + key + "': expected true or false, got '" + s + "'");
}

RadiusPolicy parse_ladder(const std::string& s) {
  if (s == "geometric") return RadiusPolicy::Geometric;
  if (s == "dense") return RadiusPolicy::Dense;
  throw std::invalid_argument("radius ladder must be geometric or dense, got '" + s + "'");
}

const char* ladder_name(RadiusPolicy p) { return p == RadiusPolicy::Dense ? "dense" : "geometric"; }

// Section overrides that survive re-derivation from the run-level fields.
struct Overrides {
  std::vector<Index> grids;
  bool has_grids = false;
  std::vector<double> ps;
  bool has_ps = false;
  int corpus_count = -1;
  std::string family;
  std::map<std::string, std::string> options;
};

ExperimentConfig derive(const RunConfig& rc, const std::string& name, const Overrides& o) {
  const ExperimentInfo* info = find_experiment(name);
  if (!info) throw UnknownExperiment(name);
  ExperimentConfig c = default_config(*info, rc.seed);
  if (info->kind == GridKind::Spatial || info->kind == GridKind::SpaceTime || info->kind == GridKind::None) c.n = rc.n;
  c.backend = rc.backend;
  c.policy = rc.policy;
  c.dump_fields = rc.dump_fields;
  if (o.has_grids) c.grids = o.grids;
  if (o.has_ps) c.ps = o.ps;
  if (o.corpus_count >= 0) c.corpus.count = o.corpus_count;
  if (!o.family.empty()) c.corpus.family = parse_family(o.family);
  c.options = o.options;
  return c;
}

Overrides overrides_of(const ExperimentConfig& c, const ExperimentInfo& info) {
  Overrides o;
  o.has_grids = c.grids != info.default_grids;
  o.grids = c.grids;
  o.has_ps = c.ps != info.default_ps;
  o.ps = c.ps;
  if (c.corpus.count != info.default_corpus_count) o.corpus_count = c.corpus.count;
  if (c.corpus.family != info.default_family) o.family = to_string(c.corpus.family);
  o.options = c.options;
  return o;
}

std::string num17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json report_json(const EstimateReport& r) {
  ordered_json j;
  j["label"] = r.label;
  j["p"] = std::isinf(r.p) ? ordered_json("inf") : ordered_json(r.p);
  j["level"] = r.level;
  ordered_json g;
  g["n"] = r.grid.n;
  g["points_per_axis"] = r.grid.points_per_axis;
  g["h"] = r.grid.h;
  if (r.grid.has_time) {
    g["tau"] = r.grid.tau;
    g["slices"] = r.grid.slices;
  }
  j["grid"] = g;
  j["lhs"] = number_or_null(r.lhs);
  j["rhs"] = number_or_null(r.rhs);
  ordered_json terms = ordered_json::object();
  for (const auto& t : r.rhs_terms) terms[t.name] = number_or_null(t.value);
  j["rhs_terms"] = terms;
  j["ratio"] = r.ratio ? number_or_null(*r.ratio) : ordered_json(nullptr);
  j["degenerate"] = r.degenerate;
  j["points"] = r.points;
  j["seed"] = r.seed;
  ordered_json extras = ordered_json::object();
  for (const auto& e : r.extras) extras[e.name] = number_or_null(e.value);
  j["extras"] = extras;
  j["note"] = r.note;
  return j;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << text;
  os.close();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

RunConfig full_suite(std::uint64_t seed) {
  RunConfig rc;
  rc.seed = seed;
  for (const auto& info : experiment_catalog()) rc.experiments.push_back(derive(rc, info.name, {}));
  return rc;
}

void propagate(RunConfig& rc) {
  for (auto& c : rc.experiments) {
    const ExperimentInfo* info = find_experiment(c.name);
    if (!info) throw UnknownExperiment(c.name);
    c = derive(rc, c.name, overrides_of(c, *info));
  }
}

void select_experiments(RunConfig& rc, const std::vector<std::string>& names) {
  std::vector<ExperimentConfig> out;
  for (const auto& name : names) {
    auto it = std::find_if(rc.experiments.begin(), rc.experiments.end(), [&](const auto& c) { return c.name == name; });
    out.push_back(it != rc.experiments.end() ? *it : derive(rc, name, {}));
  }
  rc.experiments = std::move(out);
}

RunConfig parse_run_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  RunConfig rc;
  std::vector<std::string> listed;
  bool has_list = false;
  std::vector<std::pair<std::string, Overrides>> sections;
  for (const auto& [key, node] : tree)
    if (node.empty() && !node.data().empty()) throw std::invalid_argument("config: key '" + key + "' outside a section");
  // read_ini drops sections without keys, but an empty experiment section
  // still selects that experiment; take the order from the headers.
  std::vector<std::string> headers;
  {
    std::istringstream hs(text);
    std::string line;
    while (std::getline(hs, line)) {
      line = trim(line);
      if (line.size() >= 2 && line.front() == '[' && line.back() == ']') headers.push_back(trim(line.substr(1, line.size() - 2)));
    }
  }
  const pt::ptree empty;
  for (const auto& section : headers) {
    const auto child = tree.get_child_optional(pt::ptree::path_type(section, '\0'));
    const pt::ptree& body = child ? *child : empty;
    if (section == "run") {
      for (const auto& [key, node] : body) {
        const std::string v = trim(node.data());
        if (key == "seed") rc.seed = static_cast<std::uint64_t>(to_integer(key, v));
        else if (key == "dimension") rc.n = static_cast<int>(to_integer(key, v));
        else if (key == "out") rc.out = v;
        else if (key == "maximal_backend") rc.backend = parse_backend(v);
        else if (key == "radius_ladder") rc.policy = parse_ladder(v);
        else if (key == "jobs") rc.jobs = static_cast<int>(to_integer(key, v));
        else if (key == "dump_fields") rc.dump_fields = to_bool(key, v);
        else if (key == "experiments") {
          has_list = true;
          listed = split_list(v);
        } else throw std::invalid_argument("config [run]: unknown key '" + key + "'");
      }
      continue;
    }
    const ExperimentInfo* info = find_experiment(section);
    if (!info) throw UnknownExperiment(section);
    Overrides o;
    for (const auto& [key, node] : body) {
      const std::string v = trim(node.data());
      if (key == "grids") {
        o.has_grids = true;
        for (const auto& g : split_list(v)) o.grids.push_back(static_cast<Index>(to_integer(key, g)));
      } else if (key == "p") {
        o.has_ps = true;
        for (const auto& p : split_list(v)) o.ps.push_back(to_p(key, p));
      } else if (key == "corpus_count") {
        o.corpus_count = static_cast<int>(to_integer(key, v));
        if (o.corpus_count < 0) throw std::invalid_argument("corpus_count must be >= 0");
      } else if (key == "corpus_family") {
        parse_family(v);
        o.family = v;
      } else if (std::find(info->option_keys.begin(), info->option_keys.end(), key) != info->option_keys.end()) {
        o.options[key] = v;
      } else {
        throw std::invalid_argument("config [" + section + "]: unknown key '" + key + "'");
      }
    }
    sections.emplace_back(section, std::move(o));
  }

  if (rc.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  auto section_of = [&](const std::string& name) -> const Overrides* {
    for (const auto& [s, o] : sections)
      if (s == name) return &o;
    return nullptr;
  };
  if (!has_list)
    for (const auto& [s, o] : sections) listed.push_back(s);
  for (const auto& name : listed) {
    const Overrides* o = section_of(name);
    rc.experiments.push_back(derive(rc, name, o ? *o : Overrides{}));
  }
  for (const auto& c : rc.experiments) validate(c);
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

std::string reports_json(const RunConfig& rc, const std::vector<ExperimentResult>& results) {
  ordered_json j;
  j["schema"] = "czlab-reports/1";
  j["seed"] = rc.seed;
  j["maximal_backend"] = to_string(rc.backend);
  j["radius_ladder"] = ladder_name(rc.policy);
  ordered_json exps = ordered_json::array();
  for (const auto& r : results) {
    ordered_json e;
    e["name"] = r.name;
    e["anchor"] = r.anchor;
    e["inputs_hash"] = r.inputs_hash;
    e["passed"] = r.passed();
    ordered_json rules = ordered_json::array();
    for (const auto& ru : r.rules) rules.push_back({{"name", ru.name}, {"passed", ru.passed}, {"detail", ru.detail}});
    e["rules"] = rules;
    ordered_json reps = ordered_json::array();
    for (const auto& rep : r.reports) reps.push_back(report_json(rep));
    e["reports"] = reps;
    exps.push_back(e);
  }
  j["experiments"] = exps;
  return j.dump(1) + "\n";
}

std::string reports_csv(const std::vector<ExperimentResult>& results) {
  std::string s = "experiment,label,level,p,n,points_per_axis,h,tau,slices,lhs,rhs,ratio,degenerate,points,seed,rhs_terms,extras,note\n";
  for (const auto& r : results)
    for (const auto& rep : r.reports) {
      std::string terms, extras;
      for (const auto& t : rep.rhs_terms) terms += (terms.empty() ? "" : ";") + t.name + "=" + num17(t.value);
      for (const auto& e : rep.extras) extras += (extras.empty() ? "" : ";") + e.name + "=" + num17(e.value);
      s += r.name + "," + rep.label + "," + std::to_string(rep.level) + "," + num17(rep.p) + "," + std::to_string(rep.grid.n) +
           "," + std::to_string(rep.grid.points_per_axis) + "," + num17(rep.grid.h) + "," +
           (rep.grid.has_time ? num17(rep.grid.tau) : "") + "," + std::to_string(rep.grid.slices) + "," + num17(rep.lhs) + "," +
           num17(rep.rhs) + "," + (rep.ratio ? num17(*rep.ratio) : "") + "," + (rep.degenerate ? "1" : "0") + "," +
           std::to_string(rep.points) + "," + std::to_string(rep.seed) + "," + csv_quote(terms) + "," + csv_quote(extras) + "," +
           csv_quote(rep.note) + "\n";
    }
  return s;
}

std::string summary_text(const std::vector<ExperimentResult>& results) {
  std::ostringstream os;
  std::size_t rules = 0, passed = 0;
  for (const auto& r : results) {
    os << r.name << "  [" << (r.passed() ? "PASS" : "FAIL") << "]\n";
    os << "  estimate: " << r.anchor << "\n";
    // measured constants per (label, p, level)
    std::vector<std::tuple<std::string, double, int>> keys;
    for (const auto& rep : r.reports) {
      const auto k = std::make_tuple(rep.label, rep.p, rep.level);
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
    for (const auto& [label, p, level] : keys) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      std::size_t count = 0, degenerate = 0;
      Index m = 0;
      for (const auto& rep : r.reports) {
        if (rep.label != label || rep.p != p || rep.level != level) continue;
        m = rep.grid.points_per_axis;
        ++count;
        if (!rep.ratio) {
          ++degenerate;
          continue;
        }
        lo = std::min(lo, *rep.ratio);
        hi = std::max(hi, *rep.ratio);
      }
      os << "  " << label << " p=" << (std::isinf(p) ? std::string("inf") : num6(p)) << " level " << level << " (m=" << m
         << "): ";
      if (count == degenerate) os << "degenerate";
      else if (lo == hi) os << "ratio " << num6(lo);
      else os << "ratio " << num6(lo) << " .. " << num6(hi);
      os << " over " << count << " report" << (count == 1 ? "" : "s");
      if (degenerate && count != degenerate) os << " (" << degenerate << " degenerate)";
      os << "\n";
    }
    for (const auto& ru : r.rules) {
      os << "  " << (ru.passed ? "PASS " : "FAIL ") << ru.name << ": " << ru.detail << "\n";
      ++rules;
      passed += ru.passed ? 1 : 0;
    }
    os << "\n";
  }
  os << "overall: " << (passed == rules ? "PASS" : "FAIL") << " (" << passed << "/" << rules << " rules, " << results.size()
     << " experiments)\n";
  return os.str();
}

std::string catalog_json() {
  ordered_json j;
  j["schema"] = "czlab-catalog/1";
  ordered_json exps = ordered_json::array();
  for (const auto& info : experiment_catalog()) {
    ordered_json e;
    e["name"] = info.name;
    e["anchor"] = info.anchor;
    e["description"] = info.description;
    e["default_grids"] = info.default_grids;
    ordered_json ps = ordered_json::array();
    for (double p : info.default_ps) ps.push_back(p);
    e["default_p"] = ps;
    e["corpus_count"] = info.default_corpus_count;
    e["options"] = info.option_keys;
    exps.push_back(e);
  }
  j["experiments"] = exps;
  return j.dump(1) + "\n";
}

std::string catalog_text() {
  std::ostringstream os;
  for (const auto& info : experiment_catalog()) {
    os << info.name << "\n  " << info.anchor << "\n  " << info.description << "\n";
  }
  return os.str();
}

void write_outputs(const RunConfig& rc, const std::vector<ExperimentResult>& results) {
  const fs::path dir(rc.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + rc.out + "'");
  write_file(dir / "reports.json", reports_json(rc, results));
  write_file(dir / "reports.csv", reports_csv(results));
  write_file(dir / "summary.txt", summary_text(results));
  if (!rc.dump_fields) return;
  const fs::path fdir = dir / "fields";
  fs::create_directories(fdir, ec);
  if (ec) throw IoError("cannot create '" + fdir.string() + "'");
  for (const auto& r : results)
    for (const auto& f : r.fields) {
      const fs::path p = fdir / (r.name + "." + f.name + ".czf");
      try {
        save_czf(p.string(), f.field);
      } catch (const std::exception& e) {
        throw IoError(e.what());
      }
    }
}

}  // namespace czlab
