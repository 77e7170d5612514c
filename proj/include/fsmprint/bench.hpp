#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fsmprint/dot.hpp"
#include "fsmprint/incremental.hpp"
#include "fsmprint/synthetic.hpp"
#include "fsmprint/tls_toy.hpp"

namespace fsmprint {

enum class SourceKind { Synthetic, TlsToy, TlsToyExample, DotDirectory };

struct SyntheticParams {
  std::size_t models = 6;
  std::size_t min_states = 8;
  std::size_t max_states = 15;
  std::size_t inputs = 3;
  std::size_t outputs = 3;
  /// Extra models derived from random base models by mutation.
  std::size_t mutants = 0;
};

/// Which models the run starts with.
struct InitialSelector {
  enum Kind { None, All, First } kind = None;
  std::size_t count = 0;
};

inline InitialSelector parse_initial_selector(const std::string& s) {
  if (s == "none") return {};
  if (s == "all") return {InitialSelector::All, 0};
  if (s.rfind("first:", 0) == 0) {
    try {
      return {InitialSelector::First, std::stoul(s.substr(6))};
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("initial models must be none, all or first:N, got '" + s + "'");
}

inline std::string to_string(const InitialSelector& s) {
  switch (s.kind) {
    case InitialSelector::None: return "none";
    case InitialSelector::All: return "all";
    case InitialSelector::First: return "first:" + std::to_string(s.count);
  }
  return "none";
}

/// Algorithms a bench run can compare.
enum class Algorithm { Incremental, RLSharp, RALSharp };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Incremental: return "incremental";
    case Algorithm::RLSharp: return "rl#";
    case Algorithm::RALSharp: return "ral#";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "incremental") return Algorithm::Incremental;
  if (s == "rl#" || s == "rlsharp") return Algorithm::RLSharp;
  if (s == "ral#" || s == "ralsharp") return Algorithm::RALSharp;
  throw ConfigError("unknown algorithm '" + std::string(s) + "'");
}

struct ExperimentSpec {
  std::string name = "experiment";
  SourceKind source = SourceKind::Synthetic;
  std::string dot_dir;
  SyntheticParams synthetic;
  std::size_t copies = 1;
  InitialSelector initial;
  std::vector<Algorithm> algorithms{Algorithm::Incremental};
  PipelineConfig pipeline;
  std::vector<std::uint64_t> seeds{1};
  /// Replications run concurrently when > 1.
  std::size_t jobs = 1;

  void validate() const {
    if (copies == 0) throw ConfigError("copies must be at least 1");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    auto sorted = seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("seeds must be distinct");
    if (algorithms.empty()) throw ConfigError("at least one algorithm is required");
    if (jobs == 0) throw ConfigError("jobs must be at least 1");
    if (source == SourceKind::DotDirectory && dot_dir.empty())
      throw ConfigError("dot source needs a directory");
    if (source == SourceKind::Synthetic) {
      const auto& p = synthetic;
      if (p.min_states == 0 || p.min_states > p.max_states)
        throw ConfigError("synthetic state range is empty");
      if (p.inputs == 0 || p.outputs == 0) throw ConfigError("synthetic alphabets must be non-empty");
      if (p.max_states > 1 && p.outputs < 2)
        throw ConfigError("synthetic machines with several states need two outputs");
    }
    pipeline.validate();
  }
};

struct Suite {
  /// Distinct behaviours, named.
  std::vector<std::pair<std::string, MealyMachine>> models;
  std::vector<Implementation> impls;
  std::map<std::string, MealyMachine> ground_truth;
  std::vector<MealyMachine> initial_models;
};

namespace bench_detail {

inline std::vector<std::pair<std::string, MealyMachine>> synthetic_models(const SyntheticParams& p,
                                                                          std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<std::string, MealyMachine>> out;
  std::vector<MealyMachine> seen;
  auto fresh = [&](const MealyMachine& m) {
    for (const auto& o : seen)
      if (equivalent(o, m).equivalent()) return false;
    return true;
  };
  while (out.size() < p.models) {
    const auto n = uniform_between(rng, p.min_states, p.max_states);
    auto m = random_minimal_machine(rng, n, p.inputs, p.outputs);
    if (!fresh(m)) continue;
    seen.push_back(m);
    out.emplace_back("m" + std::to_string(out.size()), std::move(m));
  }
  const std::size_t bases = out.size();
  for (std::size_t i = 0; i < p.mutants && bases > 0; ++i) {
    const auto& base = out[i % bases].second;
    auto m = random_mutant(rng, base, seen);
    if (!m) continue;
    seen.push_back(*m);
    out.emplace_back("m" + std::to_string(i % bases) + "x" + std::to_string(i), std::move(*m));
  }
  return out;
}

inline Implementation simulated(std::string id, MealyMachine m) {
  return {std::move(id), [m = std::move(m)] { return make_simulated_sul(m); }};
}

}  // namespace bench_detail

/// Ground truths, implementations and initial models for one replication.
/// Synthetic suites depend on `seed`; the other sources do not.
inline Suite generate_suite(const ExperimentSpec& spec, std::uint64_t seed) {
  spec.validate();
  Suite suite;
  switch (spec.source) {
    case SourceKind::Synthetic:
      suite.models = bench_detail::synthetic_models(spec.synthetic, seed);
      break;
    case SourceKind::TlsToy:
    case SourceKind::TlsToyExample: {
      auto ms = tls_toy_models();
      for (std::size_t i = 0; i < ms.size(); ++i) suite.models.emplace_back("M" + std::to_string(i), ms[i]);
      break;
    }
    case SourceKind::DotDirectory:
      suite.models = load_dot_directory(spec.dot_dir);
      break;
  }

  if (spec.source == SourceKind::TlsToyExample) {
    // I0..I3 behave like M0, M1, M2 and M1 again.
    const std::size_t pattern[] = {0, 1, 2, 1};
    for (std::size_t i = 0; i < 4; ++i) {
      const std::string id = "I" + std::to_string(i);
      const auto& m = suite.models[pattern[i]].second;
      suite.ground_truth.emplace(id, m);
      suite.impls.push_back(bench_detail::simulated(id, m));
    }
  } else {
    for (const auto& [name, m] : suite.models)
      for (std::size_t c = 0; c < spec.copies; ++c) {
        const std::string id = spec.copies == 1 ? name : name + "#" + std::to_string(c);
        suite.ground_truth.emplace(id, m);
        suite.impls.push_back(bench_detail::simulated(id, m));
      }
  }
  if (suite.impls.empty()) throw EmptySuite();

  std::size_t initial = 0;
  if (spec.initial.kind == InitialSelector::All) initial = suite.models.size();
  if (spec.initial.kind == InitialSelector::First)
    initial = std::min(spec.initial.count, suite.models.size());
  for (std::size_t i = 0; i < initial; ++i) suite.initial_models.push_back(suite.models[i].second);
  return suite;
}

/// One replication of one algorithm.
struct MetricsRow {
  std::string benchmark;
  std::string algorithm;
  std::size_t correct_models = 0;
  double correct_pct = 0;
  double misclassification_rate = 0;
  std::size_t fingerprint_symbols = 0;
  std::size_t cq_symbols = 0;
  std::size_t learn_symbols = 0;
  std::size_t total_symbols = 0;
  std::size_t eq_queries = 0;
  std::uint64_t seed = 0;
};

struct RunOutcome {
  Algorithm algorithm = Algorithm::Incremental;
  std::uint64_t seed = 0;
  RunReport report;
  ClassificationVerdicts verdicts;
  MetricsRow metrics;
};

/// Mean and standard deviation of the numeric columns for one algorithm.
struct MetricsSummary {
  std::string benchmark;
  std::string algorithm;
  std::size_t runs = 0;
  std::map<std::string, std::pair<double, double>> columns;  // name -> (mean, sd)
};

struct ExperimentResult {
  std::vector<RunOutcome> runs;
  std::vector<MetricsRow> rows;
  std::vector<MetricsSummary> summary;
};

inline MetricsRow make_metrics(const std::string& benchmark, Algorithm algorithm, std::uint64_t seed,
                               const RunReport& report, const ClassificationVerdicts& v) {
  MetricsRow row;
  row.benchmark = benchmark;
  row.algorithm = std::string(to_string(algorithm));
  row.seed = seed;
  const std::size_t total = report.records.size();
  row.correct_models = total - v.misclassified;
  row.correct_pct = total ? 100.0 * static_cast<double>(row.correct_models) / static_cast<double>(total) : 0;
  row.misclassification_rate = v.rate;
  row.fingerprint_symbols = report.phase_total(Phase::Fingerprint).symbols;
  row.cq_symbols = report.phase_total(Phase::Fcq).symbols;
  row.learn_symbols = report.phase_total(Phase::Learn).symbols;
  row.total_symbols = row.fingerprint_symbols + row.cq_symbols + row.learn_symbols;
  row.eq_queries = report.eq_queries();
  return row;
}

inline RunOutcome run_replication(const ExperimentSpec& spec, Algorithm algorithm, std::uint64_t seed) {
  const Suite suite = generate_suite(spec, seed);
  PipelineConfig cfg = spec.pipeline;
  cfg.seed = seed;
  RunOutcome out;
  out.algorithm = algorithm;
  out.seed = seed;
  switch (algorithm) {
    case Algorithm::Incremental:
      out.report = incremental_fingerprinting(suite.impls, suite.initial_models, cfg);
      break;
    case Algorithm::RLSharp:
      out.report = run_baseline(BaselineKind::RLSharp, suite.impls, suite.initial_models, cfg);
      break;
    case Algorithm::RALSharp:
      out.report = run_baseline(BaselineKind::RALSharp, suite.impls, suite.initial_models, cfg);
      break;
  }
  out.verdicts = misclassification_check(out.report, suite.ground_truth);
  out.metrics = make_metrics(spec.name, algorithm, seed, out.report, out.verdicts);
  return out;
}

inline std::vector<std::pair<std::string, double>> numeric_columns(const MetricsRow& r) {
  return {{"correct_models", static_cast<double>(r.correct_models)},
          {"correct_pct", r.correct_pct},
          {"misclassification_rate", r.misclassification_rate},
          {"fingerprint_symbols", static_cast<double>(r.fingerprint_symbols)},
          {"cq_symbols", static_cast<double>(r.cq_symbols)},
          {"learn_symbols", static_cast<double>(r.learn_symbols)},
          {"total_symbols", static_cast<double>(r.total_symbols)},
          {"eq_queries", static_cast<double>(r.eq_queries)}};
}

/// Sample mean and standard deviation (n - 1 denominator; 0 for one run).
inline std::vector<MetricsSummary> summarize(const std::vector<MetricsRow>& rows) {
  std::vector<MetricsSummary> out;
  std::vector<std::string> order;
  std::map<std::string, std::vector<const MetricsRow*>> groups;
  for (const auto& r : rows) {
    if (!groups.count(r.algorithm)) order.push_back(r.algorithm);
    groups[r.algorithm].push_back(&r);
  }
  for (const auto& algo : order) {
    const auto& g = groups[algo];
    MetricsSummary s;
    s.benchmark = g.front()->benchmark;
    s.algorithm = algo;
    s.runs = g.size();
    for (const auto& [name, _] : numeric_columns(*g.front())) {
      std::vector<double> xs;
      for (const auto* r : g)
        for (const auto& [n, v] : numeric_columns(*r))
          if (n == name) xs.push_back(v);
      double mean = 0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      double var = 0;
      for (double x : xs) var += (x - mean) * (x - mean);
      const double sd = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
      s.columns[name] = {mean, sd};
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Every (algorithm, seed) pair; results are ordered by algorithm, then seed,
/// regardless of `jobs`.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<std::pair<Algorithm, std::uint64_t>> work;
  for (auto a : spec.algorithms)
    for (auto s : spec.seeds) work.emplace_back(a, s);

  ExperimentResult result;
  result.runs.resize(work.size());
  if (spec.jobs <= 1) {
    for (std::size_t i = 0; i < work.size(); ++i)
      result.runs[i] = run_replication(spec, work[i].first, work[i].second);
  } else {
    for (std::size_t start = 0; start < work.size(); start += spec.jobs) {
      std::vector<std::future<RunOutcome>> batch;
      const std::size_t end = std::min(work.size(), start + spec.jobs);
      for (std::size_t i = start; i < end; ++i)
        batch.push_back(std::async(std::launch::async, run_replication, std::cref(spec),
                                   work[i].first, work[i].second));
      for (std::size_t i = start; i < end; ++i) result.runs[i] = batch[i - start].get();
    }
  }
  for (const auto& r : result.runs) result.rows.push_back(r.metrics);
  result.summary = summarize(result.rows);
  return result;
}

// ---- flat key = value configuration ----

namespace bench_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || v.front() == '-')
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  return x;
}

}  // namespace bench_detail

/// Seed list: comma separated values and inclusive ranges `a..b`.
inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : bench_detail::split(text, ',')) {
    if (auto dots = part.find(".."); dots != std::string::npos) {
      const auto a = bench_detail::to_u64("seeds", part.substr(0, dots));
      const auto b = bench_detail::to_u64("seeds", part.substr(dots + 2));
      if (b < a) throw ConfigError("empty seed range '" + part + "'");
      for (auto s = a; s <= b; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(bench_detail::to_u64("seeds", part));
    }
  }
  return seeds;
}

inline SourceKind parse_source(const std::string& v, std::string* dir) {
  if (v == "synthetic") return SourceKind::Synthetic;
  if (v == "tls-toy") return SourceKind::TlsToy;
  if (v == "tls-toy-example") return SourceKind::TlsToyExample;
  if (v.rfind("dot:", 0) == 0) {
    if (dir) *dir = v.substr(4);
    return SourceKind::DotDirectory;
  }
  throw ConfigError("unknown source '" + v + "'");
}

/// Applies one configuration entry to `spec`.
inline void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  using bench_detail::to_u64;
  if (key == "name") spec.name = value;
  else if (key == "source") spec.source = parse_source(value, &spec.dot_dir);
  else if (key == "copies") spec.copies = to_u64(key, value);
  else if (key == "models") spec.synthetic.models = to_u64(key, value);
  else if (key == "min_states") spec.synthetic.min_states = to_u64(key, value);
  else if (key == "max_states") spec.synthetic.max_states = to_u64(key, value);
  else if (key == "inputs") spec.synthetic.inputs = to_u64(key, value);
  else if (key == "outputs") spec.synthetic.outputs = to_u64(key, value);
  else if (key == "mutants") spec.synthetic.mutants = to_u64(key, value);
  else if (key == "initial") spec.initial = parse_initial_selector(value);
  else if (key == "algorithms") {
    spec.algorithms.clear();
    for (const auto& a : bench_detail::split(value, ',')) spec.algorithms.push_back(parse_algorithm(a));
  } else if (key == "fingerprint") spec.pipeline.fingerprinting = parse_fingerprint_kind(value);
  else if (key == "fcq") spec.pipeline.fcq = parse_cq_config(value);
  else if (key == "lcq") spec.pipeline.lcq = parse_cq_config(value);
  else if (key == "learner") spec.pipeline.learner = parse_learner_kind(value);
  else if (key == "budget") spec.pipeline.budget = to_u64(key, value);
  else if (key == "shuffle_seed") spec.pipeline.shuffle_seed = to_u64(key, value);
  else if (key == "seeds") spec.seeds = parse_seed_list(value);
  else if (key == "jobs") spec.jobs = to_u64(key, value);
  else throw ConfigError("unknown setting '" + key + "'");
}

/// Parses `key = value` lines; `#` starts a comment. Later keys win.
inline ExperimentSpec parse_experiment_config(const std::string& text) {
  ExperimentSpec spec;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // a comment starts at a '#' at the beginning of a line or after whitespace,
    // so values such as rl# survive
    for (std::size_t i = 0; i < line.size(); ++i)
      if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
        line.resize(i);
        break;
      }
    line = bench_detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const auto key = bench_detail::trim(line.substr(0, eq));
    const auto value = bench_detail::trim(line.substr(eq + 1));
    try {
      apply_setting(spec, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  spec.validate();
  return spec;
}

inline ExperimentSpec load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_text_file(path));
}

}  // namespace fsmprint
