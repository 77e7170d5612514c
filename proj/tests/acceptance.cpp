// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "fsmprint/fsmprint.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace fsmprint;
namespace fs = std::filesystem;
using fixtures::w;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Collects failure reasons for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok) ++count;
  }
  std::size_t count = 0;
};

int failed_criteria = 0;

void report(int n, const Check& c, const std::string& detail, double secs, double limit) {
  const bool ok = c.count == 0 && secs < limit;
  if (!ok) ++failed_criteria;
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << detail << " (" << std::fixed
            << std::setprecision(2) << secs << " s, limit " << limit << " s)\n";
  for (const auto& f : c.failures) std::cout << "    " << f << "\n";
  if (c.count > c.failures.size()) std::cout << "    ... " << c.count << " failures in total\n";
  if (secs >= limit) std::cout << "    runtime over limit\n";
  std::cout.flush();
}

Implementation simulated(std::string id, MealyMachine m) {
  return {std::move(id), [m] { return make_simulated_sul(m); }};
}

/// A random suite: pairwise inequivalent minimal models and shuffled copies.
struct RandomSuite {
  std::vector<MealyMachine> models;
  std::vector<Implementation> impls;
  std::map<std::string, MealyMachine> truth;
  std::size_t max_states = 0;
};

RandomSuite random_suite(std::uint64_t seed) {
  Rng rng(seed);
  RandomSuite s;
  const std::size_t count = uniform_between(rng, 3, 8);
  const std::size_t inputs = uniform_between(rng, 2, 4);
  const std::size_t outputs = uniform_between(rng, 2, 4);
  while (s.models.size() < count) {
    auto m = random_minimal_machine(rng, uniform_between(rng, 2, 15), inputs, outputs);
    bool dup = false;
    for (const auto& x : s.models) dup = dup || oracle::bisimilar(x, m);
    if (dup) continue;
    s.max_states = std::max(s.max_states, m.num_states());
    s.models.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < s.models.size(); ++i) {
    const std::size_t copies = uniform_between(rng, 1, 5);
    for (std::size_t c = 0; c < copies; ++c) {
      const std::string id = "m" + std::to_string(i) + "#" + std::to_string(c);
      s.truth.emplace(id, s.models[i]);
      s.impls.push_back(simulated(id, s.models[i]));
    }
  }
  std::shuffle(s.impls.begin(), s.impls.end(), rng);
  return s;
}

PipelineConfig perfect_pipeline(std::uint64_t seed) {
  PipelineConfig cfg;
  cfg.fcq = CqConfig::perfect();
  cfg.lcq = CqConfig::perfect();
  cfg.seed = seed;
  return cfg;
}

/// Every model of `got` is bisimilar to exactly one of `want` and vice versa.
bool same_model_set(const std::vector<MealyMachine>& got, const std::vector<MealyMachine>& want) {
  if (got.size() != want.size()) return false;
  for (const auto& g : got) {
    std::size_t hits = 0;
    for (const auto& x : want) hits += oracle::bisimilar(g, x) ? 1 : 0;
    if (hits != 1) return false;
  }
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(FSMPRINT_CLI) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---- criteria ----

void toy_goldens() {
  const auto t0 = Clock::now();
  Check c;
  const auto trio = tls_toy_models();
  const std::vector<MealyMachine> models(trio.begin(), trio.end());

  c.expect(shortest_separating_sequence(models[0], models[1]) == w({"hello", "hello"}), "M0/M1 separator");

  const auto fp = build_fingerprint(models);
  c.expect(fp.sequences == std::vector<Word>{w({"hello", "hello"}), w({"hello", "kex", "hello", "hello"})},
           "three-model fingerprint");

  {
    auto s = make_simulated_sul(models[2]);
    const auto r = adg_identify(s, models, fp);
    c.expect(r.match == 2u && r.order.size() == 1, "ADG identifies M2 with one sequence");
  }
  {
    const std::vector<MealyMachine> two{models[0], models[1]};
    const auto fp2 = build_fingerprint(two);
    auto s = make_simulated_sul(models[2]);
    const auto r = sepseq_identify(s, two, fp2, 0);
    c.expect(fp2.sequences == std::vector<Word>{w({"hello", "hello"})} && r.match == 1u,
             "M2 misclassified as M1 by {hello.hello}");
    Fingerprint other;
    other.add_pair(0, 1, w({"hello", "kex", "hello", "hello"}));
    auto s2 = make_simulated_sul(models[2]);
    c.expect(!sepseq_identify(s2, two, other, 0).match.has_value(), "M2 unmatched by {hello.kex.hello.hello}");
  }
  {
    std::vector<Implementation> impls{simulated("I0", models[0]), simulated("I1", models[1]),
                                      simulated("I2", models[2]), simulated("I3", models[1])};
    const auto report = incremental_fingerprinting(impls, {}, perfect_pipeline(0));
    const std::vector<Outcome> want{Outcome::LearnedFresh, Outcome::LearnedAfterMismatch,
                                    Outcome::LearnedAfterMismatch, Outcome::FcqMatch};
    bool phases = report.records.size() == 4;
    for (std::size_t i = 0; phases && i < 4; ++i) phases = report.records[i].outcome == want[i];
    c.expect(phases, "end-to-end phase trace");
    c.expect(same_model_set(report.models, models), "end-to-end model set");
    c.expect(report.mu().at("I1") == report.mu().at("I3"), "I1 and I3 share a model");
  }
  report(1, c, "toy machine goldens", seconds_since(t0), 1.0);
}

struct SuiteStats {
  std::size_t runs = 0, impls = 0, min_eq_slack = SIZE_MAX;
};

void open_world_suites(SuiteStats& stats, Check& eq_check) {
  const auto t0 = Clock::now();
  Check c;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = random_suite(1000 + seed);
    const auto report = incremental_fingerprinting(s.impls, {}, perfect_pipeline(seed));
    const auto v = misclassification_check(report, s.truth);
    const std::string tag = "suite " + std::to_string(seed);
    c.expect(v.misclassified == 0, tag + ": misclassified " + std::to_string(v.misclassified));
    c.expect(report.models.size() == s.models.size(), tag + ": model count");
    c.expect(same_model_set(report.models, s.models), tag + ": model set");
    c.expect(report.learner_invocations() == report.models.size() - report.initial_models,
             tag + ": learner invocations");
    const std::size_t bound = report.models.size() * s.max_states + s.impls.size();
    eq_check.expect(report.eq_queries() <= bound, tag + ": " + std::to_string(report.eq_queries()) +
                                                      " EQs > " + std::to_string(bound));
    stats.min_eq_slack = std::min(stats.min_eq_slack, bound - std::min(bound, report.eq_queries()));
    ++stats.runs;
    stats.impls += s.impls.size();
  }
  report(2, c, std::to_string(stats.runs) + " random suites, " + std::to_string(stats.impls) +
                   " implementations, perfect conformance queries",
         seconds_since(t0), 120.0);
}

void closed_world_suites() {
  const auto t0 = Clock::now();
  Check c;
  std::size_t runs = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = random_suite(1000 + seed);
    for (bool perfect : {true, false}) {
      auto cfg = perfect_pipeline(seed);
      if (!perfect) cfg.fcq = cfg.lcq = CqConfig::random_wp(100, 1, 5);
      const auto report = incremental_fingerprinting(s.impls, s.models, cfg);
      const std::string tag = "suite " + std::to_string(seed) + (perfect ? " perfect" : " randomwp");
      c.expect(same_model_set(report.models, s.models), tag + ": model set changed");
      c.expect(report.learner_invocations() == 0, tag + ": learner ran");
      c.expect(misclassification_check(report, s.truth).misclassified == 0, tag + ": misclassified");
      ++runs;
    }
  }
  report(3, c, std::to_string(runs) + " runs with every model known up front", seconds_since(t0), 120.0);
}

void efficiency_trend() {
  const auto t0 = Clock::now();
  ExperimentSpec spec;
  spec.name = "synthetic-6x5";
  spec.synthetic = {6, 8, 15, 3, 3, 0};
  spec.copies = 5;
  spec.algorithms = {Algorithm::Incremental, Algorithm::RLSharp};
  spec.pipeline.fcq = CqConfig::perfect();
  spec.pipeline.lcq = CqConfig::perfect();
  spec.seeds.clear();
  for (std::uint64_t s = 1; s <= 20; ++s) spec.seeds.push_back(s);
  const auto result = run_experiment(spec);
  std::map<std::uint64_t, std::pair<double, double>> totals;
  for (const auto& r : result.rows) {
    auto& t = totals[r.seed];
    (r.algorithm == "incremental" ? t.first : t.second) = static_cast<double>(r.total_symbols);
  }
  std::size_t good = 0;
  double worst = 0;
  for (const auto& [seed, t] : totals) {
    const double ratio = t.first / t.second;
    worst = std::max(worst, ratio);
    if (ratio <= 0.5) ++good;
  }
  Check c;
  c.expect(good >= 19, "only " + std::to_string(good) + "/20 seeds at ratio <= 0.5");
  std::ostringstream detail;
  detail << good << "/20 seeds with incremental/RL# symbols <= 0.5, worst ratio " << std::setprecision(3) << worst;
  report(5, c, detail.str(), seconds_since(t0), 300.0);
}

void wp_guarantee() {
  const auto t0 = Clock::now();
  Check c;
  Rng rng(6);
  std::size_t pairs = 0, inequivalent = 0;
  static constexpr MutationKind kinds[] = {MutationKind::DivertTransition, MutationKind::ChangeOutput,
                                           MutationKind::AddState, MutationKind::RemoveState};
  while (pairs < 500) {
    const auto m = random_minimal_machine(rng, uniform_between(rng, 1, 5), uniform_between(rng, 2, 3), 2);
    MealyMachine mutant = m;
    const std::size_t steps = uniform_between(rng, 1, 3);
    try {
      for (std::size_t i = 0; i < steps; ++i) mutant = mutate(mutant, kinds[index_below(rng, 4)], rng).machine;
    } catch (const MutationInapplicable&) {
      continue;
    }
    if (oracle::minimal_size(mutant) > m.num_states() + 2) continue;
    ++pairs;
    const bool equal = oracle::bisimilar(m, mutant);
    if (!equal) ++inequivalent;
    auto s = make_simulated_sul(mutant);
    const auto r = wp_conf_query(s, m, 2);
    if (!equal) c.expect(!r.passed, "pair " + std::to_string(pairs) + " passed Wp but differs");
    if (equal) c.expect(r.passed, "pair " + std::to_string(pairs) + " failed Wp but is equivalent");
  }
  report(6, c, std::to_string(pairs) + " pairs, " + std::to_string(inequivalent) + " inequivalent, Wp k=2",
         seconds_since(t0), 120.0);
}

void learner_exactness() {
  const auto t0 = Clock::now();
  Check c;
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto m = random_minimal_machine(rng, uniform_between(rng, 1, 20), uniform_between(rng, 2, 5),
                                          uniform_between(rng, 2, 4));
    const std::string tag = "machine " + std::to_string(i);
    {
      auto s = make_simulated_sul(m);
      c.expect(oracle::bisimilar(lsharp_learn(s, CqConfig::perfect()).model, m), tag + ": L# wrong");
    }
    {
      auto s = make_simulated_sul(m);
      const std::vector<MealyMachine> refs{m};
      const auto r = alsharp_learn(s, refs, CqConfig::perfect());
      c.expect(oracle::bisimilar(r.model, m), tag + ": AL# wrong");
      c.expect(r.eq_queries == 1, tag + ": AL# used " + std::to_string(r.eq_queries) + " EQs");
    }
  }
  report(7, c, "500 machines learned by L# and AL#", seconds_since(t0), 180.0);
}

void sampler() {
  const auto t0 = Clock::now();
  GeometricWalkLength g(3, 8.0);
  Rng rng(8);
  double sum = 0;
  std::size_t smallest = SIZE_MAX;
  for (int i = 0; i < 100000; ++i) {
    const auto n = g(rng);
    sum += static_cast<double>(n);
    smallest = std::min(smallest, n);
  }
  const double mean = sum / 100000.0;
  Check c;
  c.expect(mean >= 7.9 && mean <= 8.1, "mean out of range");
  c.expect(smallest >= 3, "walk shorter than 3");
  std::ostringstream detail;
  detail << "walk length mean " << std::setprecision(4) << mean << ", min " << smallest;
  report(8, c, detail.str(), seconds_since(t0), 10.0);
}

void cli_determinism() {
  const auto t0 = Clock::now();
  Check c;
  const fs::path data = FSMPRINT_DATA_DIR;
  const auto dir = fs::temp_directory_path() / "fsmprint_acceptance";
  fs::create_directories(dir);
  const std::string toy = (data / "tls_toy").string();
  const std::vector<std::pair<std::string, std::string>> runs{
      {"incremental.json", "incremental --impl dot:" + toy + "/M0.dot --impl dot:" + toy + "/M1.dot --impl dot:" +
                               toy + "/M2.dot --copies 2 --seed 3"},
      {"incremental.csv", "incremental --impl dot:" + toy + "/M2.dot --impl dot:" + toy +
                              "/M1.dot --models-dir " + toy + " --fingerprint sepseq --seed 9 --format csv"},
      {"baseline.json", "baseline ral# --impl dot:" + toy + "/M1.dot --impl dot:" + toy + "/M2.dot --seed 4"},
      {"learn.dot", "learn --impl dot:" + toy + "/M2.dot --lcq randomwp:20:1:4 --seed 2"},
      {"bench.csv", "bench " + (data / "configs" / "synthetic_randomwp.cfg").string() + " --format csv"},
      {"bench.json", "bench " + (data / "configs" / "toy_example.cfg").string()},
  };
  for (const auto& [name, args] : runs) {
    const auto a = dir / ("a_" + name), b = dir / ("b_" + name);
    const int ra = run_cli(args, a), rb = run_cli(args, b);
    c.expect(ra == 0 && rb == 0, name + ": exit status " + std::to_string(ra));
    const auto ta = slurp(a);
    c.expect(!ta.empty() && ta == slurp(b), name + ": outputs differ");
  }
  report(9, c, std::to_string(runs.size()) + " CLI invocations repeated byte-identically", seconds_since(t0),
         300.0);
}

void dot_round_trip() {
  const auto t0 = Clock::now();
  Check c;
  Rng rng(10);
  std::vector<MealyMachine> machines;
  for (int i = 0; i < 200; ++i)
    machines.push_back(random_machine(rng, uniform_between(rng, 1, 20), uniform_between(rng, 1, 5),
                                      uniform_between(rng, 1, 5)));
  for (const auto& m : tls_toy_models()) machines.push_back(m);
  for (std::size_t i = 0; i < machines.size(); ++i) {
    const auto back = parse_dot(serialize_dot(machines[i]));
    c.expect(oracle::isomorphic(machines[i], back), "machine " + std::to_string(i) + " changed");
  }
  const std::vector<std::pair<std::string, std::size_t>> malformed{
      {"digraph g {\n  a -> a [label=\"x/y\"];\n  a -> a [label=\"zz\"];\n  __start0 -> a;\n}\n", 3},
      {"digraph g {\n  a -> a [label=\"x/y/z\"];\n  __start0 -> a;\n}\n", 2},
      {"digraph g {\n  a -> a [label=\"/y\"];\n  __start0 -> a;\n}\n", 2},
      {"digraph g {\n  a -> a;\n  __start0 -> a;\n}\n", 2},
  };
  for (const auto& [text, line] : malformed) {
    try {
      parse_dot(text);
      c.expect(false, "malformed label accepted");
    } catch (const ParseError& e) {
      c.expect(e.line() == line && e.column() > 0, std::string("wrong position: ") + e.what());
    }
  }
  report(10, c, std::to_string(machines.size()) + " round trips, " + std::to_string(malformed.size()) +
                    " malformed fixtures",
         seconds_since(t0), 10.0);
}

}  // namespace

int main() {
  toy_goldens();
  SuiteStats stats;
  Check eq_check;
  open_world_suites(stats, eq_check);
  closed_world_suites();
  report(4, eq_check,
         "EQ count within m*n + i on " + std::to_string(stats.runs) + " suites, smallest slack " +
             std::to_string(stats.min_eq_slack),
         0.0, 1.0);
  efficiency_trend();
  wp_guarantee();
  learner_exactness();
  sampler();
  cli_determinism();
  dot_round_trip();
  std::cout << (failed_criteria == 0 ? "all criteria passed" : std::to_string(failed_criteria) + " criteria failed")
            << "\n";
  return failed_criteria == 0 ? 0 : 1;
}
