#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsmprint/conformance.hpp"
#include "fsmprint/fingerprint.hpp"
#include "fsmprint/learner.hpp"
#include "fsmprint/random.hpp"
#include "fsmprint/separation.hpp"
#include "fsmprint/sul.hpp"

namespace fsmprint {

enum class FingerprintKind { SepSeq, Adg };
enum class LearnerKind { LSharp, ALSharp };

inline std::string_view to_string(FingerprintKind k) { return k == FingerprintKind::Adg ? "adg" : "sepseq"; }
inline std::string_view to_string(LearnerKind k) { return k == LearnerKind::ALSharp ? "alsharp" : "lsharp"; }

inline FingerprintKind parse_fingerprint_kind(std::string_view s) {
  if (s == "adg") return FingerprintKind::Adg;
  if (s == "sepseq") return FingerprintKind::SepSeq;
  throw ConfigError("unknown fingerprinting method '" + std::string(s) + "'");
}

inline LearnerKind parse_learner_kind(std::string_view s) {
  if (s == "alsharp" || s == "al#") return LearnerKind::ALSharp;
  if (s == "lsharp" || s == "l#") return LearnerKind::LSharp;
  throw ConfigError("unknown learner '" + std::string(s) + "'");
}

/// Algorithm choices for one incremental run. The defaults are ADG,
/// RandomWp(100, 1..5) for both conformance queries, and AL#.
struct PipelineConfig {
  FingerprintKind fingerprinting = FingerprintKind::Adg;
  CqConfig fcq = CqConfig::random_wp(100, 1, 5);
  LearnerKind learner = LearnerKind::ALSharp;
  CqConfig lcq = CqConfig::random_wp(100, 1, 5);
  std::uint64_t seed = 0;
  /// Symbol cap per implementation, across all phases.
  std::optional<std::size_t> budget;
  /// Processes implementations in a seeded random order instead of input order.
  std::optional<std::uint64_t> shuffle_seed;

  void validate() const {
    fcq.validate();
    lcq.validate();
    if (budget && *budget == 0) throw ConfigError("budget must be positive");
  }
};

enum class Outcome { FcqMatch, LearnedFresh, LearnedAfterMismatch, Failed };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::FcqMatch: return "fcq_match";
    case Outcome::LearnedFresh: return "learned_fresh";
    case Outcome::LearnedAfterMismatch: return "learned_after_mismatch";
    case Outcome::Failed: return "failed";
  }
  return "?";
}

struct IdentifyOrLearnResult {
  MealyMachine model;
  /// Index of the reference that passed the conformance query.
  std::optional<std::size_t> matched;
  /// Fingerprint candidate, whether or not it passed.
  std::optional<std::size_t> candidate;
  Language language;
  Outcome outcome = Outcome::LearnedFresh;
  /// Learner equivalence queries plus one per conformance query on a candidate.
  std::size_t eq_queries = 0;
  bool learned = false;
  bool budget_exhausted = false;
};

namespace inc_detail {

inline std::vector<MealyMachine> aligned(std::span<const MealyMachine> models, const Alphabet& order) {
  std::vector<MealyMachine> out;
  out.reserve(models.size());
  for (const auto& m : models)
    out.push_back(m.inputs() == order ? m : reorder_inputs(m, order));
  return out;
}

}  // namespace inc_detail

/// Identifies the session's implementation among `models`, learning a new
/// model when no reference passes the conformance query. `models` must be
/// pairwise inequivalent. `fp`, when given, must be the fingerprint of
/// `models` in the session's input order.
inline IdentifyOrLearnResult identify_or_learn(SulSession& s, std::span<const MealyMachine> models,
                                               const PipelineConfig& cfg,
                                               const Fingerprint* fp = nullptr) {
  cfg.validate();
  IdentifyOrLearnResult r;
  std::vector<MealyMachine> local;
  if (!models.empty() && !(models.front().inputs() == s.inputs())) {
    local = inc_detail::aligned(models, s.inputs());
    models = local;
    fp = nullptr;
  }

  auto learn = [&](const Language& init) {
    r.learned = true;
    CqConfig eq = cfg.lcq.with_seed(derive_seed(cfg.seed, 3));
    auto res = cfg.learner == LearnerKind::ALSharp ? alsharp_learn(s, models, eq, init)
                                                   : lsharp_learn(s, eq, init);
    r.model = std::move(res.model);
    r.eq_queries += res.eq_queries;
    r.budget_exhausted = r.budget_exhausted || res.budget_exhausted;
    r.language = init;
    r.language.insert(res.executed.begin(), res.executed.end());
  };

  if (models.empty()) {
    r.outcome = Outcome::LearnedFresh;
    learn({});
    return r;
  }

  Language lf;
  if (models.size() == 1) {
    r.candidate = 0;
  } else {
    PhaseScope scope(s, Phase::Fingerprint);
    Fingerprint built;
    if (!fp) {
      built = build_fingerprint(models);
      fp = &built;
    }
    try {
      auto id = cfg.fingerprinting == FingerprintKind::Adg
                    ? adg_identify(s, models, *fp)
                    : sepseq_identify(s, models, *fp, derive_seed(cfg.seed, 1));
      lf = std::move(id.executed);
      r.candidate = id.match;
    } catch (const BudgetExhausted&) {
      r.budget_exhausted = true;
    }
  }

  if (r.candidate) {
    PhaseScope scope(s, Phase::Fcq);
    const auto cq = conf_query(s, models[*r.candidate], cfg.fcq.with_seed(derive_seed(cfg.seed, 2)));
    ++r.eq_queries;
    lf.insert(cq.executed.begin(), cq.executed.end());
    s.note({"eq", Phase::Fcq, cq.counterexample.value_or(Word{}), {}, false, cq.passed});
    if (cq.passed) {
      r.outcome = Outcome::FcqMatch;
      r.matched = r.candidate;
      r.model = models[*r.candidate];
      r.language = std::move(lf);
      r.budget_exhausted = r.budget_exhausted || cq.budget_exhausted;
      return r;
    }
  }

  r.outcome = Outcome::LearnedAfterMismatch;
  learn(lf);
  return r;
}

/// A black-box implementation: a name and a way to open a fresh session.
struct Implementation {
  std::string id;
  std::function<SulSession()> connect;
};

struct ImplementationRecord {
  std::string id;
  /// Index into RunReport::models; empty if the implementation failed.
  std::optional<std::size_t> model;
  Language gamma;
  Outcome outcome = Outcome::Failed;
  std::array<QueryCounters, 3> counters{};
  std::size_t eq_queries = 0;
  bool learned = false;
  bool budget_exhausted = false;
  std::string error;

  const QueryCounters& phase(Phase p) const { return counters[static_cast<std::size_t>(p)]; }
};

/// Result of a batch run: the final model set, the implementation-to-model
/// mapping and the sequences each verdict rests on.
struct RunReport {
  std::vector<MealyMachine> models;
  std::size_t initial_models = 0;
  std::vector<ImplementationRecord> records;

  std::map<std::string, std::size_t> mu() const {
    std::map<std::string, std::size_t> m;
    for (const auto& r : records)
      if (r.model) m[r.id] = *r.model;
    return m;
  }

  std::map<std::string, Language> gamma() const {
    std::map<std::string, Language> g;
    for (const auto& r : records)
      if (r.model) g[r.id] = r.gamma;
    return g;
  }

  QueryCounters phase_total(Phase p) const {
    QueryCounters c;
    for (const auto& r : records) c += r.phase(p);
    return c;
  }

  std::size_t total_symbols() const {
    std::size_t n = 0;
    for (auto p : kAllPhases) n += phase_total(p).symbols;
    return n;
  }

  std::size_t eq_queries() const {
    std::size_t n = 0;
    for (const auto& r : records) n += r.eq_queries;
    return n;
  }

  std::size_t learner_invocations() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const auto& r) { return r.learned; }));
  }
};

namespace inc_detail {

/// Minimizes and checks pairwise inequivalence; all models end up in the
/// input order of the first one.
inline std::vector<MealyMachine> canonical_models(std::span<const MealyMachine> initial) {
  std::vector<MealyMachine> out;
  for (const auto& m : initial) {
    out.push_back(minimize(out.empty() ? m : reorder_inputs(m, out.front().inputs())));
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
      if (equivalent(out[i], out.back()).equivalent()) throw DuplicateModels(i, out.size() - 1);
  }
  return out;
}

/// Index of the model equivalent to `m`, appending it if there is none.
inline std::size_t insert_model(std::vector<MealyMachine>& models, MealyMachine m, bool* added) {
  m = minimize(models.empty() ? m : reorder_inputs(m, models.front().inputs()));
  for (std::size_t i = 0; i < models.size(); ++i)
    if (equivalent(models[i], m).equivalent()) {
      if (added) *added = false;
      return i;
    }
  models.push_back(std::move(m));
  if (added) *added = true;
  return models.size() - 1;
}

inline std::vector<std::size_t> processing_order(std::size_t n, const PipelineConfig& cfg) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (cfg.shuffle_seed) {
    Rng rng(*cfg.shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  return order;
}

inline void capture(ImplementationRecord& rec, const SulSession& s) {
  for (auto p : kAllPhases) rec.counters[static_cast<std::size_t>(p)] = s.counters(p);
}

}  // namespace inc_detail

/// Open-world fingerprinting of a batch: every implementation is matched to
/// a model in the growing set, which is extended by learning whenever no
/// existing model conforms. Failures are recorded per implementation.
inline RunReport incremental_fingerprinting(const std::vector<Implementation>& impls,
                                            std::span<const MealyMachine> initial_models,
                                            const PipelineConfig& cfg) {
  cfg.validate();
  RunReport report;
  report.models = inc_detail::canonical_models(initial_models);
  report.initial_models = report.models.size();
  Fingerprint fp = build_fingerprint(report.models);
  std::size_t fp_models = report.models.size();

  for (auto idx : inc_detail::processing_order(impls.size(), cfg)) {
    const auto& impl = impls[idx];
    ImplementationRecord rec;
    rec.id = impl.id;
    try {
      SulSession s = impl.connect();
      s.set_budget(cfg.budget);
      for (; fp_models < report.models.size(); ++fp_models)
        extend_fingerprint(fp, report.models, fp_models);
      PipelineConfig local = cfg;
      local.seed = derive_seed(cfg.seed, idx);
      const bool same_order = report.models.empty() || report.models.front().inputs() == s.inputs();
      auto r = identify_or_learn(s, report.models, local, same_order ? &fp : nullptr);
      inc_detail::capture(rec, s);
      rec.outcome = r.outcome;
      rec.gamma = std::move(r.language);
      rec.eq_queries = r.eq_queries;
      rec.learned = r.learned;
      rec.budget_exhausted = r.budget_exhausted;
      rec.model = r.matched ? *r.matched : inc_detail::insert_model(report.models, r.model, nullptr);
    } catch (const std::exception& e) {
      rec.outcome = Outcome::Failed;
      rec.error = e.what();
      rec.model.reset();
      rec.gamma.clear();
    }
    report.records.push_back(std::move(rec));
  }
  return report;
}

enum class BaselineKind { RLSharp, RALSharp };

inline std::string_view to_string(BaselineKind k) { return k == BaselineKind::RLSharp ? "rl#" : "ral#"; }

inline BaselineKind parse_baseline_kind(std::string_view s) {
  if (s == "rl#" || s == "rlsharp") return BaselineKind::RLSharp;
  if (s == "ral#" || s == "ralsharp") return BaselineKind::RALSharp;
  throw ConfigError("unknown baseline '" + std::string(s) + "'");
}

/// Learns every implementation, from scratch (RL#) or with the current model
/// set as references (RAL#), and deduplicates by equivalence.
inline RunReport run_baseline(BaselineKind kind, const std::vector<Implementation>& impls,
                              std::span<const MealyMachine> initial_models, const PipelineConfig& cfg) {
  cfg.validate();
  RunReport report;
  report.models = inc_detail::canonical_models(initial_models);
  report.initial_models = report.models.size();
  for (auto idx : inc_detail::processing_order(impls.size(), cfg)) {
    const auto& impl = impls[idx];
    ImplementationRecord rec;
    rec.id = impl.id;
    try {
      SulSession s = impl.connect();
      s.set_budget(cfg.budget);
      const CqConfig eq = cfg.lcq.with_seed(derive_seed(derive_seed(cfg.seed, idx), 3));
      LearnResult res;
      if (kind == BaselineKind::RLSharp) {
        res = lsharp_learn(s, eq);
      } else {
        const auto refs = inc_detail::aligned(report.models, s.inputs());
        res = alsharp_learn(s, refs, eq);
      }
      inc_detail::capture(rec, s);
      bool added = false;
      rec.model = inc_detail::insert_model(report.models, res.model, &added);
      rec.outcome = added ? Outcome::LearnedFresh : Outcome::LearnedAfterMismatch;
      rec.gamma = std::move(res.executed);
      rec.eq_queries = res.eq_queries;
      rec.learned = true;
      rec.budget_exhausted = res.budget_exhausted;
    } catch (const std::exception& e) {
      rec.outcome = Outcome::Failed;
      rec.error = e.what();
      rec.model.reset();
      rec.gamma.clear();
    }
    report.records.push_back(std::move(rec));
  }
  return report;
}

inline RunReport run_baseline(BaselineKind kind, const std::vector<Implementation>& impls,
                              const PipelineConfig& cfg) {
  return run_baseline(kind, impls, {}, cfg);
}

struct ClassificationVerdicts {
  std::map<std::string, bool> correct;
  std::size_t misclassified = 0;
  double rate = 0.0;
};

/// Compares each mapped model with the implementation's ground truth by
/// bisimulation. Failed implementations count as misclassified.
inline ClassificationVerdicts misclassification_check(
    const RunReport& report, const std::map<std::string, MealyMachine>& ground_truth) {
  ClassificationVerdicts v;
  for (const auto& r : report.records) {
    auto it = ground_truth.find(r.id);
    if (it == ground_truth.end()) throw MissingGroundTruth(r.id);
    bool ok = false;
    if (r.model) {
      const auto& m = report.models.at(*r.model);
      const auto truth = it->second.inputs() == m.inputs() ? it->second
                                                          : reorder_inputs(it->second, m.inputs());
      ok = equivalent(truth, m).equivalent();
    }
    v.correct[r.id] = ok;
    if (!ok) ++v.misclassified;
  }
  if (!report.records.empty())
    v.rate = static_cast<double>(v.misclassified) / static_cast<double>(report.records.size());
  return v;
}

}  // namespace fsmprint
