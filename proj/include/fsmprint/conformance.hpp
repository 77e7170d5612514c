#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fsmprint/mealy.hpp"
#include "fsmprint/random.hpp"
#include "fsmprint/separation.hpp"
#include "fsmprint/sul.hpp"

namespace fsmprint {

enum class CqKind { Wp, RandomWord, RandomWp, BudgetRandomWp, Perfect };

/// Selects a conformance oracle and its parameters. Defaults follow the
/// usual experiment settings: Wp k=2, RandomWord 1000 words of length
/// 10..30, RandomWp 100 walks per state of length 1..5, budgeted RandomWp
/// with geometric walks (minimum 3, mean 8).
struct CqConfig {
  CqKind kind = CqKind::RandomWp;
  std::size_t k = 2;
  std::size_t count = 1000;
  std::size_t min_len = 10;
  std::size_t max_len = 30;
  std::size_t walks_per_state = 100;
  std::size_t min_walk = 1;
  std::size_t max_walk = 5;
  std::size_t geo_min = 3;
  double geo_expected = 8.0;
  std::uint64_t seed = 0;

  static CqConfig wp(std::size_t k) {
    CqConfig c;
    c.kind = CqKind::Wp;
    c.k = k;
    return c;
  }
  static CqConfig random_word(std::size_t count, std::size_t min_len, std::size_t max_len) {
    CqConfig c;
    c.kind = CqKind::RandomWord;
    c.count = count;
    c.min_len = min_len;
    c.max_len = max_len;
    return c;
  }
  static CqConfig random_wp(std::size_t walks, std::size_t min_walk, std::size_t max_walk) {
    CqConfig c;
    c.kind = CqKind::RandomWp;
    c.walks_per_state = walks;
    c.min_walk = min_walk;
    c.max_walk = max_walk;
    return c;
  }
  static CqConfig budget_random_wp(std::size_t min_len, double expected_len) {
    CqConfig c;
    c.kind = CqKind::BudgetRandomWp;
    c.geo_min = min_len;
    c.geo_expected = expected_len;
    return c;
  }
  static CqConfig perfect() {
    CqConfig c;
    c.kind = CqKind::Perfect;
    return c;
  }

  CqConfig with_seed(std::uint64_t s) const {
    CqConfig c = *this;
    c.seed = s;
    return c;
  }

  void validate() const {
    switch (kind) {
      case CqKind::RandomWord:
        if (count == 0) throw ConfigError("RandomWord needs count > 0");
        if (min_len > max_len) throw ConfigError("RandomWord needs min_len <= max_len");
        break;
      case CqKind::RandomWp:
        if (walks_per_state == 0) throw ConfigError("RandomWp needs walks_per_state > 0");
        if (min_walk > max_walk) throw ConfigError("RandomWp needs min_walk <= max_walk");
        break;
      case CqKind::BudgetRandomWp:
        if (!(geo_expected > static_cast<double>(geo_min)))
          throw ConfigError("budgeted RandomWp needs expected length > minimum length");
        break;
      default: break;
    }
  }
};

/// `wp:K`, `randomword:COUNT:MIN:MAX`, `randomwp:WALKS:MIN:MAX`,
/// `budgetrandomwp:MIN:EXPECTED`, `perfect`. Omitted fields keep defaults.
inline CqConfig parse_cq_config(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty()) throw ConfigError("empty conformance-query spec");
  auto num = [&](std::size_t i, std::size_t fallback) -> std::size_t {
    if (i >= parts.size()) return fallback;
    try {
      std::size_t used = 0;
      auto v = std::stoull(parts[i], &used);
      if (used != parts[i].size()) throw ConfigError("");
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + parts[i] + "' in '" + text + "'");
    }
  };
  CqConfig c;
  const auto& kind = parts[0];
  if (kind == "wp") {
    c = CqConfig::wp(num(1, 2));
  } else if (kind == "randomword") {
    c = CqConfig::random_word(num(1, 1000), num(2, 10), num(3, 30));
  } else if (kind == "randomwp") {
    c = CqConfig::random_wp(num(1, 100), num(2, 1), num(3, 5));
  } else if (kind == "budgetrandomwp") {
    c = CqConfig::budget_random_wp(num(1, 3), parts.size() > 2 ? std::stod(parts[2]) : 8.0);
  } else if (kind == "perfect") {
    c = CqConfig::perfect();
  } else {
    throw ConfigError("unknown conformance query '" + kind + "'");
  }
  c.validate();
  return c;
}

inline std::string to_string(const CqConfig& c) {
  std::ostringstream os;
  switch (c.kind) {
    case CqKind::Wp: os << "wp:" << c.k; break;
    case CqKind::RandomWord: os << "randomword:" << c.count << ":" << c.min_len << ":" << c.max_len; break;
    case CqKind::RandomWp: os << "randomwp:" << c.walks_per_state << ":" << c.min_walk << ":" << c.max_walk; break;
    case CqKind::BudgetRandomWp: os << "budgetrandomwp:" << c.geo_min << ":" << c.geo_expected; break;
    case CqKind::Perfect: os << "perfect"; break;
  }
  return os.str();
}

/// Outcome of one conformance query. `passed` is false iff a counterexample
/// was found; the counterexample is always a member of `executed`.
struct ConfQueryResult {
  bool passed = true;
  Language executed;
  std::optional<Word> counterexample;
  /// The session budget ran out; `passed` reflects only the executed words.
  bool budget_exhausted = false;
};

namespace cq_detail {

inline void require_alphabet(const SulSession& s, const MealyMachine& m) {
  if (!(s.inputs() == m.inputs()))
    throw AlphabetMismatch("model alphabet does not match the session alphabet");
}

/// Runs one test word. Returns false (and records the counterexample) on a
/// discrepancy.
inline bool run_test(SulSession& s, const MealyMachine& m, const Word& w, ConfQueryResult& r) {
  const auto observed = s.output_query(w);
  r.executed.insert(w);
  if (observed != run(m, w)) {
    r.passed = false;
    r.counterexample = w;
    return false;
  }
  return true;
}

inline Word random_word(Rng& rng, std::size_t length, std::size_t inputs) {
  Word w(length);
  for (auto& a : w) a = static_cast<Symbol>(index_below(rng, inputs));
  return w;
}

template <class Body>
ConfQueryResult guarded(Body&& body) {
  ConfQueryResult r;
  try {
    body(r);
  } catch (const BudgetExhausted&) {
    r.budget_exhausted = true;
  }
  return r;
}

}  // namespace cq_detail

/// The Wp test suite in execution order: for every access sequence (shortlex
/// state cover order) and every middle part of length 0..k+1 (ascending,
/// lexicographic), the middle is followed by each suffix identifying the
/// expected state. Middle length 0 uses the whole characterising set.
inline std::vector<Word> wp_test_suite(const MealyMachine& m, std::size_t k) {
  const SeparatorTable seps(m);
  const auto w_all = seps.characterizing_set();
  std::vector<std::vector<Word>> ident(m.num_states());
  for (StateId q = 0; q < m.num_states(); ++q) ident[q] = seps.identification_set(q);
  const auto cover = access_sequences(m);
  const std::size_t inputs = m.num_inputs();

  std::vector<Word> suite;
  Language seen;
  auto emit = [&](Word w) {
    if (seen.insert(w).second) suite.push_back(std::move(w));
  };
  auto with_suffixes = [&](const Word& prefix, const std::vector<Word>& suffixes) {
    if (suffixes.empty()) emit(prefix);
    for (const auto& s : suffixes) {
      Word w = prefix;
      w.insert(w.end(), s.begin(), s.end());
      emit(std::move(w));
    }
  };
  for (const auto& acc : cover) {
    if (!acc) continue;
    with_suffixes(*acc, w_all);
    for (std::size_t len = 1; len <= k + 1; ++len) {
      Word middle(len, 0);
      while (true) {
        Word prefix = *acc;
        prefix.insert(prefix.end(), middle.begin(), middle.end());
        with_suffixes(prefix, ident[reached_state(m, prefix)]);
        // next middle in lexicographic order
        std::size_t i = len;
        while (i > 0 && middle[i - 1] + 1 == inputs) middle[--i] = 0;
        if (i == 0) break;
        ++middle[i - 1];
      }
    }
  }
  return suite;
}

/// Wp conformance query. Complete for implementations with at most
/// |m| + k states when `m` is minimal: an inequivalent implementation of
/// that size fails on some suite word.
inline ConfQueryResult wp_conf_query(SulSession& s, const MealyMachine& m, std::size_t k) {
  cq_detail::require_alphabet(s, m);
  const auto suite = wp_test_suite(m, k);
  return cq_detail::guarded([&](ConfQueryResult& r) {
    for (const auto& w : suite)
      if (!cq_detail::run_test(s, m, w, r)) return;
  });
}

inline ConfQueryResult random_word_cq(SulSession& s, const MealyMachine& m, std::size_t count,
                                      std::size_t min_len, std::size_t max_len, std::uint64_t seed) {
  cq_detail::require_alphabet(s, m);
  CqConfig::random_word(count, min_len, max_len).validate();
  Rng rng(seed);
  return cq_detail::guarded([&](ConfQueryResult& r) {
    for (std::size_t i = 0; i < count; ++i) {
      const auto len = uniform_between(rng, min_len, max_len);
      if (!cq_detail::run_test(s, m, cq_detail::random_word(rng, len, m.num_inputs()), r)) return;
    }
  });
}

namespace cq_detail {

struct WpIndex {
  std::vector<std::optional<Word>> access;
  std::vector<std::vector<Word>> ident;

  explicit WpIndex(const MealyMachine& m) : access(access_sequences(m)), ident(m.num_states()) {
    const SeparatorTable seps(m);
    for (StateId q = 0; q < m.num_states(); ++q) ident[q] = seps.identification_set(q);
  }

  /// access(q) · walk · one random identifying suffix of the reached state.
  Word test(const MealyMachine& m, StateId q, std::size_t walk_len, Rng& rng) const {
    Word w = *access[q];
    const Word walk = random_word(rng, walk_len, m.num_inputs());
    w.insert(w.end(), walk.begin(), walk.end());
    const auto& ids = ident[reached_state(m, w)];
    if (!ids.empty()) {
      const auto& suffix = ids[index_below(rng, ids.size())];
      w.insert(w.end(), suffix.begin(), suffix.end());
    }
    return w;
  }
};

}  // namespace cq_detail

/// RandomWp: for every reachable state, `walks_per_state` tests of the form
/// access · random walk (length uniform in [min_walk, max_walk]) · random
/// identifying suffix of the expected state.
inline ConfQueryResult random_wp_cq(SulSession& s, const MealyMachine& m,
                                    std::size_t walks_per_state, std::size_t min_walk,
                                    std::size_t max_walk, std::uint64_t seed) {
  cq_detail::require_alphabet(s, m);
  CqConfig::random_wp(walks_per_state, min_walk, max_walk).validate();
  const cq_detail::WpIndex index(m);
  Rng rng(seed);
  return cq_detail::guarded([&](ConfQueryResult& r) {
    for (StateId q = 0; q < m.num_states(); ++q) {
      if (!index.access[q]) continue;
      for (std::size_t j = 0; j < walks_per_state; ++j) {
        const auto len = uniform_between(rng, min_walk, max_walk);
        if (!cq_detail::run_test(s, m, index.test(m, q, len, rng), r)) return;
      }
    }
  });
}

/// Walk length `min_len + G` where G counts failures before the first
/// success with p = 1 / (expected_len - min_len + 1), so the mean is
/// `expected_len`.
class GeometricWalkLength {
public:
  GeometricWalkLength(std::size_t min_len, double expected_len)
      : min_len_(min_len), dist_(1.0 / (expected_len - static_cast<double>(min_len) + 1.0)) {
    if (!(expected_len > static_cast<double>(min_len)))
      throw ConfigError("expected walk length must exceed the minimum");
  }

  double p() const { return dist_.p(); }
  std::size_t operator()(Rng& rng) { return min_len_ + static_cast<std::size_t>(dist_(rng)); }

private:
  std::size_t min_len_;
  std::geometric_distribution<std::size_t> dist_;
};

/// Budgeted RandomWp: tests from uniformly chosen states with geometric walk
/// lengths until a discrepancy or until the session budget runs out.
/// Requires a bounded session budget.
inline ConfQueryResult budget_random_wp_cq(SulSession& s, const MealyMachine& m,
                                           std::size_t min_len, double expected_len,
                                           std::uint64_t seed) {
  cq_detail::require_alphabet(s, m);
  if (!s.budget().bounded()) throw ConfigError("budgeted RandomWp needs a bounded symbol budget");
  GeometricWalkLength walk_len(min_len, expected_len);
  const cq_detail::WpIndex index(m);
  std::vector<StateId> reachable;
  for (StateId q = 0; q < m.num_states(); ++q)
    if (index.access[q]) reachable.push_back(q);
  Rng rng(seed);
  // Gives up if the generator keeps producing already-answered words.
  constexpr std::size_t kMaxConsecutiveHits = 100000;
  auto r = cq_detail::guarded([&](ConfQueryResult& res) {
    std::size_t hits = 0;
    while (hits < kMaxConsecutiveHits) {
      const StateId q = reachable[index_below(rng, reachable.size())];
      const Word w = index.test(m, q, walk_len(rng), rng);
      hits = s.cached(w) ? hits + 1 : 0;
      if (!cq_detail::run_test(s, m, w, res)) return;
    }
  });
  if (r.passed) r.budget_exhausted = true;
  return r;
}

/// Exact oracle backed by the session's ground truth. The separating
/// witness is posed as an output query, so it is part of the session's
/// history like any other test.
inline ConfQueryResult perfect_conf_query(SulSession& s, const MealyMachine& m) {
  const MealyMachine* truth = s.ground_truth();
  if (!truth) throw NotSimulated();
  cq_detail::require_alphabet(s, m);
  auto verdict = equivalent(*truth, m);
  return cq_detail::guarded([&](ConfQueryResult& r) {
    if (verdict.equivalent()) return;
    cq_detail::run_test(s, m, *verdict.witness, r);
  });
}

/// Dispatches on `cfg.kind`.
inline ConfQueryResult conf_query(SulSession& s, const MealyMachine& m, const CqConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case CqKind::Wp: return wp_conf_query(s, m, cfg.k);
    case CqKind::RandomWord:
      return random_word_cq(s, m, cfg.count, cfg.min_len, cfg.max_len, cfg.seed);
    case CqKind::RandomWp:
      return random_wp_cq(s, m, cfg.walks_per_state, cfg.min_walk, cfg.max_walk, cfg.seed);
    case CqKind::BudgetRandomWp:
      return budget_random_wp_cq(s, m, cfg.geo_min, cfg.geo_expected, cfg.seed);
    case CqKind::Perfect: return perfect_conf_query(s, m);
  }
  throw ConfigError("unknown conformance query kind");
}

}  // namespace fsmprint
