#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsmprint/mealy.hpp"

namespace fsmprint {

/// Which part of a run a query is attributed to.
enum class Phase : std::uint8_t { Fingerprint = 0, Fcq = 1, Learn = 2 };

inline constexpr std::array<Phase, 3> kAllPhases{Phase::Fingerprint, Phase::Fcq, Phase::Learn};

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Fingerprint: return "fingerprint";
    case Phase::Fcq: return "fcq";
    case Phase::Learn: return "learn";
  }
  return "?";
}

/// Interaction counts. `symbols` is inputs plus resets.
struct QueryCounters {
  std::size_t symbols = 0;
  std::size_t resets = 0;
  std::size_t inputs = 0;
  std::size_t queries = 0;
  std::size_t cache_hits = 0;

  QueryCounters& operator+=(const QueryCounters& o) {
    symbols += o.symbols;
    resets += o.resets;
    inputs += o.inputs;
    queries += o.queries;
    cache_hits += o.cache_hits;
    return *this;
  }
};

/// Cap on the symbols a session may send. Unbounded when `max_symbols` is empty.
struct QueryBudget {
  std::optional<std::size_t> max_symbols;
  std::size_t consumed = 0;

  bool bounded() const noexcept { return max_symbols.has_value(); }
  bool affords(std::size_t cost) const noexcept {
    return !max_symbols || consumed + cost <= *max_symbols;
  }
  std::size_t remaining() const noexcept {
    return max_symbols ? *max_symbols - consumed : static_cast<std::size_t>(-1);
  }
};

/// One entry of the optional interaction log.
struct TraceRecord {
  std::string kind;  // "oq" or "eq"
  Phase phase = Phase::Learn;
  Word inputs;
  OutputWord outputs;
  bool cached = false;
  /// For "eq" records: whether the hypothesis passed.
  bool passed = false;
};

/// The implementation behind a session: something that can be reset and
/// stepped one input at a time.
class Endpoint {
public:
  virtual ~Endpoint() = default;
  virtual void reset() = 0;
  virtual std::string step(const std::string& input) = 0;
  /// Hidden machine, when the endpoint is a simulation.
  virtual const MealyMachine* ground_truth() const { return nullptr; }
};

class SimulatedEndpoint final : public Endpoint {
public:
  explicit SimulatedEndpoint(MealyMachine m) : machine_(std::move(m)), state_(machine_.initial()) {}

  void reset() override { state_ = machine_.initial(); }

  std::string step(const std::string& input) override {
    const Symbol a = machine_.inputs().index(input);
    std::string out = machine_.output(state_, a);
    state_ = machine_.successor(state_, a);
    return out;
  }

  const MealyMachine* ground_truth() const override { return &machine_; }

private:
  MealyMachine machine_;
  StateId state_;
};

/// Prefix tree of every answered query. A word is answerable iff its whole
/// path exists.
class QueryCache {
public:
  explicit QueryCache(std::size_t inputs = 0) : inputs_(inputs) { clear(); }

  std::optional<OutputWord> lookup(const Word& w) const {
    OutputWord out;
    out.reserve(w.size());
    std::int32_t node = 0;
    for (auto a : w) {
      node = nodes_[node].child[a];
      if (node < 0) return std::nullopt;
      out.push_back(nodes_[node].output);
    }
    return out;
  }

  /// Records `w`/`out`; throws NonDeterministicResponse if it contradicts an
  /// earlier answer.
  void insert(const Word& w, const OutputWord& out) {
    std::int32_t node = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::int32_t child = nodes_[node].child[w[i]];
      if (child < 0) {
        child = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(Node{std::vector<std::int32_t>(inputs_, -1), out[i]});
        nodes_[node].child[w[i]] = child;
      } else if (nodes_[child].output != out[i]) {
        throw NonDeterministicResponse("output '" + out[i] + "' at position " + std::to_string(i) +
                                       " contradicts cached '" + nodes_[child].output + "'");
      }
      node = child;
    }
  }

  void clear() {
    nodes_.clear();
    nodes_.push_back(Node{std::vector<std::int32_t>(inputs_, -1), {}});
  }

  /// Number of stored transitions.
  std::size_t size() const noexcept { return nodes_.size() - 1; }

private:
  struct Node {
    std::vector<std::int32_t> child;
    std::string output;
  };

  std::size_t inputs_;
  std::vector<Node> nodes_;
};

/// Resettable black-box query endpoint with output cache, per-phase symbol
/// accounting and an optional budget.
///
/// Every output query that is not fully answered by the cache costs one
/// reset plus |w| inputs; fully cached words are free. A session is owned
/// by one run at a time.
class SulSession {
public:
  SulSession(Alphabet inputs, std::unique_ptr<Endpoint> endpoint)
      : inputs_(std::move(inputs)), endpoint_(std::move(endpoint)), cache_(inputs_.size()) {}

  SulSession(SulSession&&) noexcept = default;
  SulSession& operator=(SulSession&&) noexcept = default;

  const Alphabet& inputs() const noexcept { return inputs_; }

  OutputWord output_query(const Word& w) {
    for (auto a : w)
      if (a >= inputs_.size()) throw UnknownInputSymbol("#" + std::to_string(a));
    auto& c = counters_[static_cast<std::size_t>(phase_)];
    if (auto hit = cache_.lookup(w)) {
      ++c.cache_hits;
      emit({"oq", phase_, w, *hit, true, false});
      return *hit;
    }
    const std::size_t cost = 1 + w.size();
    if (!budget_.affords(cost)) throw BudgetExhausted();
    endpoint_->reset();
    OutputWord out;
    out.reserve(w.size());
    for (auto a : w) out.push_back(endpoint_->step(inputs_[a]));
    budget_.consumed += cost;
    c.symbols += cost;
    c.resets += 1;
    c.inputs += w.size();
    c.queries += 1;
    cache_.insert(w, out);
    emit({"oq", phase_, w, out, false, false});
    return out;
  }

  /// Cached answer for `w`, without contacting the implementation.
  std::optional<OutputWord> cached(const Word& w) const { return cache_.lookup(w); }

  Phase phase() const noexcept { return phase_; }
  void set_phase(Phase p) noexcept { phase_ = p; }

  const QueryCounters& counters(Phase p) const { return counters_[static_cast<std::size_t>(p)]; }
  QueryCounters total() const {
    QueryCounters t;
    for (const auto& c : counters_) t += c;
    return t;
  }
  std::size_t symbols_sent() const { return total().symbols; }
  std::size_t resets_sent() const { return total().resets; }

  const QueryBudget& budget() const noexcept { return budget_; }
  void set_budget(std::optional<std::size_t> max_symbols) {
    budget_.max_symbols = max_symbols;
  }

  const MealyMachine* ground_truth() const { return endpoint_->ground_truth(); }

  void set_trace(std::function<void(const TraceRecord&)> sink) { trace_ = std::move(sink); }
  /// Logs a non-query event (equivalence queries).
  void note(TraceRecord r) { emit(std::move(r)); }

  const QueryCache& cache() const noexcept { return cache_; }

private:
  void emit(TraceRecord r) {
    if (trace_) trace_(r);
  }

  Alphabet inputs_;
  std::unique_ptr<Endpoint> endpoint_;
  QueryCache cache_;
  std::array<QueryCounters, 3> counters_{};
  Phase phase_ = Phase::Learn;
  QueryBudget budget_;
  std::function<void(const TraceRecord&)> trace_;
};

/// Sets the session phase for the lifetime of the scope.
class PhaseScope {
public:
  PhaseScope(SulSession& s, Phase p) : session_(s), previous_(s.phase()) { s.set_phase(p); }
  ~PhaseScope() { session_.set_phase(previous_); }
  PhaseScope(const PhaseScope&) = delete;
  PhaseScope& operator=(const PhaseScope&) = delete;

private:
  SulSession& session_;
  Phase previous_;
};

inline SulSession make_simulated_sul(MealyMachine m) {
  Alphabet inputs = m.inputs();
  return SulSession(std::move(inputs), std::make_unique<SimulatedEndpoint>(std::move(m)));
}

}  // namespace fsmprint
