#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "fsmprint/conformance.hpp"
#include "fsmprint/mealy.hpp"
#include "fsmprint/observation_tree.hpp"
#include "fsmprint/random.hpp"
#include "fsmprint/separation.hpp"
#include "fsmprint/sul.hpp"

namespace fsmprint {

struct LearnResult {
  MealyMachine model;
  /// Every sequence the learner posed, including equivalence-query tests.
  Language executed;
  std::size_t eq_queries = 0;
  /// Symbols charged to the session while learning (output queries and
  /// equivalence-query tests).
  std::size_t oq_symbols = 0;
  /// Ran out of budget; `model` is the last complete hypothesis.
  bool budget_exhausted = false;
  /// Every hypothesis submitted to an equivalence query, in order.
  std::vector<MealyMachine> hypotheses;
  std::size_t longest_counterexample = 0;
};

/// Observation-tree learner with apartness-based state identification.
/// With reference models it first rebuilds the basis by replaying reference
/// separators (adaptive mode); without references it is plain L#.
class Learner {
public:
  using NodeId = ObservationTree::NodeId;

  explicit Learner(SulSession& session, std::span<const MealyMachine> references = {})
      : session_(session), tree_(session.inputs().size()) {
    for (const auto& r : references) {
      refs_.push_back(reorder_inputs(r, session.inputs()));
      ref_seps_.emplace_back(refs_.back());
    }
    make_basis(ObservationTree::kRoot);
  }

  const ObservationTree& tree() const noexcept { return tree_; }
  const std::vector<NodeId>& basis() const noexcept { return basis_; }
  const Language& executed() const noexcept { return executed_; }

  /// Seeds the tree with already-known sequences (output queries, usually
  /// cache hits).
  void initialize(const Language& init) {
    try {
      for (const auto& w : init) tree_.insert(w, session_.output_query(w));
    } catch (const BudgetExhausted&) {
      // the learning loop reports the exhaustion
    }
  }

  /// Reference-guided state discovery. No-op without references.
  void rebuild() {
    if (refs_.empty()) return;
    while (true) {
      if (extend() || promote()) continue;
      if (!reference_separate()) break;
    }
  }

  /// Applies promotion, extension and separation until every frontier node
  /// has exactly one candidate basis node.
  void stabilize() {
    while (promote() || extend() || separate()) {
    }
  }

  /// Hypothesis of the stabilized tree. State i corresponds to basis()[i].
  MealyMachine hypothesis() {
    hypothesis_ = build_hypothesis(false);
    return *hypothesis_;
  }

  /// Refines the tree with a counterexample to the last hypothesis. Throws
  /// NotACounterexample if the SUL agrees with the hypothesis on `cex`.
  void process_counterexample(const Word& cex) {
    if (!hypothesis_) hypothesis();
    const auto observed = query(cex);
    const auto predicted = run(*hypothesis_, cex);
    std::size_t i = 0;
    while (i < cex.size() && observed[i] == predicted[i]) ++i;
    if (i == cex.size()) throw NotACounterexample();
    longest_cex_ = std::max(longest_cex_, cex.size());
    narrow(Word(cex.begin(), cex.begin() + static_cast<std::ptrdiff_t>(i)));
  }

  /// Full learning loop with `eq` answering equivalence queries.
  LearnResult run_loop(const CqConfig& eq) {
    PhaseScope scope(session_, Phase::Learn);
    const std::size_t before = session_.counters(Phase::Learn).symbols;
    LearnResult r{MealyMachine{}, {}, 0, 0, false, {}, 0};
    std::optional<MealyMachine> last;
    try {
      rebuild();
      while (true) {
        stabilize();
        MealyMachine h = hypothesis();
        last = h;
        if (auto w = inconsistency(h)) {
          process_counterexample(*w);
          continue;
        }
        CqConfig round = eq;
        round.seed = derive_seed(eq.seed, r.eq_queries);
        ++r.eq_queries;
        r.hypotheses.push_back(h);
        const auto res = conf_query(session_, h, round);
        for (const auto& w : res.executed) query(w);
        session_.note({"eq", Phase::Learn, res.counterexample.value_or(Word{}), {}, false,
                       res.passed});
        if (res.budget_exhausted) r.budget_exhausted = true;
        if (res.passed) {
          r.model = std::move(h);
          break;
        }
        process_counterexample(*res.counterexample);
      }
    } catch (const BudgetExhausted&) {
      r.budget_exhausted = true;
      r.model = last ? *last : build_hypothesis(true);
    }
    r.executed = executed_;
    r.oq_symbols = session_.counters(Phase::Learn).symbols - before;
    r.longest_counterexample = longest_cex_;
    return r;
  }

  /// Shortest tree word on which `h` disagrees with the recorded outputs.
  std::optional<Word> inconsistency(const MealyMachine& h) const {
    std::vector<std::pair<NodeId, StateId>> queue{{ObservationTree::kRoot, h.initial()}};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const auto [n, q] = queue[i];
      for (Symbol a = 0; a < tree_.num_inputs(); ++a) {
        const NodeId c = tree_.child(n, a);
        if (c == ObservationTree::kNone) continue;
        if (tree_.output_name(tree_.incoming_output(c)) != h.output(q, a)) return tree_.access(c);
        queue.emplace_back(c, h.successor(q, a));
      }
    }
    return std::nullopt;
  }

private:
  struct Memo {
    bool apart;
    std::uint32_t size_a, size_b;
  };

  OutputWord query(const Word& w) {
    auto out = session_.output_query(w);
    tree_.insert(w, out);
    executed_.insert(w);
    return out;
  }

  bool is_basis(NodeId n) const { return basis_index_.count(n) != 0; }

  void make_basis(NodeId n) {
    basis_index_[n] = basis_.size();
    basis_.push_back(n);
  }

  bool apart(NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    const auto key = (static_cast<std::uint64_t>(a) << 32) | b;
    const auto sa = tree_.subtree_size(a), sb = tree_.subtree_size(b);
    if (auto it = memo_.find(key); it != memo_.end()) {
      if (it->second.apart) return true;
      if (it->second.size_a == sa && it->second.size_b == sb) return false;
    }
    const bool r = tree_.apart(a, b);
    memo_[key] = {r, sa, sb};
    return r;
  }

  std::vector<NodeId> candidates(NodeId f) {
    std::vector<NodeId> c;
    for (auto b : basis_)
      if (!apart(f, b)) c.push_back(b);
    return c;
  }

  /// Non-basis children of basis nodes, shortlex by access sequence.
  std::vector<NodeId> frontier() const {
    std::vector<std::pair<Word, NodeId>> f;
    for (auto b : basis_)
      for (Symbol a = 0; a < tree_.num_inputs(); ++a) {
        const NodeId c = tree_.child(b, a);
        if (c != ObservationTree::kNone && !is_basis(c)) f.emplace_back(tree_.access(c), c);
      }
    std::sort(f.begin(), f.end(), [](const auto& x, const auto& y) {
      return x.first.size() != y.first.size() ? x.first.size() < y.first.size() : x.first < y.first;
    });
    std::vector<NodeId> out;
    out.reserve(f.size());
    for (auto& [_, n] : f) out.push_back(n);
    return out;
  }

  /// Promotes the first frontier node apart from the whole basis.
  bool promote() {
    for (auto f : frontier())
      if (candidates(f).empty()) {
        make_basis(f);
        hypothesis_.reset();
        return true;
      }
    return false;
  }

  /// Completes the outgoing transitions of basis nodes.
  bool extend() {
    bool changed = false;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      const NodeId b = basis_[i];
      for (Symbol a = 0; a < tree_.num_inputs(); ++a)
        if (tree_.child(b, a) == ObservationTree::kNone) {
          Word w = tree_.access(b);
          w.push_back(a);
          query(w);
          changed = true;
        }
    }
    return changed;
  }

  /// For each frontier node with several candidates, tests the witness
  /// separating its first two candidates.
  bool separate() {
    bool changed = false;
    for (auto f : frontier()) {
      const auto c = candidates(f);
      if (c.size() < 2) continue;
      const auto w = tree_.apartness_witness(c[0], c[1]);
      Word q = tree_.access(f);
      q.insert(q.end(), w->begin(), w->end());
      query(q);
      changed = true;
    }
    return changed;
  }

  /// The reference state reached by `n`'s access sequence, if the reference
  /// reproduces the recorded outputs along the way.
  std::optional<StateId> ref_state(std::size_t r, NodeId n) const {
    const Word w = tree_.access(n);
    const auto out = step_sequence(refs_[r], refs_[r].initial(), w);
    if (out.outputs != tree_.outputs_to(n)) return std::nullopt;
    return out.state;
  }

  /// Poses reference separators between frontier nodes and candidate basis
  /// nodes that some matching reference predicts to be different.
  bool reference_separate() {
    bool changed = false;
    for (auto f : frontier()) {
      for (auto b : candidates(f)) {
        for (std::size_t r = 0; r < refs_.size(); ++r) {
          if (apart(f, b)) break;
          if (!tried_.insert({f, b, r}).second) continue;
          const auto qf = ref_state(r, f), qb = ref_state(r, b);
          if (!qf || !qb || *qf == *qb) continue;
          const auto& sep = ref_seps_[r].get(*qf, *qb);
          if (!sep) continue;
          for (NodeId n : {f, b}) {
            Word w = tree_.access(n);
            w.insert(w.end(), sep->begin(), sep->end());
            query(w);
          }
          changed = true;
        }
      }
    }
    return changed;
  }

  StateId hyp_state(const Word& w) const { return reached_state(*hypothesis_, w); }

  /// Binary search over a counterexample prefix whose tree node is apart
  /// from the basis node the hypothesis assigns to it, until that node is
  /// in the frontier.
  void narrow(Word sigma) {
    while (true) {
      const NodeId r = tree_.find(sigma);
      if (r == ObservationTree::kNone || is_basis(r)) return;
      std::size_t j = 0;
      NodeId n = ObservationTree::kRoot;
      while (j < sigma.size() && is_basis(n)) n = tree_.child(n, sigma[j++]);
      if (j == sigma.size()) return;  // r is a frontier node
      const NodeId target = basis_[hyp_state(sigma)];
      const auto eta = tree_.apartness_witness(r, target);
      if (!eta) return;
      const std::size_t h = (j + sigma.size()) / 2;
      const Word sigma1(sigma.begin(), sigma.begin() + static_cast<std::ptrdiff_t>(h));
      const Word sigma2(sigma.begin() + static_cast<std::ptrdiff_t>(h), sigma.end());
      Word moved = tree_.access(basis_[hyp_state(sigma1)]);
      moved.insert(moved.end(), sigma2.begin(), sigma2.end());
      Word probe = moved;
      probe.insert(probe.end(), eta->begin(), eta->end());
      query(probe);
      if (apart(tree_.find(moved), target))
        sigma = std::move(moved);
      else
        sigma = sigma1;
    }
  }

  /// Folds the frontier into the basis. `lenient` tolerates unidentified or
  /// missing transitions (used when the budget runs out before the first
  /// hypothesis).
  MealyMachine build_hypothesis(bool lenient) {
    const std::size_t n = basis_.size(), k = tree_.num_inputs();
    std::vector<std::string> names(n);
    std::vector<StateId> succ(n * k);
    std::vector<std::string> outs(n * k);
    for (std::size_t i = 0; i < n; ++i) {
      names[i] = "s" + std::to_string(i);
      for (Symbol a = 0; a < k; ++a) {
        const NodeId c = tree_.child(basis_[i], a);
        if (c == ObservationTree::kNone) {
          if (!lenient) throw InvalidMachine("basis transition not explored");
          succ[i * k + a] = static_cast<StateId>(i);
          continue;
        }
        outs[i * k + a] = tree_.output_name(tree_.incoming_output(c));
        if (is_basis(c)) {
          succ[i * k + a] = static_cast<StateId>(basis_index_.at(c));
          continue;
        }
        const auto cand = candidates(c);
        if (cand.size() != 1 && !lenient)
          throw InvalidMachine("frontier node is not uniquely identified");
        succ[i * k + a] = static_cast<StateId>(cand.empty() ? i : basis_index_.at(cand.front()));
      }
    }
    return MealyMachine(session_.inputs(), std::move(names), 0, std::move(succ), std::move(outs));
  }

  SulSession& session_;
  ObservationTree tree_;
  std::vector<NodeId> basis_;
  std::unordered_map<NodeId, std::size_t> basis_index_;
  std::unordered_map<std::uint64_t, Memo> memo_;
  std::optional<MealyMachine> hypothesis_;
  Language executed_;
  std::size_t longest_cex_ = 0;
  std::vector<MealyMachine> refs_;
  std::vector<SeparatorTable> ref_seps_;
  std::set<std::tuple<NodeId, NodeId, std::size_t>> tried_;
};

namespace learn_detail {

inline void require_eq_available(const SulSession& s, const CqConfig& eq) {
  if (eq.kind == CqKind::Perfect && !s.ground_truth()) throw NotSimulated();
}

}  // namespace learn_detail

/// L#: learns the session's behaviour, seeded with `init`.
inline LearnResult lsharp_learn(SulSession& s, const CqConfig& eq, const Language& init = {}) {
  learn_detail::require_eq_available(s, eq);
  Learner l(s);
  {
    PhaseScope scope(s, Phase::Learn);
    l.initialize(init);
  }
  return l.run_loop(eq);
}

/// AL#: as lsharp_learn, with a rebuilding phase guided by `refs`.
inline LearnResult alsharp_learn(SulSession& s, std::span<const MealyMachine> refs,
                                 const CqConfig& eq, const Language& init = {}) {
  learn_detail::require_eq_available(s, eq);
  Learner l(s, refs);
  {
    PhaseScope scope(s, Phase::Learn);
    l.initialize(init);
  }
  return l.run_loop(eq);
}

}  // namespace fsmprint
