#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fsmprint/mealy.hpp"

namespace fsmprint {

namespace detail {

/// Flat labelled transition system used by partition refinement. Output ids
/// are shared across all machines folded into one system.
struct FlatSystem {
  std::size_t states = 0;
  std::size_t inputs = 0;
  std::vector<std::uint32_t> next;
  std::vector<std::uint32_t> out;
};

/// Builds the disjoint union of `machines` (all over the same alphabet order).
/// State q of machine i maps to offset[i] + q.
inline FlatSystem disjoint_union(const std::vector<const MealyMachine*>& machines,
                                 std::vector<std::size_t>* offsets = nullptr) {
  FlatSystem sys;
  sys.inputs = machines.empty() ? 0 : machines.front()->num_inputs();
  std::unordered_map<std::string, std::uint32_t> out_ids;
  for (const auto* m : machines) {
    if (offsets) offsets->push_back(sys.states);
    const auto base = static_cast<std::uint32_t>(sys.states);
    for (StateId q = 0; q < m->num_states(); ++q)
      for (Symbol a = 0; a < sys.inputs; ++a) {
        sys.next.push_back(base + m->successor(q, a));
        auto [it, _] = out_ids.emplace(m->output(q, a), static_cast<std::uint32_t>(out_ids.size()));
        sys.out.push_back(it->second);
      }
    sys.states += m->num_states();
  }
  return sys;
}

/// Coarsest partition compatible with outputs and successors (bisimulation
/// classes). Moore-style rounds; block ids are numbered by first occurrence.
inline std::vector<std::uint32_t> refine(const FlatSystem& sys) {
  const std::size_t n = sys.states, k = sys.inputs;
  std::vector<std::uint32_t> block(n, 0);
  std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
  std::vector<std::uint32_t> sig(k + 1);
  for (std::size_t q = 0; q < n; ++q) {
    std::vector<std::uint32_t> row(sys.out.begin() + q * k, sys.out.begin() + (q + 1) * k);
    block[q] = ids.emplace(std::move(row), static_cast<std::uint32_t>(ids.size())).first->second;
  }
  std::size_t count = ids.size();
  while (true) {
    ids.clear();
    std::vector<std::uint32_t> next_block(n);
    for (std::size_t q = 0; q < n; ++q) {
      sig[0] = block[q];
      for (std::size_t a = 0; a < k; ++a) sig[a + 1] = block[sys.next[q * k + a]];
      next_block[q] = ids.emplace(sig, static_cast<std::uint32_t>(ids.size())).first->second;
    }
    block = std::move(next_block);
    if (ids.size() == count) break;
    count = ids.size();
  }
  return block;
}

inline void require_same_alphabet(const MealyMachine& a, const MealyMachine& b) {
  if (!(a.inputs() == b.inputs())) {
    if (a.inputs().same_set(b.inputs()))
      throw AlphabetMismatch("input alphabets have different declared orders");
    throw AlphabetMismatch("input alphabets differ");
  }
}

/// Breadth-first search over the synchronous product of (a, pa) and (b, pb).
/// Returns the shortlex-smallest word on which the outputs differ.
inline std::optional<Word> product_bfs(const MealyMachine& a, StateId pa, const MealyMachine& b,
                                       StateId pb) {
  const std::size_t nb = b.num_states(), k = a.num_inputs();
  const std::size_t total = a.num_states() * nb;
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(total, kUnseen);
  std::vector<Symbol> via(total, 0);
  std::deque<std::size_t> queue;
  const std::size_t root = pa * nb + pb;
  parent[root] = root;
  queue.push_back(root);
  auto path_to = [&](std::size_t node) {
    Word w;
    while (node != root) {
      w.push_back(via[node]);
      node = parent[node];
    }
    std::reverse(w.begin(), w.end());
    return w;
  };
  while (!queue.empty()) {
    const std::size_t node = queue.front();
    queue.pop_front();
    const auto p = static_cast<StateId>(node / nb), q = static_cast<StateId>(node % nb);
    for (Symbol x = 0; x < k; ++x) {
      if (a.output(p, x) != b.output(q, x)) {
        Word w = path_to(node);
        w.push_back(x);
        return w;
      }
    }
    for (Symbol x = 0; x < k; ++x) {
      const std::size_t succ = a.successor(p, x) * nb + b.successor(q, x);
      if (parent[succ] == kUnseen) {
        parent[succ] = node;
        via[succ] = x;
        queue.push_back(succ);
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Outcome of a machine equivalence check. `witness` is set iff the machines
/// are separated.
struct EquivalenceVerdict {
  std::optional<Word> witness;
  bool equivalent() const noexcept { return !witness.has_value(); }
  explicit operator bool() const noexcept { return equivalent(); }
};

/// Minimum-length word separating the two initial states, ties broken by the
/// declared input order. `nullopt` iff the machines are equivalent.
inline std::optional<Word> shortest_separating_sequence(const MealyMachine& a,
                                                        const MealyMachine& b) {
  detail::require_same_alphabet(a, b);
  return detail::product_bfs(a, a.initial(), b, b.initial());
}

/// Bisimilarity of the initial states, decided by partition refinement on
/// the disjoint union; the witness is the shortest separating sequence.
inline EquivalenceVerdict equivalent(const MealyMachine& a, const MealyMachine& b) {
  detail::require_same_alphabet(a, b);
  std::vector<std::size_t> offsets;
  const auto sys = detail::disjoint_union({&a, &b}, &offsets);
  const auto block = detail::refine(sys);
  if (block[a.initial()] == block[offsets[1] + b.initial()]) return {};
  return {detail::product_bfs(a, a.initial(), b, b.initial())};
}

/// Shortest suffix on which states p and q of `m` produce different outputs.
inline std::optional<Word> state_separating_suffix(const MealyMachine& m, StateId p, StateId q) {
  if (p >= m.num_states()) throw UnknownState(std::to_string(p));
  if (q >= m.num_states()) throw UnknownState(std::to_string(q));
  if (p == q) return std::nullopt;
  return detail::product_bfs(m, p, m, q);
}

/// Shortest suffix separating state p of `a` from state q of `b`.
inline std::optional<Word> cross_separating_suffix(const MealyMachine& a, StateId p,
                                                   const MealyMachine& b, StateId q) {
  detail::require_same_alphabet(a, b);
  return detail::product_bfs(a, p, b, q);
}

/// Shortlex-smallest access sequence for every state; `nullopt` for
/// unreachable states.
inline std::vector<std::optional<Word>> access_sequences(const MealyMachine& m) {
  std::vector<std::optional<Word>> acc(m.num_states());
  std::deque<StateId> queue{m.initial()};
  acc[m.initial()] = Word{};
  while (!queue.empty()) {
    const StateId q = queue.front();
    queue.pop_front();
    for (Symbol a = 0; a < m.num_inputs(); ++a) {
      const StateId t = m.successor(q, a);
      if (!acc[t]) {
        Word w = *acc[q];
        w.push_back(a);
        acc[t] = std::move(w);
        queue.push_back(t);
      }
    }
  }
  return acc;
}

/// States in breadth-first discovery order from the initial state.
inline std::vector<StateId> reachable_states(const MealyMachine& m) {
  std::vector<StateId> order{m.initial()};
  std::vector<bool> seen(m.num_states(), false);
  seen[m.initial()] = true;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (Symbol a = 0; a < m.num_inputs(); ++a) {
      const StateId t = m.successor(order[i], a);
      if (!seen[t]) {
        seen[t] = true;
        order.push_back(t);
      }
    }
  return order;
}

/// Minimal machine equivalent to `m`. States are numbered in breadth-first
/// order from the initial state, so equivalent inputs give identical tables;
/// each state keeps the name of its first-discovered member.
inline MealyMachine minimize(const MealyMachine& m) {
  const auto sys = detail::disjoint_union({&m});
  const auto block = detail::refine(sys);
  const std::size_t k = m.num_inputs();
  constexpr StateId kNone = static_cast<StateId>(-1);
  std::vector<StateId> block_state(m.num_states(), kNone);
  std::vector<StateId> representative;
  std::vector<StateId> queue{m.initial()};
  block_state[block[m.initial()]] = 0;
  representative.push_back(m.initial());
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (Symbol a = 0; a < k; ++a) {
      const StateId t = m.successor(queue[i], a);
      if (block_state[block[t]] == kNone) {
        block_state[block[t]] = static_cast<StateId>(representative.size());
        representative.push_back(t);
        queue.push_back(t);
      }
    }
  const std::size_t n = representative.size();
  std::vector<std::string> names(n);
  std::vector<StateId> next(n * k);
  std::vector<std::string> out(n * k);
  for (StateId s = 0; s < n; ++s) {
    const StateId q = representative[s];
    names[s] = m.state_name(q);
    for (Symbol a = 0; a < k; ++a) {
      next[s * k + a] = block_state[block[m.successor(q, a)]];
      out[s * k + a] = m.output(q, a);
    }
  }
  return MealyMachine(m.inputs(), std::move(names), 0, std::move(next), out);
}

inline bool is_minimal(const MealyMachine& m) {
  return minimize(m).num_states() == m.num_states();
}

/// Pairwise shortest separating suffixes of all states of one machine,
/// stored symmetrically.
class SeparatorTable {
public:
  explicit SeparatorTable(const MealyMachine& m) : n_(m.num_states()), table_(n_ * n_) {
    for (StateId p = 0; p < n_; ++p)
      for (StateId q = p + 1; q < n_; ++q) {
        auto w = detail::product_bfs(m, p, m, q);
        table_[p * n_ + q] = w;
        table_[q * n_ + p] = std::move(w);
      }
  }

  const std::optional<Word>& get(StateId p, StateId q) const { return table_.at(p * n_ + q); }

  /// Identification set of `q`: one separator against each other state,
  /// deduplicated. Sets built this way are harmonised: for p != q the
  /// sets of p and q share a common separator.
  std::vector<Word> identification_set(StateId q) const {
    std::set<Word> ws;
    for (StateId p = 0; p < n_; ++p)
      if (p != q && table_[q * n_ + p]) ws.insert(*table_[q * n_ + p]);
    return {ws.begin(), ws.end()};
  }

  /// Union of all separators (a characterising set for minimal machines).
  std::vector<Word> characterizing_set() const {
    std::set<Word> ws;
    for (const auto& w : table_)
      if (w) ws.insert(*w);
    return {ws.begin(), ws.end()};
  }

  std::size_t size() const noexcept { return n_; }

private:
  std::size_t n_;
  std::vector<std::optional<Word>> table_;
};

}  // namespace fsmprint
