#pragma once

// Brute-force reference implementations used to check the library. They only
// touch the machine tables and never call the library's algorithms.

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "fsmprint/mealy.hpp"

namespace oracle {

using fsmprint::MealyMachine;
using fsmprint::StateId;
using fsmprint::Symbol;
using fsmprint::Word;

inline std::vector<std::string> outputs_from(const MealyMachine& m, StateId q, const Word& w) {
  std::vector<std::string> out;
  for (auto a : w) {
    out.push_back(m.output(q, a));
    q = m.successor(q, a);
  }
  return out;
}

inline std::vector<std::string> outputs(const MealyMachine& m, const Word& w) {
  return outputs_from(m, m.initial(), w);
}

/// All words of length exactly `len` over k inputs, lexicographic.
inline std::vector<Word> words_of_length(std::size_t k, std::size_t len) {
  std::vector<Word> out{Word{}};
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<Word> next;
    for (const auto& w : out)
      for (Symbol a = 0; a < k; ++a) {
        auto v = w;
        v.push_back(a);
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}

/// Shortlex-first word of length <= max_len on which the two states differ.
inline std::optional<Word> shortest_separator(const MealyMachine& a, StateId p, const MealyMachine& b,
                                              StateId q, std::size_t max_len) {
  for (std::size_t len = 1; len <= max_len; ++len)
    for (const auto& w : words_of_length(a.num_inputs(), len))
      if (outputs_from(a, p, w) != outputs_from(b, q, w)) return w;
  return std::nullopt;
}

inline std::optional<Word> shortest_separator(const MealyMachine& a, const MealyMachine& b,
                                              std::size_t max_len) {
  return shortest_separator(a, a.initial(), b, b.initial(), max_len);
}

/// Explores every reachable pair of the synchronous product.
inline bool states_bisimilar(const MealyMachine& a, StateId p, const MealyMachine& b, StateId q) {
  std::set<std::pair<StateId, StateId>> seen{{p, q}};
  std::vector<std::pair<StateId, StateId>> stack{{p, q}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    for (Symbol s = 0; s < a.num_inputs(); ++s) {
      if (a.output(x, s) != b.output(y, s)) return false;
      std::pair<StateId, StateId> n{a.successor(x, s), b.successor(y, s)};
      if (seen.insert(n).second) stack.push_back(n);
    }
  }
  return true;
}

inline bool bisimilar(const MealyMachine& a, const MealyMachine& b) {
  if (a.num_inputs() != b.num_inputs()) return false;
  for (Symbol s = 0; s < a.num_inputs(); ++s)
    if (a.inputs()[s] != b.inputs()[s]) return false;
  return states_bisimilar(a, a.initial(), b, b.initial());
}

inline std::vector<StateId> reachable(const MealyMachine& m) {
  std::vector<bool> seen(m.num_states(), false);
  std::vector<StateId> order{m.initial()};
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

/// Number of pairwise-inequivalent reachable states.
inline std::size_t minimal_size(const MealyMachine& m) {
  std::vector<StateId> reps;
  for (auto q : reachable(m)) {
    bool fresh = true;
    for (auto r : reps)
      if (states_bisimilar(m, q, m, r)) {
        fresh = false;
        break;
      }
    if (fresh) reps.push_back(q);
  }
  return reps.size();
}

/// Whether `w` separates the pair.
inline bool separates(const MealyMachine& a, const MealyMachine& b, const Word& w) {
  return outputs(a, w) != outputs(b, w);
}

/// Isomorphism of reachable parts, matching states along a joint traversal.
inline bool isomorphic(const MealyMachine& a, const MealyMachine& b) {
  if (a.num_states() != b.num_states() || a.num_inputs() != b.num_inputs()) return false;
  std::vector<long> map(a.num_states(), -1), back(b.num_states(), -1);
  std::vector<std::pair<StateId, StateId>> stack{{a.initial(), b.initial()}};
  map[a.initial()] = b.initial();
  back[b.initial()] = a.initial();
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    for (Symbol s = 0; s < a.num_inputs(); ++s) {
      if (a.inputs()[s] != b.inputs()[s] || a.output(x, s) != b.output(y, s)) return false;
      const StateId nx = a.successor(x, s), ny = b.successor(y, s);
      if (map[nx] == -1 && back[ny] == -1) {
        map[nx] = ny;
        back[ny] = nx;
        stack.emplace_back(nx, ny);
      } else if (map[nx] != static_cast<long>(ny)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace oracle
