#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fsmprint/mealy.hpp"
#include "fsmprint/random.hpp"
#include "fsmprint/separation.hpp"

namespace fsmprint {

enum class MutationKind { DivertTransition, RemoveState, AddState, ChangeOutput };

inline std::string_view to_string(MutationKind k) {
  switch (k) {
    case MutationKind::DivertTransition: return "divert";
    case MutationKind::RemoveState: return "remove-state";
    case MutationKind::AddState: return "add-state";
    case MutationKind::ChangeOutput: return "change-output";
  }
  return "?";
}

inline MutationKind parse_mutation_kind(std::string_view s) {
  for (auto k : {MutationKind::DivertTransition, MutationKind::RemoveState,
                 MutationKind::AddState, MutationKind::ChangeOutput})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown mutation kind '" + std::string(s) + "'");
}

struct MutationResult {
  MealyMachine machine;
  /// The mutant still behaves like the original; callers may retry.
  bool equivalent_to_original = false;
  std::string description;
};

inline MealyMachine divert_transition(const MealyMachine& m, StateId q, Symbol a, StateId target) {
  if (target >= m.num_states()) throw UnknownState(std::to_string(target));
  auto next = m.successor_table();
  next.at(q * m.num_inputs() + a) = target;
  return MealyMachine(m.inputs(), m.state_names(), m.initial(), std::move(next), m.output_table());
}

inline MealyMachine change_output(const MealyMachine& m, StateId q, Symbol a,
                                  const std::string& output) {
  auto out = m.output_table();
  out.at(q * m.num_inputs() + a) = output;
  return MealyMachine(m.inputs(), m.state_names(), m.initial(), m.successor_table(), out);
}

/// Deletes `victim`; its in-edges (and the initial marker, if it was
/// initial) move to `redirect`.
inline MealyMachine remove_state(const MealyMachine& m, StateId victim, StateId redirect) {
  const std::size_t n = m.num_states(), k = m.num_inputs();
  if (n < 2) throw MutationInapplicable("cannot remove the only state");
  if (victim >= n) throw UnknownState(std::to_string(victim));
  if (redirect >= n || redirect == victim) throw MutationInapplicable("invalid redirect state");
  auto renumber = [&](StateId q) {
    if (q == victim) q = redirect;
    return q > victim ? q - 1 : q;
  };
  std::vector<std::string> names;
  std::vector<StateId> next;
  std::vector<std::string> out;
  for (StateId q = 0; q < n; ++q) {
    if (q == victim) continue;
    names.push_back(m.state_name(q));
    for (Symbol a = 0; a < k; ++a) {
      next.push_back(renumber(m.successor(q, a)));
      out.push_back(m.output(q, a));
    }
  }
  return MealyMachine(m.inputs(), std::move(names), renumber(m.initial()), std::move(next), out);
}

/// Appends a state with the given outgoing row. The new state is unreachable
/// until some transition is diverted to it.
inline MealyMachine add_state(const MealyMachine& m, const std::string& name,
                              const std::vector<StateId>& targets,
                              const std::vector<std::string>& outputs) {
  const std::size_t k = m.num_inputs();
  if (targets.size() != k || outputs.size() != k)
    throw InvalidMachine("new state row must cover every input");
  auto names = m.state_names();
  names.push_back(name);
  auto next = m.successor_table();
  next.insert(next.end(), targets.begin(), targets.end());
  auto out = m.output_table();
  out.insert(out.end(), outputs.begin(), outputs.end());
  return MealyMachine(m.inputs(), std::move(names), m.initial(), std::move(next), out);
}

namespace detail {

inline std::string fresh_state_name(const MealyMachine& m) {
  for (std::size_t i = m.num_states();; ++i) {
    std::string name = "s" + std::to_string(i);
    if (!m.find_state(name)) return name;
  }
}

}  // namespace detail

/// Applies one random mutation of the given kind. Deterministic for a given
/// generator state. AddState wires the new state in by diverting one random
/// transition to it.
inline MutationResult mutate(const MealyMachine& m, MutationKind kind, Rng& rng) {
  const std::size_t n = m.num_states(), k = m.num_inputs();
  if (k == 0) throw MutationInapplicable("machine has no inputs");
  MutationResult r;
  const auto& in = m.inputs();
  switch (kind) {
    case MutationKind::DivertTransition: {
      if (n < 2) throw MutationInapplicable("divert needs at least two states");
      const auto q = static_cast<StateId>(index_below(rng, n));
      const auto a = static_cast<Symbol>(index_below(rng, k));
      auto t = static_cast<StateId>(index_below(rng, n - 1));
      if (t >= m.successor(q, a)) ++t;
      r.machine = divert_transition(m, q, a, t);
      r.description = "divert " + m.state_name(q) + " --" + in[a] + "--> " + m.state_name(t);
      break;
    }
    case MutationKind::RemoveState: {
      if (n < 2) throw MutationInapplicable("cannot remove the only state");
      const auto victim = static_cast<StateId>(index_below(rng, n));
      auto redirect = static_cast<StateId>(index_below(rng, n - 1));
      if (redirect >= victim) ++redirect;
      r.machine = remove_state(m, victim, redirect);
      r.description = "remove " + m.state_name(victim) + " (in-edges to " +
                      m.state_name(redirect) + ")";
      break;
    }
    case MutationKind::AddState: {
      std::vector<StateId> targets(k);
      std::vector<std::string> outs(k);
      for (Symbol a = 0; a < k; ++a) {
        targets[a] = static_cast<StateId>(index_below(rng, n + 1));
        outs[a] = m.outputs()[index_below(rng, m.outputs().size())];
      }
      const auto name = detail::fresh_state_name(m);
      auto grown = add_state(m, name, targets, outs);
      const auto q = static_cast<StateId>(index_below(rng, n));
      const auto a = static_cast<Symbol>(index_below(rng, k));
      r.machine = divert_transition(grown, q, a, static_cast<StateId>(n));
      r.description = "add " + name + " entered from " + m.state_name(q) + " on " + in[a];
      break;
    }
    case MutationKind::ChangeOutput: {
      if (m.outputs().size() < 2) throw MutationInapplicable("only one output symbol in use");
      const auto q = static_cast<StateId>(index_below(rng, n));
      const auto a = static_cast<Symbol>(index_below(rng, k));
      const auto current = m.output_id(q, a);
      auto o = static_cast<std::uint32_t>(index_below(rng, m.outputs().size() - 1));
      if (o >= current) ++o;
      r.machine = change_output(m, q, a, m.outputs()[o]);
      r.description = "output " + m.state_name(q) + "/" + in[a] + " := " + m.outputs()[o];
      break;
    }
  }
  r.equivalent_to_original = equivalent(m, r.machine).equivalent();
  return r;
}

/// Makes a partial machine total: every undefined (state, input) becomes a
/// self-loop emitting `epsilon`.
inline MealyMachine input_complete(PartialMealy pm, const std::string& epsilon) {
  if (pm.uses_output(epsilon)) throw EpsilonCollision(epsilon);
  pm.fill_holes([&](StateId q, Symbol) { return std::make_pair(q, epsilon); });
  return pm.build();
}

}  // namespace fsmprint
