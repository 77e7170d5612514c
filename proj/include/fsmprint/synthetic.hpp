#pragma once

#include <string>
#include <vector>

#include "fsmprint/mealy.hpp"
#include "fsmprint/mutation.hpp"
#include "fsmprint/random.hpp"
#include "fsmprint/separation.hpp"

namespace fsmprint {

/// Alphabet i0, i1, ...
inline Alphabet numbered_inputs(std::size_t k) {
  Alphabet a;
  for (std::size_t i = 0; i < k; ++i) a.add("i" + std::to_string(i));
  return a;
}

/// Uniformly random transitions and outputs, followed by a repair pass that
/// re-targets random edges of reachable states at unreachable ones until
/// every state is reachable. The result may be non-minimal.
inline MealyMachine random_machine(Rng& rng, std::size_t states, std::size_t inputs,
                                   std::size_t outputs) {
  if (states == 0 || inputs == 0 || outputs == 0)
    throw InvalidMachine("random machine needs at least one state, input and output");
  const std::size_t k = inputs;
  std::vector<StateId> next(states * k);
  std::vector<std::string> out(states * k);
  for (std::size_t c = 0; c < states * k; ++c) {
    next[c] = static_cast<StateId>(index_below(rng, states));
    out[c] = "o" + std::to_string(index_below(rng, outputs));
  }
  std::vector<std::string> names(states);
  for (std::size_t q = 0; q < states; ++q) names[q] = "q" + std::to_string(q);

  while (true) {
    std::vector<bool> seen(states, false);
    std::vector<StateId> order{0};
    seen[0] = true;
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t a = 0; a < k; ++a) {
        const StateId t = next[order[i] * k + a];
        if (!seen[t]) {
          seen[t] = true;
          order.push_back(t);
        }
      }
    if (order.size() == states) break;
    StateId lost = 0;
    while (seen[lost]) ++lost;
    const StateId from = order[index_below(rng, order.size())];
    next[from * k + index_below(rng, k)] = lost;
  }
  return MealyMachine(numbered_inputs(inputs), std::move(names), 0, std::move(next), std::move(out));
}

/// Draws random machines until one is minimal with exactly `states` states.
inline MealyMachine random_minimal_machine(Rng& rng, std::size_t states, std::size_t inputs,
                                           std::size_t outputs) {
  if (states > 1 && outputs < 2)
    throw InvalidMachine("a minimal machine with several states needs two outputs");
  while (true) {
    auto m = random_machine(rng, states, inputs, outputs);
    if (is_minimal(m)) return m;
  }
}

/// Applies random mutations until the result is minimal and inequivalent to
/// every machine in `avoid`. Gives up after `attempts` tries.
inline std::optional<MealyMachine> random_mutant(Rng& rng, const MealyMachine& base,
                                                 const std::vector<MealyMachine>& avoid,
                                                 std::size_t attempts = 200) {
  static constexpr MutationKind kinds[] = {MutationKind::DivertTransition, MutationKind::ChangeOutput,
                                           MutationKind::AddState, MutationKind::RemoveState};
  for (std::size_t i = 0; i < attempts; ++i) {
    MutationResult r;
    try {
      r = mutate(base, kinds[index_below(rng, 4)], rng);
    } catch (const MutationInapplicable&) {
      continue;
    }
    if (r.equivalent_to_original) continue;
    auto m = minimize(r.machine);
    bool fresh = true;
    for (const auto& other : avoid)
      if (equivalent(other, m).equivalent()) {
        fresh = false;
        break;
      }
    if (fresh) return m;
  }
  return std::nullopt;
}

}  // namespace fsmprint
