#pragma once

#include <string>
#include <vector>

#include "fsmprint/mealy.hpp"
#include "fsmprint/random.hpp"
#include "fsmprint/synthetic.hpp"

namespace fixtures {

using namespace fsmprint;

inline const Alphabet& tls_inputs() {
  static const Alphabet a{"hello", "kex", "data"};
  return a;
}

/// The three toy TLS machines, transcribed state by state.
inline MealyMachine m0() {
  return make_machine(tls_inputs(), {{"q0", "hello", "q1", "hello"}, {"q0", "kex", "q0", "error"},
                                     {"q0", "data", "q0", "error"},  {"q1", "hello", "q1", "hello"},
                                     {"q1", "kex", "q2", "kex"},     {"q1", "data", "q1", "error"},
                                     {"q2", "hello", "q1", "hello"}, {"q2", "kex", "q2", "kex"},
                                     {"q2", "data", "q2", "data"}});
}

inline MealyMachine m1() {
  return make_machine(tls_inputs(), {{"r0", "hello", "r1", "hello"}, {"r0", "kex", "r0", "error"},
                                     {"r0", "data", "r0", "error"},  {"r1", "hello", "r1", "error"},
                                     {"r1", "kex", "r2", "kex"},     {"r1", "data", "r1", "error"},
                                     {"r2", "hello", "r1", "error"}, {"r2", "kex", "r2", "error"},
                                     {"r2", "data", "r2", "data"}});
}

inline MealyMachine m2() {
  return make_machine(tls_inputs(), {{"s0", "hello", "s1", "hello"}, {"s0", "kex", "s0", "error"},
                                     {"s0", "data", "s0", "error"},  {"s1", "hello", "s1", "error"},
                                     {"s1", "kex", "s2", "kex"},     {"s1", "data", "s1", "error"},
                                     {"s2", "hello", "s0", "error"}, {"s2", "kex", "s0", "error"},
                                     {"s2", "data", "s2", "data"}});
}

inline std::vector<MealyMachine> trio() { return {m0(), m1(), m2()}; }

/// Word from input names.
inline Word w(std::initializer_list<const char*> names) {
  Word out;
  for (auto n : names) out.push_back(tls_inputs().index(n));
  return out;
}

inline OutputWord o(std::initializer_list<const char*> names) { return OutputWord(names.begin(), names.end()); }

/// Random minimal machine with `lo..hi` states.
inline MealyMachine random_minimal(Rng& rng, std::size_t lo, std::size_t hi, std::size_t inputs,
                                   std::size_t outputs) {
  return random_minimal_machine(rng, uniform_between(rng, lo, hi), inputs, outputs);
}

}  // namespace fixtures
