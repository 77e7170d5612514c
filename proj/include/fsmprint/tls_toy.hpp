#pragma once

#include <array>

#include "fsmprint/mealy.hpp"

namespace fsmprint {

/// Three simplified TLS handshakes over {hello, kex, data}. The first
/// echoes handshake messages; the second and third reject repeated hellos
/// and differ after a key exchange.
inline std::array<MealyMachine, 3> tls_toy_models() {
  const Alphabet io{"hello", "kex", "data"};
  return {
      make_machine(io, {{"q0", "hello", "q1", "hello"},
                        {"q0", "kex", "q0", "error"},
                        {"q0", "data", "q0", "error"},
                        {"q1", "hello", "q1", "hello"},
                        {"q1", "kex", "q2", "kex"},
                        {"q1", "data", "q1", "error"},
                        {"q2", "hello", "q1", "hello"},
                        {"q2", "kex", "q2", "kex"},
                        {"q2", "data", "q2", "data"}}),
      make_machine(io, {{"r0", "hello", "r1", "hello"},
                        {"r0", "kex", "r0", "error"},
                        {"r0", "data", "r0", "error"},
                        {"r1", "hello", "r1", "error"},
                        {"r1", "kex", "r2", "kex"},
                        {"r1", "data", "r1", "error"},
                        {"r2", "hello", "r1", "error"},
                        {"r2", "kex", "r2", "error"},
                        {"r2", "data", "r2", "data"}}),
      make_machine(io, {{"s0", "hello", "s1", "hello"},
                        {"s0", "kex", "s0", "error"},
                        {"s0", "data", "s0", "error"},
                        {"s1", "hello", "s1", "error"},
                        {"s1", "kex", "s2", "kex"},
                        {"s1", "data", "s1", "error"},
                        {"s2", "hello", "s0", "error"},
                        {"s2", "kex", "s0", "error"},
                        {"s2", "data", "s2", "data"}}),
  };
}

}  // namespace fsmprint
