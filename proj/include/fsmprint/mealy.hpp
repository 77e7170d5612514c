#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fsmprint/errors.hpp"

namespace fsmprint {

/// Index of an input symbol in an Alphabet.
using Symbol = std::uint32_t;
/// Dense state index; external state names are kept as labels.
using StateId = std::uint32_t;

/// An input sequence. Symbols index into the input alphabet of the machine or
/// session it is applied to.
using Word = std::vector<Symbol>;
using OutputWord = std::vector<std::string>;
/// Finite set of input sequences (duplicates collapse, iteration is sorted).
using Language = std::set<Word>;

/// Ordered set of symbol names. The declared order is the tie-breaking order
/// for every "lexicographically smallest" choice in the library.
class Alphabet {
public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> symbols) {
    for (auto& s : symbols) add(std::move(s));
  }

  Alphabet(std::initializer_list<std::string> symbols)
      : Alphabet(std::vector<std::string>(symbols)) {}

  /// Appends a symbol; returns the index of the existing entry if already present.
  Symbol add(std::string symbol) {
    if (auto it = index_.find(symbol); it != index_.end()) return it->second;
    const auto id = static_cast<Symbol>(symbols_.size());
    index_.emplace(symbol, id);
    symbols_.push_back(std::move(symbol));
    return id;
  }

  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  const std::string& operator[](Symbol s) const { return symbols_.at(s); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

  std::optional<Symbol> find(const std::string& symbol) const {
    if (auto it = index_.find(symbol); it != index_.end()) return it->second;
    return std::nullopt;
  }

  Symbol index(const std::string& symbol) const {
    if (auto s = find(symbol)) return *s;
    throw UnknownInputSymbol(symbol);
  }

  Word encode(const std::vector<std::string>& names) const {
    Word w;
    w.reserve(names.size());
    for (const auto& n : names) w.push_back(index(n));
    return w;
  }

  std::vector<std::string> decode(const Word& w) const {
    std::vector<std::string> names;
    names.reserve(w.size());
    for (auto s : w) names.push_back((*this)[s]);
    return names;
  }

  bool same_set(const Alphabet& other) const {
    if (size() != other.size()) return false;
    for (const auto& s : symbols_)
      if (!other.find(s)) return false;
    return true;
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, Symbol> index_;
};

/// Renders a word as `a·b·c` (ε for the empty word).
inline std::string to_string(const Word& w, const Alphabet& inputs, const std::string& sep = "·") {
  if (w.empty()) return "ε";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += sep;
    out += inputs[w[i]];
  }
  return out;
}

/// Complete deterministic Mealy machine. Immutable after construction.
///
/// Transition and output tables are row-major over (state, input). Output
/// symbols are interned in first-use order.
class MealyMachine {
public:
  MealyMachine() = default;

  MealyMachine(Alphabet inputs, std::vector<std::string> state_names, StateId initial,
               std::vector<StateId> successors, const std::vector<std::string>& outputs)
      : inputs_(std::move(inputs)), names_(std::move(state_names)), initial_(initial),
        next_(std::move(successors)) {
    const std::size_t n = names_.size();
    const std::size_t k = inputs_.size();
    if (n == 0) throw InvalidMachine("machine has no states");
    if (initial_ >= n) throw InvalidMachine("initial state out of range");
    if (next_.size() != n * k || outputs.size() != n * k)
      throw InvalidMachine("transition/output tables are not total over states x inputs");
    for (auto t : next_)
      if (t >= n) throw InvalidMachine("transition target out of range");
    std::unordered_map<std::string, std::uint32_t> ids;
    out_.reserve(outputs.size());
    for (const auto& o : outputs) {
      auto [it, fresh] = ids.emplace(o, static_cast<std::uint32_t>(outputs_.size()));
      if (fresh) outputs_.push_back(o);
      out_.push_back(it->second);
    }
  }

  std::size_t num_states() const noexcept { return names_.size(); }
  std::size_t num_inputs() const noexcept { return inputs_.size(); }
  const Alphabet& inputs() const noexcept { return inputs_; }
  /// Output symbols in first-use order.
  const std::vector<std::string>& outputs() const noexcept { return outputs_; }
  StateId initial() const noexcept { return initial_; }

  const std::string& state_name(StateId q) const { return names_.at(q); }
  const std::vector<std::string>& state_names() const noexcept { return names_; }

  std::optional<StateId> find_state(const std::string& name) const {
    for (StateId q = 0; q < names_.size(); ++q)
      if (names_[q] == name) return q;
    return std::nullopt;
  }

  StateId state(const std::string& name) const {
    if (auto q = find_state(name)) return *q;
    throw UnknownState(name);
  }

  StateId successor(StateId q, Symbol a) const { return next_[index(q, a)]; }
  const std::string& output(StateId q, Symbol a) const { return outputs_[out_[index(q, a)]]; }
  std::uint32_t output_id(StateId q, Symbol a) const { return out_[index(q, a)]; }

  /// Flat tables, handy for constructing variants.
  const std::vector<StateId>& successor_table() const noexcept { return next_; }
  std::vector<std::string> output_table() const {
    std::vector<std::string> t;
    t.reserve(out_.size());
    for (auto o : out_) t.push_back(outputs_[o]);
    return t;
  }

private:
  std::size_t index(StateId q, Symbol a) const {
    if (q >= names_.size()) throw UnknownState(std::to_string(q));
    if (a >= inputs_.size()) throw UnknownInputSymbol("#" + std::to_string(a));
    return static_cast<std::size_t>(q) * inputs_.size() + a;
  }

  Alphabet inputs_;
  std::vector<std::string> names_;
  StateId initial_ = 0;
  std::vector<StateId> next_;
  std::vector<std::uint32_t> out_;
  std::vector<std::string> outputs_;
};

struct StepResult {
  OutputWord outputs;
  StateId state;
};

/// Runs `w` from state `from`, returning the emitted outputs and the reached state.
inline StepResult step_sequence(const MealyMachine& m, StateId from, const Word& w) {
  if (from >= m.num_states()) throw UnknownState(std::to_string(from));
  StepResult r{{}, from};
  r.outputs.reserve(w.size());
  for (auto a : w) {
    r.outputs.push_back(m.output(r.state, a));
    r.state = m.successor(r.state, a);
  }
  return r;
}

inline StepResult step_sequence(const MealyMachine& m, StateId from,
                                const std::vector<std::string>& w) {
  return step_sequence(m, from, m.inputs().encode(w));
}

/// Outputs of `w` from the initial state.
inline OutputWord run(const MealyMachine& m, const Word& w) {
  return step_sequence(m, m.initial(), w).outputs;
}

inline StateId reached_state(const MealyMachine& m, const Word& w, StateId from) {
  for (auto a : w) from = m.successor(from, a);
  return from;
}

inline StateId reached_state(const MealyMachine& m, const Word& w) {
  return reached_state(m, w, m.initial());
}

/// Re-indexes `m` so that its inputs follow `order`. Both alphabets must
/// contain the same symbols.
inline MealyMachine reorder_inputs(const MealyMachine& m, const Alphabet& order) {
  if (!m.inputs().same_set(order)) throw AlphabetMismatch("input alphabets differ");
  if (m.inputs() == order) return m;
  const std::size_t n = m.num_states(), k = order.size();
  std::vector<StateId> next(n * k);
  std::vector<std::string> out(n * k);
  for (StateId q = 0; q < n; ++q)
    for (Symbol a = 0; a < k; ++a) {
      const Symbol old = m.inputs().index(order[a]);
      next[q * k + a] = m.successor(q, old);
      out[q * k + a] = m.output(q, old);
    }
  return MealyMachine(order, m.state_names(), m.initial(), std::move(next), out);
}

/// A machine under construction whose transition map may have holes.
class PartialMealy {
public:
  PartialMealy() = default;
  explicit PartialMealy(Alphabet inputs) : inputs_(std::move(inputs)) {}

  Symbol add_input(const std::string& symbol) {
    const auto before = inputs_.size();
    const Symbol s = inputs_.add(symbol);
    if (inputs_.size() != before)
      for (auto& row : rows_) row.emplace_back();
    return s;
  }

  StateId add_state(std::string name) {
    names_.push_back(std::move(name));
    rows_.emplace_back(inputs_.size());
    return static_cast<StateId>(names_.size() - 1);
  }

  std::optional<StateId> find_state(const std::string& name) const {
    for (StateId q = 0; q < names_.size(); ++q)
      if (names_[q] == name) return q;
    return std::nullopt;
  }

  void set_initial(StateId q) { initial_ = q; }
  std::optional<StateId> initial() const { return initial_; }

  void set_transition(StateId q, Symbol a, StateId to, std::string output) {
    rows_.at(q).at(a) = Cell{to, std::move(output)};
  }

  bool defined(StateId q, Symbol a) const { return rows_.at(q).at(a).has_value(); }

  std::size_t num_states() const noexcept { return names_.size(); }
  const Alphabet& inputs() const noexcept { return inputs_; }
  const std::vector<std::string>& state_names() const noexcept { return names_; }

  bool uses_output(const std::string& o) const {
    for (const auto& row : rows_)
      for (const auto& c : row)
        if (c && c->output == o) return true;
    return false;
  }

  bool complete() const {
    for (const auto& row : rows_)
      for (const auto& c : row)
        if (!c) return false;
    return true;
  }

  /// First undefined (state, input) cell in row-major order.
  std::optional<std::pair<StateId, Symbol>> first_hole() const {
    for (StateId q = 0; q < rows_.size(); ++q)
      for (Symbol a = 0; a < rows_[q].size(); ++a)
        if (!rows_[q][a]) return std::make_pair(q, a);
    return std::nullopt;
  }

  /// Fills every undefined cell with `fill(q, a)` -> (target, output).
  template <class Fill>
  PartialMealy& fill_holes(Fill&& fill) {
    for (StateId q = 0; q < rows_.size(); ++q)
      for (Symbol a = 0; a < rows_[q].size(); ++a)
        if (!rows_[q][a]) {
          auto [to, out] = fill(q, a);
          rows_[q][a] = Cell{to, std::move(out)};
        }
    return *this;
  }

  MealyMachine build() const {
    if (!initial_) throw InvalidMachine("no initial state");
    if (auto hole = first_hole())
      throw InvalidMachine("undefined transition from '" + names_[hole->first] + "' on '" +
                           inputs_[hole->second] + "'");
    const std::size_t k = inputs_.size();
    std::vector<StateId> next(names_.size() * k);
    std::vector<std::string> out(names_.size() * k);
    for (StateId q = 0; q < names_.size(); ++q)
      for (Symbol a = 0; a < k; ++a) {
        next[q * k + a] = rows_[q][a]->target;
        out[q * k + a] = rows_[q][a]->output;
      }
    return MealyMachine(inputs_, names_, *initial_, std::move(next), out);
  }

private:
  struct Cell {
    StateId target;
    std::string output;
  };

  Alphabet inputs_;
  std::vector<std::string> names_;
  std::optional<StateId> initial_;
  std::vector<std::vector<std::optional<Cell>>> rows_;
};

/// Convenience builder from (state, input, target, output) rows. States are
/// created in first-mention order; the first state named is initial unless
/// `initial` is given.
struct TransitionSpec {
  std::string from;
  std::string input;
  std::string to;
  std::string output;
};

inline MealyMachine make_machine(const Alphabet& inputs, const std::vector<TransitionSpec>& rows,
                                 const std::string& initial = {}) {
  PartialMealy pm(inputs);
  auto state = [&](const std::string& name) {
    if (auto q = pm.find_state(name)) return *q;
    return pm.add_state(name);
  };
  if (!initial.empty()) pm.set_initial(state(initial));
  for (const auto& r : rows) {
    const StateId q = state(r.from);
    if (!pm.initial()) pm.set_initial(q);
    pm.set_transition(q, inputs.index(r.input), state(r.to), r.output);
  }
  return pm.build();
}

}  // namespace fsmprint
