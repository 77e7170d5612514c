#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fsmprint/mealy.hpp"
#include "fsmprint/random.hpp"
#include "fsmprint/separation.hpp"
#include "fsmprint/sul.hpp"

namespace fsmprint {

/// A set of separating sequences covering every pair of reference models.
struct Fingerprint {
  /// Deduplicated, in order of first use by a pair.
  std::vector<Word> sequences;
  /// (i, j) with i < j -> the sequence separating models i and j.
  std::map<std::pair<std::size_t, std::size_t>, Word> pair_index;

  void add_pair(std::size_t i, std::size_t j, Word w) {
    if (std::find(sequences.begin(), sequences.end(), w) == sequences.end()) sequences.push_back(w);
    pair_index[{std::min(i, j), std::max(i, j)}] = std::move(w);
  }
};

/// Adds the pairs (i, added) for all i < added to `fp`.
inline void extend_fingerprint(Fingerprint& fp, std::span<const MealyMachine> models,
                               std::size_t added) {
  for (std::size_t i = 0; i < added; ++i) {
    auto w = shortest_separating_sequence(models[i], models[added]);
    if (!w) throw DuplicateModels(i, added);
    fp.add_pair(i, added, std::move(*w));
  }
}

/// One shortest separating sequence per model pair. Throws DuplicateModels
/// if two references are equivalent.
inline Fingerprint build_fingerprint(std::span<const MealyMachine> models) {
  Fingerprint fp;
  for (std::size_t j = 1; j < models.size(); ++j) extend_fingerprint(fp, models, j);
  return fp;
}

struct IdentifyResult {
  /// Index of the only reference agreeing with every executed sequence.
  std::optional<std::size_t> match;
  Language executed;
  /// Sequences in the order they were run.
  std::vector<Word> order;
};

namespace fp_detail {

inline void require_alphabets(const SulSession& s, std::span<const MealyMachine> models) {
  for (const auto& m : models)
    if (!(m.inputs() == s.inputs()))
      throw AlphabetMismatch("reference alphabet does not match the session alphabet");
}

/// Runs `w` on the session and drops survivors that predict other outputs.
inline void execute(SulSession& s, std::span<const MealyMachine> models, const Word& w,
                    std::vector<std::size_t>& survivors, IdentifyResult& r) {
  const auto observed = s.output_query(w);
  r.executed.insert(w);
  r.order.push_back(w);
  std::erase_if(survivors, [&](std::size_t i) { return run(models[i], w) != observed; });
}

inline std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace fp_detail

/// Static identification: runs the fingerprint in a seed-shuffled order,
/// stopping once at most one candidate remains.
inline IdentifyResult sepseq_identify(SulSession& s, std::span<const MealyMachine> models,
                                      const Fingerprint& fp, std::uint64_t order_seed) {
  fp_detail::require_alphabets(s, models);
  IdentifyResult r;
  auto survivors = fp_detail::all_indices(models.size());
  auto order = fp.sequences;
  Rng rng(order_seed);
  std::shuffle(order.begin(), order.end(), rng);
  for (const auto& w : order) {
    if (survivors.size() <= 1) break;
    fp_detail::execute(s, models, w, survivors, r);
  }
  if (survivors.size() == 1) r.match = survivors.front();
  return r;
}

/// Expected number of surviving candidates after running `w`, under a
/// uniform prior over `survivors`: sum of squared class sizes / |survivors|.
inline double expected_survivors(std::span<const MealyMachine> models,
                                 const std::vector<std::size_t>& survivors, const Word& w) {
  std::map<OutputWord, std::size_t> classes;
  for (auto i : survivors) ++classes[run(models[i], w)];
  double sum = 0;
  for (const auto& [_, c] : classes) sum += static_cast<double>(c * c);
  return sum / static_cast<double>(survivors.size());
}

/// Dynamic identification: repeatedly runs the unused fingerprint sequence
/// that minimises the expected number of surviving candidates (ties: shorter,
/// then lexicographically smaller), until at most one candidate remains or
/// no sequence splits the survivors.
inline IdentifyResult adg_identify(SulSession& s, std::span<const MealyMachine> models,
                                   const Fingerprint& fp) {
  fp_detail::require_alphabets(s, models);
  IdentifyResult r;
  auto survivors = fp_detail::all_indices(models.size());
  std::vector<Word> remaining = fp.sequences;
  while (survivors.size() > 1 && !remaining.empty()) {
    std::size_t best = 0;
    double best_score = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const double score = expected_survivors(models, survivors, remaining[i]);
      const auto& w = remaining[i];
      const auto& b = remaining[best];
      if (i == 0 || score < best_score ||
          (score == best_score && (w.size() < b.size() || (w.size() == b.size() && w < b)))) {
        best = i;
        best_score = score;
      }
    }
    if (best_score >= static_cast<double>(survivors.size())) break;
    const Word w = remaining[best];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    fp_detail::execute(s, models, w, survivors, r);
  }
  if (survivors.size() == 1) r.match = survivors.front();
  return r;
}

}  // namespace fsmprint
