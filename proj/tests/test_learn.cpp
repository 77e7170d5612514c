#include <gtest/gtest.h>

#include "fsmprint/learner.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace fsmprint;
using fixtures::o;
using fixtures::w;

namespace {

using NodeId = ObservationTree::NodeId;

std::vector<MealyMachine> random_batch(std::uint64_t seed, int count, std::size_t max_states) {
  Rng rng(seed);
  std::vector<MealyMachine> out;
  for (int i = 0; i < count; ++i)
    out.push_back(fixtures::random_minimal(rng, 1, max_states, 2 + index_below(rng, 4), 2 + index_below(rng, 3)));
  return out;
}

}  // namespace

TEST(ObservationTree, InsertFindAndAccess) {
  ObservationTree t(3);
  const NodeId n = t.insert(w({"hello", "kex"}), o({"hello", "kex"}));
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.find(w({"hello", "kex"})), n);
  EXPECT_EQ(t.find(w({"kex"})), ObservationTree::kNone);
  EXPECT_EQ(t.access(n), w({"hello", "kex"}));
  EXPECT_EQ(t.outputs_to(n), o({"hello", "kex"}));
  EXPECT_EQ(t.depth(n), 2u);
  EXPECT_EQ(t.subtree_size(ObservationTree::kRoot), 2u);
  EXPECT_EQ(t.output_name(*t.output(ObservationTree::kRoot, 0)), "hello");
  EXPECT_FALSE(t.output(ObservationTree::kRoot, 2).has_value());
  // re-inserting a prefix adds nothing
  t.insert(w({"hello"}), o({"hello"}));
  EXPECT_EQ(t.size(), 3u);
  EXPECT_THROW(t.insert(w({"hello"}), o({"error"})), NonDeterministicResponse);
}

TEST(ObservationTree, ApartnessWitnessIsShortest) {
  ObservationTree t(3);
  t.insert(w({"hello", "hello"}), o({"hello", "hello"}));
  t.insert(w({"hello", "kex", "hello"}), o({"hello", "kex", "error"}));
  t.insert(w({"hello", "kex", "kex", "hello"}), o({"hello", "kex", "error", "error"}));
  t.insert(w({"kex", "hello"}), o({"error", "hello"}));
  const NodeId h = t.find(w({"hello"}));
  const NodeId hk = t.find(w({"hello", "kex"}));
  const NodeId k = t.find(w({"kex"}));
  EXPECT_EQ(t.apartness_witness(h, hk), w({"hello"}));
  EXPECT_EQ(t.apartness_witness(ObservationTree::kRoot, h), w({"kex"}));
  EXPECT_TRUE(t.apart(ObservationTree::kRoot, hk));
  EXPECT_FALSE(t.apart(k, ObservationTree::kRoot));
  EXPECT_TRUE(t.apart(hk, h));
}

TEST(Learner, ToyModelsWithPerfectEq) {
  for (const auto& m : fixtures::trio()) {
    auto s = make_simulated_sul(m);
    const auto r = lsharp_learn(s, CqConfig::perfect());
    EXPECT_TRUE(oracle::bisimilar(r.model, m));
    EXPECT_EQ(r.model.num_states(), 3u);
    EXPECT_LE(r.eq_queries, 3u);
    EXPECT_FALSE(r.budget_exhausted);
    ASSERT_FALSE(r.hypotheses.empty());
    for (std::size_t i = 1; i < r.hypotheses.size(); ++i)
      EXPECT_GT(r.hypotheses[i].num_states(), r.hypotheses[i - 1].num_states());
    EXPECT_EQ(r.oq_symbols, s.counters(Phase::Learn).symbols);
  }
}

TEST(Learner, LearnsRandomMachinesExactly) {
  for (const auto& m : random_batch(31, 150, 12)) {
    auto s = make_simulated_sul(m);
    const auto r = lsharp_learn(s, CqConfig::perfect());
    ASSERT_TRUE(oracle::bisimilar(r.model, m));
    EXPECT_LE(r.eq_queries, m.num_states());
    for (const auto& h : r.hypotheses) EXPECT_LE(h.num_states(), m.num_states());
  }
}

TEST(Learner, WpEquivalenceOracleWorksToo) {
  for (const auto& m : random_batch(32, 40, 6)) {
    auto s = make_simulated_sul(m);
    const auto r = lsharp_learn(s, CqConfig::wp(2));
    EXPECT_TRUE(oracle::bisimilar(r.model, m));
  }
}

TEST(Learner, AdaptiveWithTrueReferenceNeedsOneEq) {
  for (const auto& m : random_batch(33, 150, 12)) {
    auto s = make_simulated_sul(m);
    const std::vector<MealyMachine> refs{m};
    const auto r = alsharp_learn(s, refs, CqConfig::perfect());
    ASSERT_TRUE(oracle::bisimilar(r.model, m));
    EXPECT_EQ(r.eq_queries, 1u);
  }
}

TEST(Learner, AdaptiveWithUnrelatedReferencesStillLearns) {
  const auto refs = random_batch(34, 3, 8);
  for (const auto& m : random_batch(35, 80, 10)) {
    // same input count means the same numbered alphabet
    std::vector<MealyMachine> aligned;
    for (const auto& r : refs)
      if (r.num_inputs() == m.num_inputs()) aligned.push_back(r);
    auto s = make_simulated_sul(m);
    const auto r = alsharp_learn(s, aligned, CqConfig::perfect());
    ASSERT_TRUE(oracle::bisimilar(r.model, m));
    EXPECT_LE(r.eq_queries, m.num_states());
  }
}

TEST(Learner, AdaptiveReusesMutatedReference) {
  const auto base = fixtures::m1();
  auto s = make_simulated_sul(fixtures::m2());
  const std::vector<MealyMachine> refs{base};
  const auto r = alsharp_learn(s, refs, CqConfig::perfect());
  EXPECT_TRUE(oracle::bisimilar(r.model, fixtures::m2()));
}

TEST(Learner, InitialLanguageSeedsTheTree) {
  auto s = make_simulated_sul(fixtures::m2());
  const Language init{w({"hello", "kex", "hello", "hello"})};
  s.output_query(*init.begin());
  const auto before = s.symbols_sent();
  Learner l(s);
  l.initialize(init);
  EXPECT_EQ(s.symbols_sent(), before);
  EXPECT_EQ(l.tree().size(), 5u);
  const auto r = lsharp_learn(s, CqConfig::perfect(), init);
  EXPECT_TRUE(oracle::bisimilar(r.model, fixtures::m2()));
}

TEST(Learner, CounterexampleMustDisagree) {
  auto s = make_simulated_sul(fixtures::m0());
  Learner l(s);
  l.stabilize();
  const auto h = l.hypothesis();
  EXPECT_EQ(h.num_states(), 1u);
  EXPECT_THROW(l.process_counterexample(w({"hello"})), NotACounterexample);
  l.process_counterexample(w({"hello", "kex", "data"}));
  l.stabilize();
  EXPECT_GT(l.hypothesis().num_states(), 1u);
}

TEST(Learner, HypothesisIsConsistentWithTree) {
  for (const auto& m : random_batch(36, 30, 8)) {
    auto s = make_simulated_sul(m);
    Learner l(s);
    l.stabilize();
    const auto h = l.hypothesis();
    EXPECT_EQ(h.num_states(), l.basis().size());
    // consistency problems are reported as words the tree disagrees on
    if (auto x = l.inconsistency(h)) {
      EXPECT_NE(run(h, *x), oracle::outputs(m, *x));
    }
  }
}

TEST(Learner, BudgetExhaustionReturnsAModel) {
  Rng rng(3);
  const auto m = random_minimal_machine(rng, 15, 4, 3);
  auto s = make_simulated_sul(m);
  s.set_budget(200);
  const auto r = lsharp_learn(s, CqConfig::perfect());
  EXPECT_TRUE(r.budget_exhausted);
  EXPECT_GE(r.model.num_states(), 1u);
  EXPECT_LE(s.symbols_sent(), 200u);
}

TEST(Learner, PerfectEqNeedsSimulation) {
  class Opaque final : public Endpoint {
  public:
    void reset() override {}
    std::string step(const std::string&) override { return "x"; }
  };
  SulSession s(Alphabet{"a"}, std::make_unique<Opaque>());
  EXPECT_THROW(lsharp_learn(s, CqConfig::perfect()), NotSimulated);
  const auto r = lsharp_learn(s, CqConfig::wp(1));
  EXPECT_EQ(r.model.num_states(), 1u);
}
