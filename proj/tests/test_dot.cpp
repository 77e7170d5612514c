#include <gtest/gtest.h>

#include <filesystem>

#include "fsmprint/dot.hpp"
#include "fsmprint/separation.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace fsmprint;
using fixtures::w;

namespace {

const char* kM0 = R"(digraph g {
  __start0 [label="" shape="none"];
  q0 [shape="circle" label="q0"];
  q1 [shape="circle" label="q1"];
  q2 [shape="circle" label="q2"];
  q0 -> q1 [label="hello/hello"];
  q0 -> q0 [label="kex/error"];
  q0 -> q0 [label="data/error"];
  q1 -> q1 [label="hello/hello"];
  q1 -> q2 [label="kex/kex"];
  q1 -> q1 [label="data/error"];
  q2 -> q1 [label="hello/hello"];
  q2 -> q2 [label="kex/kex"];
  q2 -> q2 [label="data/data"];
  __start0 -> q0;
}
)";

std::size_t error_line(const std::string& text) {
  try {
    parse_dot(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Dot, ParsesToyModel) {
  const auto m = parse_dot(kM0);
  EXPECT_EQ(m.num_states(), 3u);
  EXPECT_EQ(m.state_name(m.initial()), "q0");
  const auto r = step_sequence(m, m.initial(), m.inputs().encode({"hello", "kex"}));
  EXPECT_EQ(r.outputs, fixtures::o({"hello", "kex"}));
  EXPECT_EQ(m.state_name(r.state), "q2");
  EXPECT_TRUE(oracle::bisimilar(reorder_inputs(m, fixtures::tls_inputs()), fixtures::m0()));
}

TEST(Dot, AcceptsCommentsAndAttributes) {
  const char* text = R"(// leading comment
strict digraph "name" {
  graph [rankdir=LR];
  node [shape=circle];
  # hash comment
  /* block
     comment */
  a [label="A"];
  b;
  a -> b [label="x/y", color=red];
  b -> a [label="x/z"];
  __start0 -> a
}
)";
  const auto m = parse_dot(text);
  EXPECT_EQ(m.num_states(), 2u);
  EXPECT_EQ(m.state_name(0), "A");
  EXPECT_EQ(m.output(0, 0), "y");
  EXPECT_EQ(m.output(1, 0), "z");
}

TEST(Dot, SerializeParseRoundTripOnToyModels) {
  for (const auto& m : fixtures::trio()) {
    const auto text = serialize_dot(m);
    const auto back = parse_dot(text);
    EXPECT_TRUE(oracle::isomorphic(m, back));
    EXPECT_EQ(serialize_dot(back), text);
    for (StateId q = 0; q < m.num_states(); ++q) EXPECT_EQ(back.state_name(q), m.state_name(q));
  }
}

TEST(Dot, SerializeParseRoundTripOnRandomMachines) {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    const auto m = random_machine(rng, 1 + index_below(rng, 12), 1 + index_below(rng, 4),
                                  1 + index_below(rng, 4));
    const auto back = parse_dot(serialize_dot(m));
    ASSERT_TRUE(oracle::isomorphic(m, back));
  }
}

TEST(Dot, LabelWithoutSlashReportsPosition) {
  const std::string text = "digraph g {\n  a -> a [label=\"x/y\"];\n  a -> a [label=\"zz\"];\n  __start0 -> a;\n}\n";
  try {
    parse_dot(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 1u);
    EXPECT_NE(std::string(e.what()).find("3:"), std::string::npos);
  }
}

TEST(Dot, LabelWithTwoSlashesIsRejected) {
  EXPECT_EQ(error_line("digraph g {\n a -> a [label=\"x/y/z\"];\n __start0 -> a;\n}"), 2u);
}

TEST(Dot, MissingLabelIsRejected) {
  EXPECT_EQ(error_line("digraph g {\n a -> a;\n __start0 -> a;\n}"), 2u);
}

TEST(Dot, DuplicateTransitionIsNonDeterministic) {
  const char* text = "digraph g {\n a -> a [label=\"x/y\"];\n a -> b [label=\"x/z\"];\n b -> a [label=\"x/y\"];\n __start0 -> a;\n}";
  EXPECT_THROW(parse_dot(text), NonDeterministicEdge);
  try {
    parse_dot(text);
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Dot, MissingInitialStateIsReported) {
  EXPECT_THROW(parse_dot("digraph g {\n a -> a [label=\"x/y\"];\n}"), MissingInitial);
}

TEST(Dot, DuplicateStartEdgeIsRejected) {
  EXPECT_EQ(error_line("digraph g {\n a -> a [label=\"x/y\"];\n __start0 -> a;\n __start0 -> a;\n}"), 4u);
}

TEST(Dot, IncompleteMachineNamesTheState) {
  const char* text = "digraph g {\n a -> b [label=\"x/y\"];\n b -> a [label=\"x/y\"];\n a -> a [label=\"z/y\"];\n __start0 -> a;\n}";
  try {
    parse_dot(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
    EXPECT_EQ(e.line(), 2u);
  }
  const auto pm = parse_dot_partial(text);
  EXPECT_FALSE(pm.complete());
}

TEST(Dot, SyntaxErrorsCarryPositions) {
  try {
    parse_dot("digraph g {\n  a -> [label=\"x/y\"];\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 8u);
  }
  EXPECT_THROW(parse_dot("graph"), ParseError);
  EXPECT_THROW(parse_dot("digraph g { a -> a [label=\"x/y\"]; __start0 -> a; } extra"), ParseError);
  EXPECT_THROW(parse_dot("digraph g { a [label=\"unterminated]; }"), ParseError);
}

TEST(Dot, SerializerRejectsSlashInSymbols) {
  const auto m = make_machine(Alphabet{"a/b"}, {{"p", "a/b", "p", "x"}});
  EXPECT_THROW(serialize_dot(m), InvalidMachine);
}

TEST(Dot, BundledDataDirectoryLoads) {
  const auto models = load_dot_directory(std::filesystem::path(FSMPRINT_DATA_DIR) / "tls_toy");
  ASSERT_EQ(models.size(), 3u);
  const auto trio = fixtures::trio();
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(models[i].first, "M" + std::to_string(i));
    EXPECT_TRUE(oracle::bisimilar(reorder_inputs(models[i].second, fixtures::tls_inputs()), trio[i]));
  }
  EXPECT_THROW(load_dot_directory("/nonexistent/dir"), IoError);
}
