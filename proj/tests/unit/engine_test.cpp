#include <gtest/gtest.h>

#include "corpus.hpp"
#include "flowlog/error.hpp"
#include "flowlog/parser.hpp"
#include "flowlog/pipeline.hpp"

using namespace flowlog;
using flowlog::testing::program_text;

namespace {

Facts cycle_inputs() {
  return {{"edge", {{1, 2}, {2, 3}, {3, 1}}}, {"target", {{3}}}};
}

}  // namespace

TEST(Engine, ReachEvenOnCycle) {
  const auto r = evaluate(compile_source(program_text("reach_even")), cycle_inputs());
  EXPECT_EQ(r.outputs.at("reach"), (std::set<Tuple>{{1}, {2}, {3}}));
}

TEST(Engine, EmptyInputs) {
  const auto r = evaluate(compile_source(program_text("tc")), {});
  EXPECT_TRUE(r.outputs.at("tc").empty());
}

TEST(Engine, IterationCap) {
  Facts in;
  for (Value i = 0; i < 20; ++i) in["edge"].insert({i, i + 1});
  EngineOptions opts;
  opts.max_iterations = 3;
  try {
    evaluate(compile_source(program_text("tc")), in, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonTermination);
  }
}

TEST(Engine, ChainNeedsOneIterationPerHop) {
  Facts in;
  for (Value i = 0; i < 6; ++i) in["edge"].insert({i, i + 1});
  const auto r = evaluate(compile_source(program_text("tc")), in);
  EXPECT_EQ(r.outputs.at("tc").size(), 21u);
  ASSERT_FALSE(r.stats.stratum_iterations.empty());
  EXPECT_GE(r.stats.stratum_iterations.back(), 5u);
}

TEST(Engine, CountAggregate) {
  const auto r = evaluate(compile_source(program_text("two_hops")), {{"edge", {{1, 2}, {1, 3}, {2, 4}, {3, 4}, {2, 5}}}});
  // 1 reaches 4 twice and 5 once: distinct z values count once each.
  EXPECT_EQ(r.outputs.at("hops"), (std::set<Tuple>{{1, 2}}));
}

TEST(Engine, SsspLattice) {
  const auto r = evaluate(compile_source(program_text("sssp")),
                          {{"edge", {{0, 1, 5}, {0, 2, 1}, {2, 1, 1}}}, {"source", {{0}}}});
  EXPECT_EQ(r.outputs.at("dist"), (std::set<Tuple>{{0, 0}, {1, 2}, {2, 1}}));
}

TEST(Engine, NegationExample) {
  const auto r = evaluate(compile_source(program_text("negation")), {{"edge", {{1, 2}, {2, 3}, {1, 3}, {3, 4}}}});
  EXPECT_EQ(r.outputs.at("tw"), (std::set<Tuple>{{2, 4}, {1, 4}}));
}

TEST(Engine, CountDiffsMatchPresence) {
  Toggles counting;
  counting.boolean_spec = false;
  for (const auto& prog : flowlog::testing::corpus()) {
    const auto inst = flowlog::testing::make_instance(prog.name, 4);
    EXPECT_EQ(evaluate(compile_source(program_text(prog.name)), inst.inputs).outputs,
              evaluate(compile_source(program_text(prog.name), counting), inst.inputs).outputs)
        << prog.name;
  }
}

TEST(Engine, RejectsUndeclaredInput) {
  try {
    evaluate(compile_source(program_text("tc")), {{"nope", {{1}}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UndeclaredRelation);
  }
}

TEST(Engine, SharedArrangementBuiltOnce) {
  const CompiledProgram c = compile_source(program_text("reach_even"));
  const auto r = evaluate(c, cycle_inputs());
  std::size_t edge_builds = 0;
  for (std::size_t i = 0; i < c.dag.nodes.size(); ++i) {
    const auto& n = c.dag.nodes[i];
    if (n.op.kind == IRKind::FlatMap && !n.inputs.empty() &&
        c.dag.nodes[n.inputs[0]].op.relation == "edge") {
      edge_builds += r.stats.nodes[i].arrangement_builds;
    }
  }
  EXPECT_EQ(edge_builds, 1u);
}
