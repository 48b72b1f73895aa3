#include <gtest/gtest.h>

#include "corpus.hpp"
#include "flowlog/error.hpp"
#include "flowlog/optimizer.hpp"
#include "flowlog/parser.hpp"

using namespace flowlog;

namespace {

struct Planned {
  Program program;
  RuleCatalog catalog;
  JoinGraph graph;
};

Planned plan_rule(const std::string& text, int rule_id) {
  Planned p{parse_program(text), {}, {}};
  p.catalog = build_rule_catalog(p.program, stratify(p.program), rule_id);
  p.graph = build_join_graph(p.catalog);
  return p;
}

const char* kTriangle = R"(
.decl c(y:number, w:number, z:number)
.decl p0(x:number, z:number)
.decl p(x:number, z:number)
p(x, z) :- p0(x, z).
p(x, z) :- c(y, w, z), p(x, w), p(x, y).
)";

// k atoms sharing one variable: a complete join graph on k nodes.
std::string clique(int k) {
  std::string body;
  for (int i = 0; i < k; ++i) body += std::string(i ? ", " : "") + "e(v, a" + std::to_string(i) + ")";
  return ".decl e(a:number, b:number)\n.decl h(a:number)\nh(v) :- " + body + ".\n";
}

}  // namespace

TEST(JoinGraph, ReachEvenPathWeights) {
  const Planned p = plan_rule(flowlog::testing::program_text("reach_even"), 2);
  ASSERT_EQ(p.graph.nodes.size(), 3u);
  EXPECT_EQ(p.graph.edges, (std::vector<JoinGraphEdge>{{0, 1, 1}, {1, 2, 1}}));
}

TEST(JoinGraph, ZeroWeightPairsHaveNoEdge) {
  const Planned p = plan_rule(".decl a(x:number)\n.decl b(y:number)\n.decl h(x:number, y:number)\n"
                              "h(x, y) :- a(x), b(y).\n",
                              1);
  EXPECT_TRUE(p.graph.edges.empty());
  const auto jsts = enumerate_rooted_jsts(p.graph);
  // Two single-node components, one root choice each.
  EXPECT_EQ(jsts.size(), 1u);
  EXPECT_EQ(jsts[0].roots.size(), 2u);
}

TEST(Enumerate, TriangleHasNineRootedTrees) {
  const Planned p = plan_rule(kTriangle, 2);
  const auto jsts = enumerate_rooted_jsts(p.graph);
  EXPECT_EQ(jsts.size(), 9u);
  for (const auto& t : jsts) EXPECT_EQ(plan_cost(t, p.graph, p.catalog).total, 4u);
}

TEST(Enumerate, OnlyMaximumWeightTrees) {
  // a-b share two variables, b-c and a-c share one: every JST keeps a-b.
  const Planned p = plan_rule(".decl a(x:number, y:number, z:number)\n.decl b(x:number, y:number, v:number)\n"
                              ".decl c(z:number, x:number, w:number)\n.decl h(w:number)\n"
                              "h(w) :- a(x, y, q), b(x, y, v), c(q, v, w).\n",
                              1);
  for (const auto& t : enumerate_rooted_jsts(p.graph)) {
    EXPECT_EQ(t.total_weight(p.graph), 3u) << t.describe(p.graph, p.catalog.rule);
  }
}

TEST(Enumerate, CapThrows) {
  const Planned small = plan_rule(clique(6), 1);
  EXPECT_EQ(enumerate_rooted_jsts(small.graph).size(), 7776u);  // 6^4 trees x 6 roots
  const Planned big = plan_rule(clique(7), 1);
  try {
    enumerate_rooted_jsts(big.graph);
    FAIL() << "expected SearchSpaceExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SearchSpaceExceeded);
  }
  const PlanChoice choice = select_plan(big.catalog, big.graph);
  EXPECT_TRUE(choice.search_exceeded);
  EXPECT_TRUE(choice.listing_order);
}

TEST(Cost, ReachEvenRoots) {
  const Planned p = plan_rule(flowlog::testing::program_text("reach_even"), 2);
  const std::vector<std::pair<std::size_t, std::size_t>> tree = {{0, 1}, {1, 2}};
  EXPECT_EQ(plan_cost(make_rooted(3, tree, {2}), p.graph, p.catalog).total, 3u);
  EXPECT_EQ(plan_cost(make_rooted(3, tree, {0}), p.graph, p.catalog).total, 2u);
  EXPECT_EQ(plan_cost(make_rooted(3, tree, {1}), p.graph, p.catalog).total, 2u);
}

TEST(Select, DeterministicTieBreak) {
  const Planned p = plan_rule(kTriangle, 2);
  const PlanChoice a = select_plan(p.catalog, p.graph);
  const PlanChoice b = select_plan(p.catalog, p.graph);
  EXPECT_EQ(a.jst.encoding(), b.jst.encoding());
  EXPECT_EQ(a.cost.total, 4u);
  // Listing order only wins when strictly cheaper.
  EXPECT_FALSE(a.listing_order);
}

TEST(Select, ListingOrderChain) {
  const Planned p = plan_rule(kTriangle, 2);
  const RootedJST t = listing_order_plan(p.graph);
  EXPECT_EQ(t.root(), 2u);
  EXPECT_EQ(t.parent[0], std::optional<std::size_t>(1));
  EXPECT_EQ(t.parent[1], std::optional<std::size_t>(2));
  EXPECT_TRUE(listing_order_choice(p.catalog, p.graph).listing_order);
}

TEST(Schedule, ProjectsAwayFinishedVariables) {
  const Planned p = plan_rule(flowlog::testing::program_text("reach_even"), 2);
  const JoinSchedule s = schedule_joins(make_rooted(3, {{0, 1}, {1, 2}}, {0}), p.graph, p.catalog);
  ASSERT_EQ(s.steps.size(), 2u);
  // reach(z) joins edge(y, z) on z, keeping only y.
  EXPECT_EQ(s.steps[0].keys, std::vector<std::string>{"z"});
  EXPECT_EQ(s.steps[0].retained, std::vector<std::string>{"y"});
  EXPECT_EQ(s.steps[1].retained, std::vector<std::string>{"x"});
}
