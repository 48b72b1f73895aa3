#include <gtest/gtest.h>

#include "corpus.hpp"
#include "flowlog/error.hpp"
#include "flowlog/oracle.hpp"
#include "flowlog/parser.hpp"

using namespace flowlog;
using flowlog::testing::program_text;

TEST(Naive, ReachEvenOnCycle) {
  const Program p = parse_program(program_text("reach_even"));
  const auto out = naive_evaluate(p, {{"edge", {{1, 2}, {2, 3}, {3, 1}}}, {"target", {{3}}}});
  EXPECT_EQ(out.at("reach"), (std::set<Tuple>{{1}, {2}, {3}}));
}

TEST(Naive, PathClosure) {
  const Program p = parse_program(program_text("tc"));
  EXPECT_EQ(naive_evaluate(p, {{"edge", {{1, 2}, {2, 3}, {3, 4}}}}).at("tc").size(), 6u);
  EXPECT_TRUE(naive_evaluate(p, {}).at("tc").empty());
}

TEST(Naive, InsensitiveToRuleAndAtomOrder) {
  const std::string decls = ".decl edge(x:number, y:number)\n.decl tc(x:number, y:number)\n";
  const Program a = parse_program(decls + "tc(x, y) :- edge(x, y).\ntc(x, z) :- tc(x, y), edge(y, z).\n");
  const Program b = parse_program(decls + "tc(x, z) :- edge(y, z), tc(x, y).\ntc(x, y) :- edge(x, y).\n");
  const auto inst = flowlog::testing::make_instance("tc", 12);
  EXPECT_EQ(naive_evaluate(a, inst.inputs).at("tc"), naive_evaluate(b, inst.inputs).at("tc"));
}

TEST(Reference, Examples) {
  GraphInstance cc;
  cc.edges = {{1, 2}, {2, 1}, {2, 3}, {3, 2}, {7, 9}, {9, 7}};
  EXPECT_EQ(reference_algorithm(ReferenceKind::CcMin, cc),
            (std::set<Tuple>{{1, 1}, {2, 1}, {3, 1}, {7, 7}, {9, 7}}));

  GraphInstance one;
  one.edges = {{0, 1}};
  one.weights = {5};
  one.sources = {0};
  EXPECT_EQ(reference_algorithm(ReferenceKind::Sssp, one), (std::set<Tuple>{{0, 0}, {1, 5}}));

  GraphInstance triangle;
  triangle.edges = {{0, 1}, {1, 2}, {2, 0}};
  triangle.sources = {0};
  EXPECT_EQ(reference_algorithm(ReferenceKind::Bipartite, triangle), (std::set<Tuple>{{}}));
  GraphInstance square;
  square.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  square.sources = {0};
  EXPECT_TRUE(reference_algorithm(ReferenceKind::Bipartite, square).empty());

  GraphInstance path;
  path.edges = {{1, 2}, {2, 3}, {3, 4}};
  EXPECT_EQ(reference_algorithm(ReferenceKind::TC, path).size(), 6u);
  path.sources = {4};
  EXPECT_EQ(reference_algorithm(ReferenceKind::ReachEven, path), (std::set<Tuple>{{2}, {4}}));
}

TEST(Reference, NegativeWeight) {
  GraphInstance g;
  g.edges = {{0, 1}};
  g.weights = {-1};
  g.sources = {0};
  try {
    reference_algorithm(ReferenceKind::Sssp, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NegativeWeight);
  }
}

TEST(Generate, Examples) {
  RandomGraphSpec empty;
  EXPECT_TRUE(generate_graph(empty).edges.empty());
  RandomGraphSpec full;
  full.nodes = 5;
  full.probability = 1.0;
  EXPECT_EQ(generate_graph(full).edges.size(), 20u);
  RandomGraphSpec s;
  s.nodes = 100;
  s.probability = 0.05;
  s.seed = 7;
  EXPECT_EQ(generate_graph(s).edges, generate_graph(s).edges);
  for (const auto& [a, b] : generate_graph(s).edges) EXPECT_NE(a, b);
  s.edge_count = 40;
  EXPECT_EQ(generate_graph(s).edges.size(), 40u);
}
