#include <gtest/gtest.h>

#include <functional>

#include "corpus.hpp"
#include "flowlog/ir.hpp"
#include "flowlog/parser.hpp"
#include "flowlog/pipeline.hpp"
#include "flowlog/plan_dag.hpp"

using namespace flowlog;

namespace {

std::size_t count_kind(const IRNode& n, IRKind kind) {
  std::size_t c = n.kind == kind ? 1 : 0;
  for (const auto& ch : n.children) c += count_kind(ch, kind);
  return c;
}

std::vector<const IRNode*> scans(const IRNode& n) {
  std::vector<const IRNode*> out;
  std::function<void(const IRNode&)> walk = [&](const IRNode& x) {
    if (x.kind == IRKind::Scan) out.push_back(&x);
    for (const auto& c : x.children) walk(c);
  };
  walk(n);
  return out;
}

TranslatedRule translate(const Program& p, int rule_id, const std::optional<RootedJST>& tree = std::nullopt) {
  const RuleCatalog cat = build_rule_catalog(p, stratify(p), rule_id);
  const JoinGraph g = build_join_graph(cat);
  return translate_jst_to_ir(tree ? *tree : select_plan(cat, g).jst, g, cat, p);
}

}  // namespace

TEST(Translate, NeighborFilterFusesIntoScanFlatMap) {
  const Program p = parse_program(".decl edge(x:number, y:number)\n.decl neighbor(y:number)\n"
                                  "neighbor(y) :- edge(x, y), x = 1.\n");
  const TranslatedRule tr = translate(p, 1);
  const IRNode fused = fuse(tr.root);
  EXPECT_EQ(fused.kind, IRKind::FlatMap);
  ASSERT_EQ(fused.children.size(), 1u);
  EXPECT_EQ(fused.children[0].kind, IRKind::Scan);
  EXPECT_EQ(fused.filters.size() + fused.children[0].filters.size(), 1u);
  EXPECT_LE(fused.node_count(), tr.root.node_count());
  EXPECT_EQ(fused.out.columns(), std::vector<std::string>{"y"});
}

TEST(Translate, RootReachShape) {
  const Program p = parse_program(flowlog::testing::program_text("reach_even"));
  const TranslatedRule tr = translate(p, 2, make_rooted(3, {{0, 1}, {1, 2}}, {2}));
  EXPECT_EQ(count_kind(tr.root, IRKind::Join), 2u);
  EXPECT_EQ(scans(tr.root).size(), 3u);
  const IRNode fused = fuse(tr.root);
  EXPECT_EQ(count_kind(fused, IRKind::Join), 0u);
  EXPECT_EQ(count_kind(fused, IRKind::JoinFlatMap), 2u);
  EXPECT_EQ(tr.head.relation, "reach");
}

TEST(Translate, NegationBecomesAntijoin) {
  const TranslatedRule tr = translate(parse_program(flowlog::testing::program_text("negation")), 1);
  EXPECT_EQ(count_kind(tr.root, IRKind::Antijoin), 1u);
}

TEST(Translate, ConstantsAndRepeatedVariables) {
  const Program p = parse_program(".decl e(x:number, y:number)\n.decl h(x:number)\nh(x) :- e(x, x), e(x, 3).\n");
  const TranslatedRule tr = translate(p, 1);
  std::size_t filters = 0;
  std::function<void(const IRNode&)> walk = [&](const IRNode& n) {
    filters += n.filters.size();
    for (const auto& c : n.children) walk(c);
  };
  walk(tr.root);
  EXPECT_GE(filters, 2u);
}

TEST(Canonical, PositionalAndInjective) {
  const Program a = parse_program(".decl e(x:number, y:number)\n.decl h(x:number)\nh(x) :- e(x, y).\n");
  const Program b = parse_program(".decl e(x:number, y:number)\n.decl h(x:number)\nh(u) :- e(u, v).\n");
  const Program c = parse_program(".decl e(x:number, y:number)\n.decl h(x:number)\nh(y) :- e(x, y).\n");
  EXPECT_EQ(canonicalize(translate(a, 1).root), canonicalize(translate(b, 1).root));
  EXPECT_NE(canonicalize(translate(a, 1).root), canonicalize(translate(c, 1).root));
}

TEST(Delta, FlipsOnlyTheChosenAtom) {
  const Program p = parse_program(flowlog::testing::program_text("reach_even"));
  const IRNode ir = translate(p, 2).root;
  const IRNode d = with_delta_scan(ir, 2);
  std::size_t deltas = 0;
  for (const IRNode* s : scans(d)) {
    if (s->role == ScanRole::IdbDelta) {
      ++deltas;
      EXPECT_EQ(s->relation, "reach");
    }
  }
  EXPECT_EQ(deltas, 1u);
  EXPECT_NE(canonicalize(ir), canonicalize(d));
}

TEST(PlanDag, SharesKeyedEdgeMap) {
  const CompiledProgram on = compile_source(flowlog::testing::program_text("reach_even"));
  Toggles t;
  t.sharing = false;
  const CompiledProgram off = compile_source(flowlog::testing::program_text("reach_even"), t);
  EXPECT_GE(on.dag.shared_count, 1u);
  EXPECT_EQ(off.dag.shared_count, 0u);
  EXPECT_LT(on.dag.nodes.size(), off.dag.nodes.size());
  EXPECT_EQ(on.dag.roots.size(), off.dag.roots.size());
}

TEST(PlanDag, InputsPrecedeConsumers) {
  const CompiledProgram c = compile_source(flowlog::testing::program_text("galen"));
  for (std::size_t i = 0; i < c.dag.nodes.size(); ++i) {
    for (auto in : c.dag.nodes[i].inputs) EXPECT_LT(in, i);
  }
}

TEST(PlanDag, DeduplicateMergesUnsharedCopies) {
  Toggles t;
  t.sharing = false;
  CompiledProgram c = compile_source(flowlog::testing::program_text("reach_even"), t);
  const std::size_t before = c.dag.nodes.size();
  const std::size_t merged = c.dag.deduplicate();
  EXPECT_GT(merged, 0u);
  EXPECT_EQ(c.dag.nodes.size(), before - merged);
  std::set<std::string> encodings;
  for (const auto& n : c.dag.nodes) EXPECT_TRUE(encodings.insert(n.encoding).second);
}
