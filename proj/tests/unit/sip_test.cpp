#include <gtest/gtest.h>

#include <random>

#include "flowlog/error.hpp"
#include "flowlog/oracle.hpp"
#include "flowlog/parser.hpp"
#include "flowlog/sip.hpp"

using namespace flowlog;

namespace {

const char* kTwo = R"(
.decl r(x:number, y:number)
.decl s(y:number, z:number)
.decl h(x:number, z:number)
h(x, z) :- r(x, y), s(y, z).
)";

std::vector<std::string> texts(const SipRewrite& rw) {
  std::vector<std::string> out;
  for (const auto& r : rw.aux_rules) out.push_back(to_string(r));
  out.push_back(to_string(rw.reduced_rule));
  return out;
}

}  // namespace

TEST(Sip, TwoAtomRewrite) {
  const Program p = parse_program(kTwo);
  const SipRewrite rw = sip_rewrite(p, build_rule_catalog(p.rules[0]), {0, 1}, 10);
  EXPECT_EQ(texts(rw), (std::vector<std::string>{
                           "__sip_1_1_1(y, z) :- r(_, y), s(y, z).",
                           "__sip_1_0_2(x, y) :- r(x, y), __sip_1_1_1(y, _).",
                           "h(x, z) :- __sip_1_0_2(x, y), __sip_1_1_1(y, z).",
                       }));
  EXPECT_EQ(rw.aux_rules[0].id, 10);
  EXPECT_EQ(rw.aux_relations.size(), 2u);
}

TEST(Sip, TwoAtomRewritePreservesHeads) {
  const Program p = parse_program(kTwo);
  std::vector<SipRewrite> rewrites;
  const Program rewritten = apply_sip(p, stratify(p), SipMode::Always, &rewrites);
  ASSERT_EQ(rewrites.size(), 1u);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    Relations in;
    for (int i = 0; i < 12; ++i) {
      in["r"].insert({static_cast<Value>(rng() % 5), static_cast<Value>(rng() % 5)});
      in["s"].insert({static_cast<Value>(rng() % 5), static_cast<Value>(rng() % 5)});
    }
    EXPECT_EQ(naive_evaluate(p, in).at("h"), naive_evaluate(rewritten, in).at("h"));
  }
}

TEST(Sip, SingleAtomNotApplicable) {
  const Program p = parse_program(".decl r(x:number)\n.decl h(x:number)\nh(x) :- r(x).\n");
  try {
    sip_rewrite(p, build_rule_catalog(p.rules[0]), {0}, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotApplicable);
  }
}

TEST(Sip, OrderMustCoverJoinNodes) {
  const Program p = parse_program(kTwo);
  try {
    sip_rewrite(p, build_rule_catalog(p.rules[0]), {0}, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(Sip, AutoTouchesOnlyCyclicRecursiveRules) {
  const Program p = parse_program(R"(
.decl e(x:number, y:number)
.decl c(y:number, w:number, z:number)
.decl reach(x:number)
.decl p(x:number, z:number)
reach(x) :- e(x, _).
reach(x) :- e(x, y), e(y, z), reach(z).
p(x, z) :- e(x, z).
p(x, z) :- c(y, w, z), p(x, w), p(x, y).
)");
  std::vector<SipRewrite> rewrites;
  apply_sip(p, stratify(p), SipMode::Auto, &rewrites);
  ASSERT_EQ(rewrites.size(), 1u);
  EXPECT_EQ(rewrites[0].rule_id, 4);
  rewrites.clear();
  EXPECT_EQ(apply_sip(p, stratify(p), SipMode::Never, &rewrites).rules.size(), 4u);
  EXPECT_TRUE(rewrites.empty());
}

TEST(Sip, DefaultOrderStartsAtWidestAtom) {
  const Program p = parse_program(R"(
.decl c(y:number, w:number, z:number)
.decl p(x:number, z:number)
.decl h(x:number, z:number)
h(x, z) :- p(x, w), c(y, w, z), p(x, y).
)");
  const RuleCatalog cat = build_rule_catalog(p.rules[0]);
  EXPECT_EQ(default_sip_order(cat, build_join_graph(cat)), (std::vector<std::size_t>{1, 0, 2}));
}
