#include <gtest/gtest.h>

#include "corpus.hpp"
#include "flowlog/analysis.hpp"
#include "flowlog/error.hpp"
#include "flowlog/parser.hpp"

using namespace flowlog;

namespace {

const char* kReach = R"(
.decl edge(x:number, y:number)
.decl target(x:number)
.decl reach(x:number)
.input edge
.input target
.output reach
reach(x) :- target(x).
reach(x) :- edge(x, y), edge(y, z), reach(z).
)";

ErrorKind kind_of(const std::string& text) {
  try {
    const Program p = parse_program(text);
    stratify(p);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Parser, ClassifiesRelations) {
  const Program p = parse_program(kReach);
  EXPECT_EQ(p.rules.size(), 2u);
  EXPECT_FALSE(p.is_idb("edge"));
  EXPECT_FALSE(p.is_idb("target"));
  EXPECT_TRUE(p.is_idb("reach"));
  EXPECT_EQ(p.output_relations(), std::vector<std::string>{"reach"});
}

TEST(Parser, Errors) {
  EXPECT_EQ(kind_of(".decl q(x:number)\n.decl p(x:number)\np(x) :- q(y).\n"), ErrorKind::UnsafeRule);
  EXPECT_EQ(kind_of(".decl q(x:number)\n.decl p(x:number)\np(x) :- q(x, x).\n"), ErrorKind::ArityMismatch);
  EXPECT_EQ(kind_of(".decl p(x:number)\np(x) :- nope(x).\n"), ErrorKind::UndeclaredRelation);
  EXPECT_EQ(kind_of(".decl p(x:number)\np(x) :- \n"), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of(".decl p(x:number)\n.decl e(x:number)\n.decl q(x:number)\n"
                    "p(x) :- q(x).\nq(x) :- !p(x), e(x).\n"),
            ErrorKind::UnstratifiableProgram);
}

TEST(Parser, NegatedVariablesMustBeBound) {
  EXPECT_EQ(kind_of(".decl e(x:number)\n.decl p(x:number)\np(x) :- e(x), !e(y).\n"), ErrorKind::UnsafeRule);
}

TEST(Parser, RoundTrip) {
  for (const auto& prog : flowlog::testing::corpus()) {
    const Program p = parse_program(flowlog::testing::program_text(prog.name));
    const std::string once = unparse(p);
    EXPECT_EQ(unparse(parse_program(once)), once) << prog.name;
  }
}

TEST(Stratify, CountInRecursionRejected) {
  EXPECT_EQ(kind_of(".decl e(x:number, y:number)\n.decl c(x:number, n:number)\n"
                    "c(x, COUNT(y)) :- e(x, y), c(y, _).\n"),
            ErrorKind::UnstratifiableProgram);
}

TEST(Stratify, MinInRecursionAllowed) {
  const Program p = parse_program(flowlog::testing::program_text("cc"));
  const Stratification s = stratify(p);
  bool recursive = false;
  for (const auto& st : s.strata) recursive = recursive || st.recursive;
  EXPECT_TRUE(recursive);
}

TEST(Stratify, PartitionAndOrder) {
  for (const auto& prog : flowlog::testing::corpus()) {
    const Program p = parse_program(flowlog::testing::program_text(prog.name));
    const Stratification s = stratify(p);
    std::multiset<int> ids;
    for (const auto& st : s.strata) ids.insert(st.rules.begin(), st.rules.end());
    std::multiset<int> want;
    for (const auto& r : p.rules) want.insert(r.id);
    EXPECT_EQ(ids, want) << prog.name;
    // No stratum reads a relation defined only in a later one.
    for (std::size_t i = 0; i < s.strata.size(); ++i) {
      for (int id : s.strata[i].rules) {
        for (const auto& a : p.rule(id).body) {
          if (!p.is_idb(a.relation)) continue;
          for (std::size_t j = i + 1; j < s.strata.size(); ++j) {
            bool defined_earlier = false;
            for (std::size_t k = 0; k <= i; ++k) defined_earlier |= s.strata[k].relations.count(a.relation) > 0;
            EXPECT_TRUE(defined_earlier || !s.strata[j].relations.count(a.relation)) << prog.name;
          }
        }
      }
    }
  }
}

TEST(Stratify, NegationSplitsStrata) {
  const Program p = parse_program(R"(
.decl e(x:number, y:number)
.decl tc(x:number, y:number)
.decl far(x:number, y:number)
tc(x, y) :- e(x, y).
tc(x, z) :- tc(x, y), e(y, z).
far(x, y) :- tc(x, y), !e(x, y).
)");
  const Stratification s = stratify(p);
  EXPECT_LT(s.stratum_of.at("tc"), s.stratum_of.at("far"));
  const DependencyGraph g = build_dependency_graph(p);
  bool flagged = false;
  for (const auto& e : g.edges) flagged = flagged || e.negated_or_aggregated;
  EXPECT_FALSE(flagged);  // e is an EDB; negating it adds no rule edge
}

TEST(Catalog, SemijoinAtoms) {
  const Program p = parse_program(R"(
.decl r(x:number, y:number)
.decl s(x:number)
.decl t(y:number, z:number)
.decl h(x:number, z:number)
h(x, z) :- r(x, y), s(x), t(y, z), x < z.
)");
  const RuleCatalog cat = build_rule_catalog(p.rules[0]);
  EXPECT_EQ(cat.join_nodes, (std::vector<std::size_t>{0, 2}));
  ASSERT_EQ(cat.semijoins.size(), 1u);
  EXPECT_EQ(cat.semijoins[0].body_index, 1u);
  EXPECT_EQ(cat.semijoins[0].subsumer, 0u);
  ASSERT_EQ(cat.filters.size(), 1u);
  EXPECT_EQ(cat.filters[0].owner, -1);  // x and z only meet at the join
}

TEST(Catalog, ClassificationIgnoresBodyOrder) {
  const std::string decls = ".decl r(x:number, y:number)\n.decl s(x:number)\n.decl h(x:number)\n";
  const Program a = parse_program(decls + "h(x) :- r(x, y), s(x).\n");
  const Program b = parse_program(decls + "h(x) :- s(x), r(x, y).\n");
  auto semijoin_relations = [](const Program& p) {
    const RuleCatalog cat = build_rule_catalog(p.rules[0]);
    std::set<std::string> out;
    for (const auto& s : cat.semijoins) out.insert(p.rules[0].body[s.body_index].relation);
    return out;
  };
  EXPECT_EQ(semijoin_relations(a), semijoin_relations(b));
  EXPECT_EQ(semijoin_relations(a), std::set<std::string>{"s"});
}

TEST(Catalog, RecursiveAtomsStayJoinNodes) {
  const Program p = parse_program(kReach);
  EXPECT_EQ(build_rule_catalog(p.rule(2)).join_nodes.size(), 2u);
  EXPECT_EQ(build_rule_catalog(p, stratify(p), 2).join_nodes.size(), 3u);
}

TEST(Catalog, FilterOwnedByBindingAtom) {
  const Program p = parse_program(".decl edge(x:number, y:number)\n.decl neighbor(y:number)\n"
                                  "neighbor(y) :- edge(x, y), x = 1.\n");
  const RuleCatalog cat = build_rule_catalog(p.rules[0]);
  ASSERT_EQ(cat.filters.size(), 1u);
  EXPECT_EQ(cat.filters[0].owner, 0);
}
