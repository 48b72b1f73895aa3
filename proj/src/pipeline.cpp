#include "flowlog/pipeline.hpp"

#include <sstream>

#include "flowlog/error.hpp"
#include "flowlog/parser.hpp"

namespace flowlog {

const RulePlan& CompiledProgram::plan(int rule_id) const {
  for (const auto& p : rules) {
    if (p.rule_id == rule_id) return p;
  }
  throw Error(ErrorKind::InvalidArgument, "no rule with id " + std::to_string(rule_id));
}

CompiledProgram compile(const Program& parsed, const Toggles& toggles) {
  CompiledProgram out;
  out.toggles = toggles;
  const Stratification initial = stratify(parsed);
  out.program = apply_sip(parsed, initial, toggles.sip, &out.sip);
  out.strata = stratify(out.program);

  std::vector<RootSpec> specs;
  for (const auto& stratum : out.strata.strata) {
    for (int id : stratum.rules) {
      RulePlan plan;
      plan.rule_id = id;
      plan.catalog = build_rule_catalog(out.program, out.strata, id);
      plan.graph = build_join_graph(plan.catalog);
      plan.choice = toggles.plan_opt ? select_plan(plan.catalog, plan.graph, toggles.jst_cap)
                                     : listing_order_choice(plan.catalog, plan.graph);
      TranslatedRule tr = translate_jst_to_ir(plan.choice.jst, plan.graph, plan.catalog, out.program);
      plan.unfused = tr.root;
      plan.ir = toggles.fusion ? fuse(tr.root) : tr.root;
      plan.head = tr.head;

      specs.push_back({id, "base", plan.ir, plan.head});
      if (stratum.recursive) {
        const Rule& rule = plan.catalog.rule;
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
          const Atom& a = rule.body[i];
          if (a.negated || !stratum.relations.count(a.relation)) continue;
          specs.push_back({id, "delta@" + std::to_string(i), with_delta_scan(plan.ir, i), plan.head});
        }
      }
      out.rules.push_back(std::move(plan));
    }
  }
  out.dag = share_subplans(specs, toggles.sharing);
  return out;
}

CompiledProgram compile_source(const std::string& text, const Toggles& toggles) {
  return compile(parse_program(text), toggles);
}

std::string explain(const CompiledProgram& compiled) {
  std::ostringstream os;
  const Program& p = compiled.program;
  for (std::size_t s = 0; s < compiled.strata.strata.size(); ++s) {
    const Stratum& st = compiled.strata.strata[s];
    os << "stratum " << s << (st.recursive ? " (recursive)" : "") << ":";
    for (const auto& r : st.relations) os << ' ' << r;
    os << '\n';
  }
  for (const auto& rw : compiled.sip) {
    os << "sip rule " << rw.rule_id << ", visit order";
    for (auto i : rw.visit_order) os << ' ' << i;
    os << '\n';
    for (const auto& r : rw.aux_rules) os << "  " << to_string(r, &p.symbols) << '\n';
  }
  for (const auto& plan : compiled.rules) {
    os << "\nrule " << plan.rule_id << ": " << to_string(plan.catalog.rule, &p.symbols) << '\n';
    if (plan.graph.nodes.empty()) {
      os << "  no join atoms\n";
    } else {
      os << "  tree: " << plan.choice.jst.describe(plan.graph, plan.catalog.rule) << '\n';
      os << "  cost " << plan.choice.cost.total;
      if (plan.choice.listing_order) os << " (listing order)";
      if (plan.choice.search_exceeded) os << " (search space exceeded)";
      os << ", " << plan.choice.candidates.size() << " candidates\n";
      for (const auto& step : plan.choice.cost.per_step) {
        os << "    " << step.label << ": " << step.variables << '\n';
      }
    }
    os << describe_ir(plan.ir, 1);
  }
  os << '\n' << compiled.dag.describe();
  return os.str();
}

EvaluationResult evaluate(const CompiledProgram& compiled, const Facts& inputs, EngineOptions options) {
  options.count_diffs = options.count_diffs || !compiled.toggles.boolean_spec;
  Engine engine(compiled.program, compiled.strata, compiled.dag, options);
  for (const auto& [name, rows] : inputs) {
    if (!compiled.program.relations.count(name)) {
      throw Error(ErrorKind::UndeclaredRelation, "input for undeclared relation '" + name + "'");
    }
    Collection c(compiled.program.relation(name).arity(), Monoid::presence());
    c.reserve(rows.size());
    for (const auto& t : rows) c.push(std::span<const Value>(t), 1);
    c.consolidate();
    engine.load(name, c);
  }
  engine.run();
  EvaluationResult result;
  std::vector<std::string> idb;
  for (const auto& [name, decl] : compiled.program.relations) {
    if (compiled.program.is_idb(name)) idb.push_back(name);
  }
  result.outputs = engine.facts(idb);
  result.stats = engine.stats();
  return result;
}

}  // namespace flowlog
