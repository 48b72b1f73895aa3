#pragma once

#include <string>
#include <vector>

#include "flowlog/analysis.hpp"
#include "flowlog/engine.hpp"
#include "flowlog/ir.hpp"
#include "flowlog/optimizer.hpp"
#include "flowlog/plan_dag.hpp"
#include "flowlog/sip.hpp"

namespace flowlog {

struct Toggles {
  bool plan_opt = true;
  SipMode sip = SipMode::Auto;
  bool fusion = true;
  bool sharing = true;
  // Presence diffs; off means count diffs with distinct after every rule.
  bool boolean_spec = true;
  std::size_t jst_cap = kDefaultJstCap;
};

struct RulePlan {
  int rule_id = 0;
  RuleCatalog catalog;
  JoinGraph graph;
  PlanChoice choice;
  IRNode unfused;
  IRNode ir;
  HeadBinding head;
};

struct CompiledProgram {
  Program program;  // after sip rewriting
  Stratification strata;
  std::vector<SipRewrite> sip;
  std::vector<RulePlan> rules;
  PlanDAG dag;
  Toggles toggles;

  const RulePlan& plan(int rule_id) const;
};

CompiledProgram compile(const Program& parsed, const Toggles& toggles = {});
CompiledProgram compile_source(const std::string& text, const Toggles& toggles = {});

std::string explain(const CompiledProgram& compiled);

struct EvaluationResult {
  Facts outputs;  // every IDB relation
  EvalStats stats;
};

// `inputs` are loaded into the named relations before running.
EvaluationResult evaluate(const CompiledProgram& compiled, const Facts& inputs, EngineOptions options = {});

}  // namespace flowlog
