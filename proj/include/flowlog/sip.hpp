#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "flowlog/analysis.hpp"
#include "flowlog/optimizer.hpp"

namespace flowlog {

// Two-pass semijoin prefiltering of one rule, expressed as rule rewriting.
struct SipRewrite {
  int rule_id = 0;
  std::vector<std::size_t> visit_order;  // body indices
  std::vector<Rule> aux_rules;           // pass 1 first, then pass 2
  std::vector<RelationDecl> aux_relations;
  Rule reduced_rule;
};

std::string sip_relation_name(int rule_id, std::size_t body_index, int pass);

// BFS over the join graph from the atom with the most variables (ties by body
// order), neighbors in body order. Disconnected graphs restart the search.
std::vector<std::size_t> default_sip_order(const RuleCatalog& catalog, const JoinGraph& graph);

// `visit_order` lists body indices of the join-graph atoms. Aux rules get ids
// starting at `first_aux_id`; the reduced rule keeps the original id.
// Throws NotApplicable when the join graph has fewer than two atoms.
SipRewrite sip_rewrite(const Program& program, const RuleCatalog& catalog, const std::vector<std::size_t>& visit_order,
                       int first_aux_id);

enum class SipMode { Auto, Always, Never };

// Auto rewrites recursive rules whose join graph has a cycle.
Program apply_sip(const Program& program, const Stratification& strata, SipMode mode,
                  std::vector<SipRewrite>* rewrites = nullptr);

}  // namespace flowlog
