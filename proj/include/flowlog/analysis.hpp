#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "flowlog/ast.hpp"

namespace flowlog {

struct DependencyEdge {
  int from = 0;  // rule whose head is read
  int to = 0;    // rule reading it
  // The occurrence is negated, or feeds a COUNT/SUM head. MIN/MAX heads are
  // monotone lattice updates and do not set the flag.
  bool negated_or_aggregated = false;

  friend bool operator==(const DependencyEdge&, const DependencyEdge&) = default;
  friend auto operator<=>(const DependencyEdge&, const DependencyEdge&) = default;
};

struct DependencyGraph {
  std::vector<int> rules;
  std::vector<DependencyEdge> edges;  // sorted, unique

  bool has_edge(int from, int to) const;
};

DependencyGraph build_dependency_graph(const Program& program);

struct Stratum {
  std::vector<int> rules;  // ascending rule ids
  bool recursive = false;
  std::set<std::string> relations;  // heads defined in this stratum
};

struct Stratification {
  std::vector<Stratum> strata;  // topological order
  // Highest stratum that defines the relation (IDBs only).
  std::map<std::string, std::size_t> stratum_of;

  std::size_t stratum_of_rule(int rule_id) const;
};

// SCC condensation of the dependency graph in a deterministic topological
// order. Throws UnstratifiableProgram when a negated or COUNT/SUM edge lies
// inside one component.
Stratification stratify(const Program& program, const DependencyGraph& graph);
Stratification stratify(const Program& program);

// One positive body atom, with its distinct named variables.
struct CatalogAtom {
  std::size_t body_index = 0;
  Atom atom;
  std::vector<std::string> variables;
};

struct SemijoinAtom {
  std::size_t body_index = 0;
  std::size_t subsumer = 0;  // body index of the join-graph node absorbing it
};

// A constraint or negated atom together with where it is evaluated. `owner`
// is the body index of the join-graph atom binding all of its variables, or
// -1 when no single atom does and the plan has to place it at a join.
struct PlacedFilter {
  Constraint constraint;
  std::vector<std::string> variables;
  long owner = -1;
};

struct PlacedNegation {
  std::size_t body_index = 0;
  std::vector<std::string> variables;
  long owner = -1;
};

struct RuleCatalog {
  Rule rule;
  std::vector<std::vector<std::string>> atom_variables;  // per body atom
  std::vector<std::size_t> join_nodes;                    // body indices
  std::vector<SemijoinAtom> semijoins;
  std::vector<PlacedNegation> negations;
  std::vector<PlacedFilter> filters;
  std::vector<std::string> output_variables;  // head variables incl. aggregate inputs
  std::vector<std::string> variable_order;

  const std::vector<std::string>& vars_of(std::size_t body_index) const { return atom_variables[body_index]; }
  bool is_join_node(std::size_t body_index) const;
};

// Atoms over `pinned` relations are never absorbed as semijoins.
RuleCatalog build_rule_catalog(const Rule& rule, const std::set<std::string>& pinned = {});
// Pins the relations recursive with the rule's head, so the atoms that drive
// delta variants stay join-graph nodes.
RuleCatalog build_rule_catalog(const Program& program, const Stratification& strata, int rule_id);

}  // namespace flowlog
