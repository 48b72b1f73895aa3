#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "flowlog/analysis.hpp"

namespace flowlog {

struct JoinGraphNode {
  std::size_t body_index = 0;
  std::vector<std::string> variables;
};

struct JoinGraphEdge {
  std::size_t u = 0;  // node positions, u < v
  std::size_t v = 0;
  std::size_t weight = 0;

  friend bool operator==(const JoinGraphEdge&, const JoinGraphEdge&) = default;
  friend auto operator<=>(const JoinGraphEdge&, const JoinGraphEdge&) = default;
};

struct JoinGraph {
  std::vector<JoinGraphNode> nodes;
  std::vector<JoinGraphEdge> edges;  // sorted by (u, v)

  std::size_t weight(std::size_t a, std::size_t b) const;
  std::vector<std::size_t> neighbors(std::size_t node) const;
  std::optional<std::size_t> node_of(std::size_t body_index) const;
};

JoinGraph build_join_graph(const RuleCatalog& catalog);

// A maximum spanning forest with one root per connected component. Node ids
// are positions in JoinGraph::nodes.
struct RootedJST {
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // sorted, u < v
  std::vector<std::size_t> roots;                          // largest component first
  std::vector<std::optional<std::size_t>> parent;
  std::vector<std::size_t> post_order;

  std::size_t root() const { return roots.front(); }
  std::size_t size() const { return parent.size(); }
  std::vector<std::size_t> children(std::size_t node) const;
  std::size_t depth() const;
  std::size_t total_weight(const JoinGraph& graph) const;
  // Roots followed by the parent of every node (-1 for roots).
  std::vector<long> encoding() const;
  std::string describe(const JoinGraph& graph, const Rule& rule) const;
};

// Builds a rooted forest from an edge set and one root per component.
RootedJST make_rooted(std::size_t node_count, std::vector<std::pair<std::size_t, std::size_t>> edges,
                      std::vector<std::size_t> roots);

constexpr std::size_t kDefaultJstCap = 10000;

// Every maximum-weight spanning forest, rooted in every possible way, in
// lexicographic order of edge set and then roots. Throws SearchSpaceExceeded
// when more than `cap` (tree, root) pairs exist.
std::vector<RootedJST> enumerate_rooted_jsts(const JoinGraph& graph, std::size_t cap = kDefaultJstCap);

// Left-deep chain in body order: each node's parent is the next one.
RootedJST listing_order_plan(const JoinGraph& graph);

// Join order derived from a rooted JST. Operands are join-graph nodes or
// earlier steps. At every node the node's own atom is joined with its
// children's subtree results one by one, narrowest intermediate first.
// Components are combined last by cross product.
struct JoinOperand {
  bool is_step = false;
  std::size_t index = 0;  // node position or step index

  friend bool operator==(const JoinOperand&, const JoinOperand&) = default;
};

struct JoinStep {
  JoinOperand left;
  JoinOperand right;
  std::vector<std::string> keys;
  std::vector<std::string> inputs;    // retained(left) ∪ retained(right)
  std::vector<std::string> retained;  // kept after the step
};

struct JoinSchedule {
  std::vector<std::vector<std::string>> leaf_retained;  // per node
  std::vector<JoinStep> steps;
  JoinOperand result;
};

JoinSchedule schedule_joins(const RootedJST& jst, const JoinGraph& graph, const RuleCatalog& catalog);

struct StepCost {
  std::string label;
  std::size_t variables = 0;
};

struct PlanCost {
  std::vector<StepCost> per_step;
  std::size_t total = 0;
};

PlanCost plan_cost(const RootedJST& jst, const JoinGraph& graph, const RuleCatalog& catalog);

struct PlanCandidate {
  RootedJST jst;
  PlanCost cost;
};

struct PlanChoice {
  RootedJST jst;
  PlanCost cost;
  bool listing_order = false;
  bool search_exceeded = false;
  std::vector<PlanCandidate> candidates;
};

// Minimum cost, then smaller depth, then smallest encoding. The listing order
// is kept only when it is strictly cheaper than every rooted JST, and is the
// fallback when the search space exceeds the cap.
PlanChoice select_plan(const RuleCatalog& catalog, const JoinGraph& graph, std::size_t cap = kDefaultJstCap);

PlanChoice listing_order_choice(const RuleCatalog& catalog, const JoinGraph& graph);

}  // namespace flowlog
