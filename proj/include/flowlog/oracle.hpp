#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flowlog/ast.hpp"
#include "flowlog/collection.hpp"

namespace flowlog {

using Relations = std::map<std::string, std::set<Tuple>>;

// Plain fixpoint evaluation: every round re-derives from all facts with
// indexed nested loops in body order. Shares only the parser and stratifier
// with the optimized path. Returns every declared relation; lattice
// relations carry their value as the last column.
Relations naive_evaluate(const Program& program, const Relations& inputs);

struct GraphInstance {
  std::vector<std::pair<Value, Value>> edges;
  std::vector<Value> weights;  // parallel to edges when weighted
  std::vector<Value> sources;  // targets / sources / start nodes
};

enum class ReferenceKind { TC, ReachEven, CcMin, Sssp, Bipartite };

// Classical graph algorithms, no Datalog involved.
//   TC         pairs joined by a path of one or more edges (Warshall)
//   ReachEven  nodes with an even-length path to a source
//   CcMin      (node, smallest node id in its component), union-find
//   Sssp       (node, distance) from the sources, Dijkstra
//   Bipartite  {()} when some node is reached at both parities, else {}
std::set<Tuple> reference_algorithm(ReferenceKind kind, const GraphInstance& graph);

struct RandomGraphSpec {
  std::size_t nodes = 0;
  double probability = 0.0;
  std::optional<std::size_t> edge_count;  // overrides probability
  std::uint64_t seed = 0;
  bool weighted = false;
  bool undirected = false;
  bool self_loops = false;
  Value max_weight = 10;
};

GraphInstance generate_graph(const RandomGraphSpec& spec);

}  // namespace flowlog
