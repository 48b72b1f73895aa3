#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "flowlog/ir.hpp"

namespace flowlog {

// One operator of the global plan. Children of `op` are SharedRef nodes
// naming the input node ids, so `op` never holds a subtree.
struct DagNode {
  IRNode op;
  std::vector<std::size_t> inputs;
  std::string encoding;  // canonical encoding of the full subtree
};

struct PlanRoot {
  int rule_id = 0;
  std::string variant;  // "base" or "delta@<body index>"
  std::size_t node = 0;
  HeadBinding head;
};

struct RootSpec {
  int rule_id = 0;
  std::string variant;
  IRNode tree;
  HeadBinding head;
};

struct PlanDAG {
  std::vector<DagNode> nodes;  // inputs always precede their consumers
  std::vector<PlanRoot> roots;
  std::size_t shared_count = 0;

  // Merges nodes with identical encodings; returns the number merged.
  std::size_t deduplicate();
  std::string describe() const;
};

// Registers every subtree; with `sharing` on, a subtree whose encoding was
// already registered becomes a reference to the first occurrence.
PlanDAG share_subplans(const std::vector<RootSpec>& roots, bool sharing = true);

}  // namespace flowlog
