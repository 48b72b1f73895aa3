#include "flowlog/plan_dag.hpp"

#include <map>
#include <sstream>

namespace flowlog {

namespace {

struct Builder {
  PlanDAG dag;
  bool sharing = true;
  std::map<std::string, std::size_t> by_encoding;

  std::size_t intern(const IRNode& tree) {
    std::string enc = canonicalize(tree);
    if (sharing) {
      auto it = by_encoding.find(enc);
      if (it != by_encoding.end()) {
        ++dag.shared_count;
        return it->second;
      }
    }
    DagNode node;
    node.op = tree;
    node.op.children.clear();
    for (const auto& child : tree.children) {
      const std::size_t id = intern(child);
      IRNode ref;
      ref.kind = IRKind::SharedRef;
      ref.shared_id = id;
      ref.out = child.out;
      node.op.children.push_back(std::move(ref));
      node.inputs.push_back(id);
    }
    node.encoding = enc;
    const std::size_t id = dag.nodes.size();
    dag.nodes.push_back(std::move(node));
    by_encoding.emplace(std::move(enc), id);
    return id;
  }
};

}  // namespace

PlanDAG share_subplans(const std::vector<RootSpec>& roots, bool sharing) {
  Builder b;
  b.sharing = sharing;
  for (const auto& r : roots) {
    const std::size_t id = b.intern(r.tree);
    b.dag.roots.push_back({r.rule_id, r.variant, id, r.head});
  }
  return std::move(b.dag);
}

std::size_t PlanDAG::deduplicate() {
  std::map<std::string, std::size_t> first;
  std::vector<std::size_t> target(nodes.size());
  std::size_t merged = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto [it, inserted] = first.emplace(nodes[i].encoding, i);
    target[i] = it->second;
    if (!inserted) ++merged;
  }
  if (merged == 0) return 0;
  std::vector<std::size_t> new_id(nodes.size());
  std::vector<DagNode> kept;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (target[i] != i) continue;
    new_id[i] = kept.size();
    kept.push_back(std::move(nodes[i]));
  }
  for (auto& n : kept) {
    for (std::size_t c = 0; c < n.inputs.size(); ++c) {
      n.inputs[c] = new_id[target[n.inputs[c]]];
      n.op.children[c].shared_id = n.inputs[c];
    }
  }
  for (auto& r : roots) r.node = new_id[target[r.node]];
  nodes = std::move(kept);
  shared_count += merged;
  return merged;
}

std::string PlanDAG::describe() const {
  std::ostringstream os;
  os << "plan dag: " << nodes.size() << " nodes, " << shared_count << " shared\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    os << "  #" << i << " " << describe_ir(nodes[i].op, 0);
  }
  for (const auto& r : roots) {
    os << "  rule " << r.rule_id << " [" << r.variant << "] -> #" << r.node << " into " << r.head.relation << "\n";
  }
  return os.str();
}

}  // namespace flowlog
