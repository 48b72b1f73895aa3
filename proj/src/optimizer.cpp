#include "flowlog/optimizer.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "flowlog/error.hpp"

namespace flowlog {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

bool contains(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

std::vector<std::vector<std::size_t>> components_of(const JoinGraph& graph) {
  UnionFind uf(graph.nodes.size());
  for (const auto& e : graph.edges) uf.unite(e.u, e.v);
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) by_root[uf.find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> comps;
  for (auto& [r, members] : by_root) comps.push_back(std::move(members));
  std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  return comps;
}

std::vector<std::string> atom_label_list(const JoinGraph& graph, const Rule& rule, const std::vector<std::size_t>& ns) {
  std::vector<std::string> out;
  for (std::size_t n : ns) out.push_back(to_string(rule.body[graph.nodes[n].body_index]));
  return out;
}

}  // namespace

std::size_t JoinGraph::weight(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  for (const auto& e : edges) {
    if (e.u == a && e.v == b) return e.weight;
  }
  return 0;
}

std::vector<std::size_t> JoinGraph::neighbors(std::size_t node) const {
  std::vector<std::size_t> out;
  for (const auto& e : edges) {
    if (e.u == node) out.push_back(e.v);
    if (e.v == node) out.push_back(e.u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> JoinGraph::node_of(std::size_t body_index) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].body_index == body_index) return i;
  }
  return std::nullopt;
}

JoinGraph build_join_graph(const RuleCatalog& catalog) {
  JoinGraph graph;
  for (std::size_t b : catalog.join_nodes) graph.nodes.push_back({b, catalog.vars_of(b)});
  for (std::size_t u = 0; u < graph.nodes.size(); ++u) {
    for (std::size_t v = u + 1; v < graph.nodes.size(); ++v) {
      std::size_t shared = 0;
      for (const auto& x : graph.nodes[u].variables) shared += contains(graph.nodes[v].variables, x) ? 1 : 0;
      if (shared > 0) graph.edges.push_back({u, v, shared});
    }
  }
  return graph;
}

std::vector<std::size_t> RootedJST::children(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i] && *parent[i] == node) out.push_back(i);
  }
  return out;
}

std::size_t RootedJST::depth() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    std::size_t d = 0;
    for (auto p = parent[i]; p; p = parent[*p]) ++d;
    best = std::max(best, d);
  }
  return best;
}

std::size_t RootedJST::total_weight(const JoinGraph& graph) const {
  std::size_t total = 0;
  for (const auto& [u, v] : edges) total += graph.weight(u, v);
  return total;
}

std::vector<long> RootedJST::encoding() const {
  std::vector<long> out;
  for (std::size_t r : roots) out.push_back(static_cast<long>(r));
  for (const auto& p : parent) out.push_back(p ? static_cast<long>(*p) : -1);
  return out;
}

std::string RootedJST::describe(const JoinGraph& graph, const Rule& rule) const {
  std::ostringstream os;
  const auto roots_text = atom_label_list(graph, rule, roots);
  os << "roots=[";
  for (std::size_t i = 0; i < roots_text.size(); ++i) os << (i ? ", " : "") << roots_text[i];
  os << "] parent={";
  bool first = true;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (!parent[i]) continue;
    os << (first ? "" : ", ") << to_string(rule.body[graph.nodes[i].body_index]) << " -> "
       << to_string(rule.body[graph.nodes[*parent[i]].body_index]);
    first = false;
  }
  os << "} post=[";
  const auto post_text = atom_label_list(graph, rule, post_order);
  for (std::size_t i = 0; i < post_text.size(); ++i) os << (i ? ", " : "") << post_text[i];
  os << "]";
  return os.str();
}

RootedJST make_rooted(std::size_t node_count, std::vector<std::pair<std::size_t, std::size_t>> edges,
                      std::vector<std::size_t> roots) {
  RootedJST t;
  for (auto& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  t.edges = std::move(edges);
  t.roots = std::move(roots);
  t.parent.assign(node_count, std::nullopt);
  std::vector<std::vector<std::size_t>> adj(node_count);
  for (const auto& [u, v] : t.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  std::vector<bool> seen(node_count, false);
  // Post-order with children in ascending node order.
  std::function<void(std::size_t)> walk = [&](std::size_t n) {
    seen[n] = true;
    for (std::size_t m : adj[n]) {
      if (seen[m]) continue;
      t.parent[m] = n;
      walk(m);
    }
    t.post_order.push_back(n);
  };
  for (std::size_t r : t.roots) {
    if (!seen[r]) walk(r);
  }
  return t;
}

std::vector<RootedJST> enumerate_rooted_jsts(const JoinGraph& graph, std::size_t cap) {
  const std::size_t n = graph.nodes.size();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "join graph has no nodes");

  std::vector<JoinGraphEdge> order = graph.edges;
  std::sort(order.begin(), order.end(), [](const JoinGraphEdge& a, const JoinGraphEdge& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });

  // Kruskal from a partial state gives the best completion weight, so it is
  // an exact bound for pruning the include/exclude search.
  auto best_completion = [&](std::size_t from, UnionFind uf) {
    std::size_t w = 0;
    for (std::size_t i = from; i < order.size(); ++i) {
      if (uf.unite(order[i].u, order[i].v)) w += order[i].weight;
    }
    return w;
  };
  const std::size_t max_weight = best_completion(0, UnionFind(n));

  const auto comps = components_of(graph);
  std::size_t roots_per_tree = 1;
  for (const auto& c : comps) {
    roots_per_tree *= c.size();
    if (roots_per_tree > cap) break;
  }
  if (roots_per_tree > cap) {
    throw Error(ErrorKind::SearchSpaceExceeded, "rooted join spanning trees exceed the cap of " + std::to_string(cap));
  }

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> trees;
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  std::function<void(std::size_t, UnionFind, std::size_t)> search = [&](std::size_t i, UnionFind uf, std::size_t w) {
    if (w + best_completion(i, uf) < max_weight) return;
    if (i == order.size()) {
      trees.push_back(chosen);
      if (trees.size() * roots_per_tree > cap) {
        throw Error(ErrorKind::SearchSpaceExceeded,
                    "rooted join spanning trees exceed the cap of " + std::to_string(cap));
      }
      return;
    }
    const auto& e = order[i];
    UnionFind with = uf;
    if (with.unite(e.u, e.v)) {
      chosen.emplace_back(e.u, e.v);
      search(i + 1, std::move(with), w + e.weight);
      chosen.pop_back();
    }
    search(i + 1, std::move(uf), w);
  };
  search(0, UnionFind(n), 0);

  std::vector<std::vector<std::size_t>> root_choices{{}};
  for (const auto& c : comps) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& prefix : root_choices) {
      for (std::size_t m : c) {
        auto r = prefix;
        r.push_back(m);
        next.push_back(std::move(r));
      }
    }
    root_choices = std::move(next);
  }

  std::vector<RootedJST> out;
  for (const auto& edges : trees) {
    for (const auto& roots : root_choices) out.push_back(make_rooted(n, edges, roots));
  }
  std::sort(out.begin(), out.end(), [](const RootedJST& a, const RootedJST& b) {
    if (a.edges != b.edges) return a.edges < b.edges;
    return a.roots < b.roots;
  });
  return out;
}

RootedJST listing_order_plan(const JoinGraph& graph) {
  const std::size_t n = graph.nodes.size();
  RootedJST t;
  t.parent.assign(n, std::nullopt);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t.parent[i] = i + 1;
    t.edges.emplace_back(i, i + 1);
    t.post_order.push_back(i);
  }
  if (n > 0) {
    t.roots.push_back(n - 1);
    t.post_order.push_back(n - 1);
  }
  return t;
}

JoinSchedule schedule_joins(const RootedJST& jst, const JoinGraph& graph, const RuleCatalog& catalog) {
  const std::size_t n = graph.nodes.size();
  JoinSchedule sched;
  sched.leaf_retained.resize(n);

  const auto& order = catalog.variable_order;
  auto ordered = [&](const std::set<std::string>& vars) {
    std::vector<std::string> out;
    for (const auto& v : order) {
      if (vars.count(v)) out.push_back(v);
    }
    return out;
  };
  auto vars_of = [&](const std::vector<bool>& s) {
    std::set<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (s[i]) out.insert(graph.nodes[i].variables.begin(), graph.nodes[i].variables.end());
    }
    return out;
  };
  auto needed = [&](const std::vector<bool>& s, const std::set<std::string>& have) {
    std::set<std::string> out(catalog.output_variables.begin(), catalog.output_variables.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (!s[i]) out.insert(graph.nodes[i].variables.begin(), graph.nodes[i].variables.end());
    }
    auto pending = [&](const std::vector<std::string>& vs) {
      for (const auto& v : vs) {
        if (!have.count(v)) return true;
      }
      return false;
    };
    for (const auto& f : catalog.filters) {
      if (pending(f.variables)) out.insert(f.variables.begin(), f.variables.end());
    }
    for (const auto& ng : catalog.negations) {
      if (pending(ng.variables)) out.insert(ng.variables.begin(), ng.variables.end());
    }
    return out;
  };
  auto retained_of = [&](const std::vector<bool>& s) {
    const auto have = vars_of(s);
    const auto need = needed(s, have);
    std::set<std::string> keep;
    for (const auto& v : have) {
      if (need.count(v)) keep.insert(v);
    }
    return ordered(keep);
  };

  struct Sub {
    JoinOperand op;
    std::vector<bool> covered;
    std::vector<std::string> retained;
    std::size_t min_node = 0;
  };
  auto join = [&](const Sub& left, const Sub& right) {
    JoinStep step;
    step.left = left.op;
    step.right = right.op;
    std::set<std::string> in(left.retained.begin(), left.retained.end());
    std::set<std::string> keys;
    for (const auto& v : right.retained) {
      if (in.count(v)) keys.insert(v);
      in.insert(v);
    }
    step.keys = ordered(keys);
    step.inputs = ordered(in);
    Sub out;
    out.covered = left.covered;
    for (std::size_t i = 0; i < n; ++i) out.covered[i] = out.covered[i] || right.covered[i];
    out.retained = retained_of(out.covered);
    out.min_node = std::min(left.min_node, right.min_node);
    step.retained = out.retained;
    out.op = {true, sched.steps.size()};
    sched.steps.push_back(std::move(step));
    return out;
  };
  auto width = [](const Sub& a, const Sub& b) {
    std::set<std::string> u(a.retained.begin(), a.retained.end());
    u.insert(b.retained.begin(), b.retained.end());
    return u.size();
  };

  std::function<Sub(std::size_t)> build = [&](std::size_t node) {
    Sub acc;
    acc.op = {false, node};
    acc.covered.assign(n, false);
    acc.covered[node] = true;
    acc.retained = retained_of(acc.covered);
    acc.min_node = node;
    sched.leaf_retained[node] = acc.retained;
    std::vector<Sub> subs;
    for (std::size_t c : jst.children(node)) subs.push_back(build(c));
    while (!subs.empty()) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < subs.size(); ++i) {
        const auto wi = width(acc, subs[i]);
        const auto wb = width(acc, subs[best]);
        if (wi < wb || (wi == wb && subs[i].min_node < subs[best].min_node)) best = i;
      }
      acc = join(subs[best], acc);
      subs.erase(subs.begin() + static_cast<long>(best));
    }
    return acc;
  };

  std::vector<Sub> parts;
  for (std::size_t r : jst.roots) parts.push_back(build(r));
  Sub acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = join(acc, parts[i]);
  sched.result = acc.op;
  return sched;
}

PlanCost plan_cost(const RootedJST& jst, const JoinGraph& graph, const RuleCatalog& catalog) {
  const auto sched = schedule_joins(jst, graph, catalog);
  PlanCost cost;
  for (std::size_t node = 0; node < graph.nodes.size(); ++node) {
    cost.per_step.push_back(
        {"scan " + to_string(catalog.rule.body[graph.nodes[node].body_index]), graph.nodes[node].variables.size()});
  }
  for (std::size_t i = 0; i < sched.steps.size(); ++i) {
    cost.per_step.push_back({"join " + std::to_string(i), sched.steps[i].inputs.size()});
  }
  for (const auto& s : cost.per_step) cost.total = std::max(cost.total, s.variables);
  return cost;
}

PlanChoice listing_order_choice(const RuleCatalog& catalog, const JoinGraph& graph) {
  PlanChoice choice;
  choice.jst = listing_order_plan(graph);
  choice.cost = plan_cost(choice.jst, graph, catalog);
  choice.listing_order = true;
  return choice;
}

PlanChoice select_plan(const RuleCatalog& catalog, const JoinGraph& graph, std::size_t cap) {
  std::vector<RootedJST> jsts;
  try {
    jsts = enumerate_rooted_jsts(graph, cap);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SearchSpaceExceeded) throw;
    PlanChoice fallback = listing_order_choice(catalog, graph);
    fallback.search_exceeded = true;
    return fallback;
  }

  PlanChoice choice;
  std::optional<std::size_t> best;
  for (auto& t : jsts) {
    PlanCandidate cand{std::move(t), {}};
    cand.cost = plan_cost(cand.jst, graph, catalog);
    choice.candidates.push_back(std::move(cand));
    const auto& c = choice.candidates.back();
    if (!best) {
      best = choice.candidates.size() - 1;
      continue;
    }
    const auto& b = choice.candidates[*best];
    const auto key_c = std::make_tuple(c.cost.total, c.jst.depth(), c.jst.encoding());
    const auto key_b = std::make_tuple(b.cost.total, b.jst.depth(), b.jst.encoding());
    if (key_c < key_b) best = choice.candidates.size() - 1;
  }
  choice.jst = choice.candidates[*best].jst;
  choice.cost = choice.candidates[*best].cost;

  PlanChoice listing = listing_order_choice(catalog, graph);
  if (listing.cost.total < choice.cost.total) {
    listing.candidates = std::move(choice.candidates);
    return listing;
  }
  return choice;
}

}  // namespace flowlog
