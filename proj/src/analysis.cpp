#include "flowlog/analysis.hpp"

#include <algorithm>
#include <functional>

#include "flowlog/error.hpp"

namespace flowlog {

namespace {

bool subset(const std::vector<std::string>& small, const std::vector<std::string>& big) {
  return std::all_of(small.begin(), small.end(),
                     [&](const std::string& v) { return std::find(big.begin(), big.end(), v) != big.end(); });
}

bool is_count_or_sum(const Rule& rule) { return rule.aggregate && !is_lattice(rule.aggregate->fn); }

}  // namespace

bool DependencyGraph::has_edge(int from, int to) const {
  return std::any_of(edges.begin(), edges.end(), [&](const DependencyEdge& e) { return e.from == from && e.to == to; });
}

DependencyGraph build_dependency_graph(const Program& program) {
  DependencyGraph graph;
  std::map<std::string, std::vector<int>> defined_by;
  for (const auto& rule : program.rules) {
    graph.rules.push_back(rule.id);
    defined_by[rule.head.relation].push_back(rule.id);
  }
  std::map<std::pair<int, int>, bool> flags;
  for (const auto& reader : program.rules) {
    for (const auto& atom : reader.body) {
      auto it = defined_by.find(atom.relation);
      if (it == defined_by.end()) continue;
      const bool flagged = atom.negated || is_count_or_sum(reader);
      for (int writer : it->second) {
        auto [slot, inserted] = flags.emplace(std::make_pair(writer, reader.id), flagged);
        if (!inserted) slot->second = slot->second || flagged;
      }
    }
  }
  for (const auto& [key, flagged] : flags) graph.edges.push_back({key.first, key.second, flagged});
  return graph;
}

std::size_t Stratification::stratum_of_rule(int rule_id) const {
  for (std::size_t i = 0; i < strata.size(); ++i) {
    if (std::find(strata[i].rules.begin(), strata[i].rules.end(), rule_id) != strata[i].rules.end()) return i;
  }
  throw Error(ErrorKind::InvalidArgument, "rule " + std::to_string(rule_id) + " is not stratified");
}

Stratification stratify(const Program& program, const DependencyGraph& graph) {
  const std::size_t n = graph.rules.size();
  std::map<int, std::size_t> index_of;
  for (std::size_t i = 0; i < n; ++i) index_of[graph.rules[i]] = i;
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& e : graph.edges) succ[index_of.at(e.from)].push_back(index_of.at(e.to));

  // Tarjan's algorithm.
  std::vector<long> order(n, -1), low(n, 0), component(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  long counter = 0;
  long components = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    order[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : succ[v]) {
      if (order[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], order[w]);
      }
    }
    if (low[v] == order[v]) {
      while (true) {
        const std::size_t w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component[w] = components;
        if (w == v) break;
      }
      ++components;
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (order[v] < 0) visit(v);
  }

  const auto c = static_cast<std::size_t>(components);
  std::vector<std::vector<int>> members(c);
  for (std::size_t v = 0; v < n; ++v) members[static_cast<std::size_t>(component[v])].push_back(graph.rules[v]);
  for (auto& m : members) std::sort(m.begin(), m.end());

  std::vector<std::set<std::size_t>> comp_succ(c);
  std::vector<std::size_t> indegree(c, 0);
  std::vector<bool> cyclic(c, false);
  for (const auto& e : graph.edges) {
    const auto a = static_cast<std::size_t>(component[index_of.at(e.from)]);
    const auto b = static_cast<std::size_t>(component[index_of.at(e.to)]);
    if (a == b) {
      cyclic[a] = true;
      if (e.negated_or_aggregated) {
        throw Error(ErrorKind::UnstratifiableProgram,
                    "rules " + std::to_string(e.from) + " and " + std::to_string(e.to) +
                        " depend on each other through negation or aggregation");
      }
    } else if (comp_succ[a].insert(b).second) {
      ++indegree[b];
    }
  }

  // Kahn's algorithm; among ready components the one with the smallest rule
  // id goes first.
  Stratification result;
  auto cmp = [&](std::size_t a, std::size_t b) { return members[a].front() > members[b].front(); };
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < c; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::make_heap(ready.begin(), ready.end(), cmp);
  while (!ready.empty()) {
    std::pop_heap(ready.begin(), ready.end(), cmp);
    const std::size_t comp = ready.back();
    ready.pop_back();
    Stratum stratum;
    stratum.rules = members[comp];
    stratum.recursive = cyclic[comp];
    for (int id : stratum.rules) {
      const Rule& rule = program.rule(id);
      stratum.relations.insert(rule.head.relation);
      if (stratum.recursive && is_count_or_sum(rule)) {
        throw Error(ErrorKind::UnstratifiableProgram,
                    "rule " + std::to_string(id) + ": COUNT/SUM aggregates are not allowed in recursion");
      }
    }
    for (const auto& rel : stratum.relations) result.stratum_of[rel] = result.strata.size();
    result.strata.push_back(std::move(stratum));
    for (std::size_t next : comp_succ[comp]) {
      if (--indegree[next] == 0) {
        ready.push_back(next);
        std::push_heap(ready.begin(), ready.end(), cmp);
      }
    }
  }
  return result;
}

Stratification stratify(const Program& program) { return stratify(program, build_dependency_graph(program)); }

bool RuleCatalog::is_join_node(std::size_t body_index) const {
  return std::find(join_nodes.begin(), join_nodes.end(), body_index) != join_nodes.end();
}

RuleCatalog build_rule_catalog(const Rule& rule, const std::set<std::string>& pinned) {
  RuleCatalog cat;
  cat.rule = rule;
  cat.variable_order = rule.variable_order();
  cat.output_variables = rule.head_variables();
  for (const auto& atom : rule.body) cat.atom_variables.push_back(atom.variables());

  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < rule.body.size(); ++i) {
    if (!rule.body[i].negated) positive.push_back(i);
  }

  // An atom is absorbed as a semijoin when another atom's variables strictly
  // contain its own. Among atoms with identical variable sets one
  // representative stays; it is picked by content, not position, so the
  // classification does not depend on body order.
  auto rank_key = [&](std::size_t i) {
    return std::make_tuple(rule.body[i].relation, to_string(rule.body[i]), i);
  };
  auto absorbed_by = [&](std::size_t s, std::size_t a) {
    if (s == a || pinned.count(rule.body[s].relation)) return false;
    const auto& vs = cat.atom_variables[s];
    const auto& va = cat.atom_variables[a];
    if (!subset(vs, va)) return false;
    if (vs.size() < va.size()) return true;
    return rank_key(a) < rank_key(s);
  };
  for (std::size_t s : positive) {
    const bool absorbed = std::any_of(positive.begin(), positive.end(), [&](std::size_t a) { return absorbed_by(s, a); });
    if (!absorbed) cat.join_nodes.push_back(s);
  }
  for (std::size_t s : positive) {
    if (cat.is_join_node(s)) continue;
    // Attach to the join node sharing the most variables; ties by body order.
    long best = -1;
    std::size_t best_shared = 0;
    for (std::size_t a : cat.join_nodes) {
      if (!subset(cat.atom_variables[s], cat.atom_variables[a])) continue;
      const std::size_t shared = cat.atom_variables[s].size();
      if (best < 0 || shared > best_shared) {
        best = static_cast<long>(a);
        best_shared = shared;
      }
    }
    cat.semijoins.push_back({s, static_cast<std::size_t>(best)});
  }

  auto owner_of = [&](const std::vector<std::string>& vars) -> long {
    for (std::size_t a : cat.join_nodes) {
      if (subset(vars, cat.atom_variables[a])) return static_cast<long>(a);
    }
    return -1;
  };
  for (const auto& c : rule.constraints) {
    PlacedFilter f;
    f.constraint = c;
    f.variables = c.variables();
    f.owner = owner_of(f.variables);
    cat.filters.push_back(std::move(f));
  }
  for (std::size_t i = 0; i < rule.body.size(); ++i) {
    if (!rule.body[i].negated) continue;
    PlacedNegation n;
    n.body_index = i;
    n.variables = cat.atom_variables[i];
    n.owner = owner_of(n.variables);
    cat.negations.push_back(std::move(n));
  }
  return cat;
}

}  // namespace flowlog

namespace flowlog {

RuleCatalog build_rule_catalog(const Program& program, const Stratification& strata, int rule_id) {
  const Stratum& s = strata.strata.at(strata.stratum_of_rule(rule_id));
  return build_rule_catalog(program.rule(rule_id), s.recursive ? s.relations : std::set<std::string>{});
}

}  // namespace flowlog
