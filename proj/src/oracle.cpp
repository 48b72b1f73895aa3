#include "flowlog/oracle.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

#include "flowlog/analysis.hpp"
#include "flowlog/error.hpp"

namespace flowlog {

namespace {

class NaiveEvaluator {
 public:
  NaiveEvaluator(const Program& program, const Relations& inputs) : program_(program) {
    for (const auto& [name, decl] : program.relations) {
      sets_[name];
      for (const auto& rule : program.rules) {
        if (rule.head.relation == name && rule.aggregate && is_lattice(rule.aggregate->fn)) {
          lattice_fn_[name] = rule.aggregate->fn;
        }
      }
    }
    for (const auto& [name, rows] : inputs) {
      if (!program.relations.count(name)) continue;
      sets_[name].insert(rows.begin(), rows.end());
    }
  }

  Relations run() {
    const Stratification strata = stratify(program_);
    for (const auto& stratum : strata.strata) {
      while (round(stratum)) {
      }
    }
    Relations out;
    for (const auto& [name, rows] : sets_) out[name] = rows;
    for (const auto& [name, groups] : lattice_) {
      auto& dst = out[name];
      for (const auto& [g, v] : groups) {
        Tuple t = g;
        t.push_back(v);
        dst.insert(std::move(t));
      }
    }
    return out;
  }

 private:
  using Index = std::map<Tuple, std::vector<const Tuple*>>;

  const Program& program_;
  std::map<std::string, std::set<Tuple>> sets_;
  std::map<std::string, std::map<Tuple, Value>> lattice_;
  std::map<std::string, AggregateFn> lattice_fn_;
  std::map<std::string, std::vector<Tuple>> snapshot_;
  std::map<std::pair<std::string, std::vector<bool>>, Index> indexes_;

  void take_snapshot() {
    snapshot_.clear();
    indexes_.clear();
    for (const auto& [name, rows] : sets_) {
      auto& dst = snapshot_[name];
      if (lattice_fn_.count(name)) {
        for (const auto& [g, v] : lattice_[name]) {
          Tuple t = g;
          t.push_back(v);
          dst.push_back(std::move(t));
        }
      } else {
        dst.assign(rows.begin(), rows.end());
      }
    }
  }

  const Index& index(const std::string& relation, const std::vector<bool>& mask) {
    auto key = std::make_pair(relation, mask);
    auto it = indexes_.find(key);
    if (it != indexes_.end()) return it->second;
    Index idx;
    for (const auto& t : snapshot_[relation]) {
      Tuple k;
      for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) k.push_back(t[i]);
      }
      idx[k].push_back(&t);
    }
    return indexes_.emplace(std::move(key), std::move(idx)).first->second;
  }

  // All satisfying assignments of the rule's variables, as maps from name.
  std::vector<std::map<std::string, Value>> bindings(const Rule& rule) {
    std::vector<const Atom*> positive;
    std::vector<const Atom*> negative;
    for (const auto& a : rule.body) (a.negated ? negative : positive).push_back(&a);
    std::vector<std::map<std::string, Value>> out;
    std::map<std::string, Value> env;

    auto value_of = [&](const Term& t) { return t.is_constant() ? t.value : env.at(t.name); };
    auto bound = [&](const Term& t) { return t.is_constant() || (t.is_variable() && env.count(t.name)); };

    std::function<void(std::size_t)> step = [&](std::size_t k) {
      if (k == positive.size()) {
        for (const auto& c : rule.constraints) {
          if (!evaluate_compare(value_of(c.left), c.op, value_of(c.right))) return;
        }
        for (const Atom* a : negative) {
          std::vector<bool> mask;
          Tuple key;
          for (const auto& t : a->terms) {
            mask.push_back(!t.is_placeholder());
            if (!t.is_placeholder()) key.push_back(value_of(t));
          }
          const auto& idx = index(a->relation, mask);
          if (idx.count(key)) return;
        }
        out.push_back(env);
        return;
      }
      const Atom& a = *positive[k];
      std::vector<bool> mask;
      Tuple key;
      for (const auto& t : a.terms) {
        mask.push_back(bound(t));
        if (bound(t)) key.push_back(value_of(t));
      }
      const auto& idx = index(a.relation, mask);
      auto it = idx.find(key);
      if (it == idx.end()) return;
      for (const Tuple* row : it->second) {
        std::vector<std::string> added;
        bool ok = true;
        for (std::size_t i = 0; i < a.terms.size() && ok; ++i) {
          const Term& t = a.terms[i];
          if (!t.is_variable()) continue;
          auto e = env.find(t.name);
          if (e == env.end()) {
            env[t.name] = (*row)[i];
            added.push_back(t.name);
          } else if (e->second != (*row)[i]) {
            ok = false;
          }
        }
        if (ok) step(k + 1);
        for (const auto& v : added) env.erase(v);
      }
    };
    step(0);
    return out;
  }

  bool round(const Stratum& stratum) {
    take_snapshot();
    bool changed = false;
    std::map<std::string, std::set<Tuple>> set_out;
    std::map<std::string, std::map<Tuple, Value>> lattice_out;
    std::map<std::string, std::set<Tuple>> agg_out;
    std::set<std::string> agg_relations;
    for (int id : stratum.rules) {
      const Rule& rule = program_.rule(id);
      const auto envs = bindings(rule);
      auto term_value = [](const Term& t, const std::map<std::string, Value>& env) {
        return t.is_constant() ? t.value : env.at(t.name);
      };
      const std::string& rel = rule.head.relation;
      if (!rule.aggregate) {
        for (const auto& env : envs) {
          Tuple t;
          for (const auto& term : rule.head.terms) t.push_back(term_value(term, env));
          set_out[rel].insert(std::move(t));
        }
        continue;
      }
      const auto& agg = *rule.aggregate;
      auto agg_value = [&](const std::map<std::string, Value>& env) {
        Value v = 0;
        for (const auto& t : agg.over) v += term_value(t, env);
        return v;
      };
      auto group_of = [&](const std::map<std::string, Value>& env) {
        Tuple g;
        for (std::size_t i = 0; i < rule.head.terms.size(); ++i) {
          if (i != agg.position) g.push_back(term_value(rule.head.terms[i], env));
        }
        return g;
      };
      if (is_lattice(agg.fn)) {
        auto& dst = lattice_out[rel];
        for (const auto& env : envs) {
          const Tuple g = group_of(env);
          const Value v = agg_value(env);
          auto it = dst.find(g);
          if (it == dst.end()) {
            dst.emplace(g, v);
          } else {
            it->second = agg.fn == AggregateFn::Min ? std::min(it->second, v) : std::max(it->second, v);
          }
        }
        continue;
      }
      // COUNT/SUM over distinct bindings of the head variables.
      agg_relations.insert(rel);
      const auto vars = rule.head_variables();
      std::map<Tuple, std::set<Tuple>> per_group;
      std::map<Tuple, Value> sums;
      std::set<Tuple> seen;
      for (const auto& env : envs) {
        Tuple binding;
        for (const auto& v : vars) binding.push_back(env.at(v));
        if (!seen.insert(binding).second) continue;
        const Tuple g = group_of(env);
        sums[g] += agg.fn == AggregateFn::Count ? 1 : agg_value(env);
      }
      for (const auto& [g, v] : sums) {
        Tuple t = g;
        t.insert(t.begin() + static_cast<long>(agg.position), v);
        agg_out[rel].insert(std::move(t));
      }
    }
    for (auto& [rel, rows] : set_out) {
      for (const auto& t : rows) changed = sets_[rel].insert(t).second || changed;
    }
    for (auto& [rel, groups] : lattice_out) {
      const AggregateFn fn = lattice_fn_.at(rel);
      auto& cur = lattice_[rel];
      for (const auto& [g, v] : groups) {
        auto it = cur.find(g);
        if (it == cur.end()) {
          cur.emplace(g, v);
          changed = true;
        } else if ((fn == AggregateFn::Min && v < it->second) || (fn == AggregateFn::Max && v > it->second)) {
          it->second = v;
          changed = true;
        }
      }
    }
    for (const auto& rel : agg_relations) {
      auto& rows = agg_out[rel];
      if (sets_[rel] != rows) {
        sets_[rel] = rows;
        changed = true;
      }
    }
    return changed;
  }
};

std::set<Value> nodes_of(const GraphInstance& g) {
  std::set<Value> out;
  for (const auto& [a, b] : g.edges) {
    out.insert(a);
    out.insert(b);
  }
  return out;
}

}  // namespace

Relations naive_evaluate(const Program& program, const Relations& inputs) {
  return NaiveEvaluator(program, inputs).run();
}

std::set<Tuple> reference_algorithm(ReferenceKind kind, const GraphInstance& graph) {
  const std::set<Value> node_set = nodes_of(graph);
  std::vector<Value> nodes(node_set.begin(), node_set.end());
  std::map<Value, std::size_t> id;
  for (std::size_t i = 0; i < nodes.size(); ++i) id[nodes[i]] = i;
  const std::size_t n = nodes.size();
  std::vector<std::vector<std::size_t>> out_adj(n), in_adj(n);
  for (const auto& [a, b] : graph.edges) {
    out_adj[id[a]].push_back(id[b]);
    in_adj[id[b]].push_back(id[a]);
  }
  std::set<Tuple> result;

  switch (kind) {
    case ReferenceKind::TC: {
      std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
      for (const auto& [a, b] : graph.edges) r[id[a]][id[b]] = true;
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          if (!r[i][k]) continue;
          for (std::size_t j = 0; j < n; ++j) {
            if (r[k][j]) r[i][j] = true;
          }
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (r[i][j]) result.insert({nodes[i], nodes[j]});
        }
      }
      break;
    }
    case ReferenceKind::ReachEven: {
      // BFS backwards over two-edge steps.
      std::set<Value> reached(graph.sources.begin(), graph.sources.end());
      std::queue<Value> queue;
      for (Value s : reached) queue.push(s);
      while (!queue.empty()) {
        const Value z = queue.front();
        queue.pop();
        if (!id.count(z)) continue;
        for (std::size_t y : in_adj[id[z]]) {
          for (std::size_t x : in_adj[y]) {
            if (reached.insert(nodes[x]).second) queue.push(nodes[x]);
          }
        }
      }
      for (Value v : reached) result.insert({v});
      break;
    }
    case ReferenceKind::CcMin: {
      std::vector<std::size_t> parent(n);
      std::iota(parent.begin(), parent.end(), 0);
      std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
      };
      for (const auto& [a, b] : graph.edges) {
        const std::size_t ra = find(id[a]), rb = find(id[b]);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
      // Nodes are sorted, so the representative index is the minimum id.
      for (std::size_t i = 0; i < n; ++i) result.insert({nodes[i], nodes[find(i)]});
      break;
    }
    case ReferenceKind::Sssp: {
      const Value inf = std::numeric_limits<Value>::max();
      std::vector<Value> dist(n, inf);
      std::vector<std::vector<std::pair<std::size_t, Value>>> adj(n);
      for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const Value w = e < graph.weights.size() ? graph.weights[e] : 1;
        if (w < 0) throw Error(ErrorKind::NegativeWeight, "negative edge weight " + std::to_string(w));
        adj[id[graph.edges[e].first]].emplace_back(id[graph.edges[e].second], w);
      }
      using Item = std::pair<Value, std::size_t>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      std::set<Value> isolated_sources;
      for (Value s : graph.sources) {
        if (!id.count(s)) {
          isolated_sources.insert(s);
          continue;
        }
        dist[id[s]] = 0;
        pq.emplace(0, id[s]);
      }
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d != dist[u]) continue;
        for (auto [v, w] : adj[u]) {
          if (d + w < dist[v]) {
            dist[v] = d + w;
            pq.emplace(dist[v], v);
          }
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (dist[i] != inf) result.insert({nodes[i], dist[i]});
      }
      for (Value s : isolated_sources) result.insert({s, 0});
      break;
    }
    case ReferenceKind::Bipartite: {
      // Walk (node, parity) states from the start nodes along edge direction.
      std::set<std::pair<Value, int>> seen;
      std::queue<std::pair<Value, int>> queue;
      for (Value s : graph.sources) {
        if (seen.insert({s, 0}).second) queue.push({s, 0});
      }
      while (!queue.empty()) {
        auto [v, p] = queue.front();
        queue.pop();
        if (!id.count(v)) continue;
        for (std::size_t m : out_adj[id[v]]) {
          std::pair<Value, int> next{nodes[m], 1 - p};
          if (seen.insert(next).second) queue.push(next);
        }
      }
      for (const auto& [v, p] : seen) {
        if (p == 0 && seen.count({v, 1})) {
          result.insert(Tuple{});
          break;
        }
      }
      break;
    }
  }
  return result;
}

GraphInstance generate_graph(const RandomGraphSpec& spec) {
  GraphInstance g;
  std::mt19937_64 rng(spec.seed);
  const auto n = static_cast<Value>(spec.nodes);
  auto add = [&](Value a, Value b) {
    const Value w = spec.weighted ? static_cast<Value>(rng() % static_cast<std::uint64_t>(spec.max_weight)) + 1 : 0;
    g.edges.emplace_back(a, b);
    if (spec.weighted) g.weights.push_back(w);
    if (spec.undirected && a != b) {
      g.edges.emplace_back(b, a);
      if (spec.weighted) g.weights.push_back(w);
    }
  };
  auto allowed = [&](Value a, Value b) {
    if (a == b) return spec.self_loops;
    return !spec.undirected || a < b;
  };
  if (spec.edge_count) {
    std::set<std::pair<Value, Value>> chosen;
    std::size_t possible = 0;
    for (Value a = 0; a < n; ++a) {
      for (Value b = 0; b < n; ++b) possible += allowed(a, b) ? 1 : 0;
    }
    const std::size_t target = std::min(*spec.edge_count, possible);
    while (chosen.size() < target) {
      const Value a = static_cast<Value>(rng() % spec.nodes);
      const Value b = static_cast<Value>(rng() % spec.nodes);
      if (!allowed(a, b) || !chosen.insert({a, b}).second) continue;
    }
    for (const auto& [a, b] : chosen) add(a, b);
    return g;
  }
  for (Value a = 0; a < n; ++a) {
    for (Value b = 0; b < n; ++b) {
      if (!allowed(a, b)) continue;
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (u < spec.probability) add(a, b);
    }
  }
  return g;
}

}  // namespace flowlog
