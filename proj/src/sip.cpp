#include "flowlog/sip.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "flowlog/error.hpp"
#include "flowlog/parser.hpp"

namespace flowlog {

namespace {

bool shares(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::any_of(a.begin(), a.end(), [&](const std::string& v) { return std::find(b.begin(), b.end(), v) != b.end(); });
}

// The neighbor atom under its current name, keeping only the variables it
// shares with `target` (constants stay, everything else becomes `_`).
Atom reducer(const Atom& neighbor, const std::string& name, const std::vector<std::string>& target_vars) {
  Atom a;
  a.relation = name;
  for (const auto& t : neighbor.terms) {
    if (t.is_constant()) {
      a.terms.push_back(t);
    } else if (t.is_variable() && std::find(target_vars.begin(), target_vars.end(), t.name) != target_vars.end()) {
      a.terms.push_back(t);
    } else {
      a.terms.push_back(Term::placeholder());
    }
  }
  return a;
}

}  // namespace

std::string sip_relation_name(int rule_id, std::size_t body_index, int pass) {
  return "__sip_" + std::to_string(rule_id) + "_" + std::to_string(body_index) + "_" + std::to_string(pass);
}

std::vector<std::size_t> default_sip_order(const RuleCatalog& catalog, const JoinGraph& graph) {
  const std::size_t n = graph.nodes.size();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> order;
  while (order.size() < n) {
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (seen[i]) continue;
      if (start == n || graph.nodes[i].variables.size() > graph.nodes[start].variables.size()) start = i;
    }
    std::deque<std::size_t> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      order.push_back(graph.nodes[cur].body_index);
      for (std::size_t m : graph.neighbors(cur)) {
        if (seen[m]) continue;
        seen[m] = true;
        queue.push_back(m);
      }
    }
  }
  (void)catalog;
  return order;
}

SipRewrite sip_rewrite(const Program& program, const RuleCatalog& catalog, const std::vector<std::size_t>& visit_order,
                       int first_aux_id) {
  const Rule& rule = catalog.rule;
  if (catalog.join_nodes.size() < 2) {
    throw Error(ErrorKind::NotApplicable,
                "rule " + std::to_string(rule.id) + ": sip needs at least two joined atoms");
  }
  {
    auto a = visit_order;
    auto b = catalog.join_nodes;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      throw Error(ErrorKind::InvalidArgument,
                  "rule " + std::to_string(rule.id) + ": sip visit order must list every joined atom once");
    }
  }

  SipRewrite out;
  out.rule_id = rule.id;
  out.visit_order = visit_order;
  int next_id = first_aux_id;

  std::set<std::string> used(catalog.variable_order.begin(), catalog.variable_order.end());
  int fresh_counter = 0;
  auto fresh = [&]() {
    std::string name;
    do {
      name = "sipv" + std::to_string(fresh_counter++);
    } while (used.count(name));
    used.insert(name);
    return name;
  };

  std::map<std::size_t, std::string> current;  // body index -> relation name
  for (std::size_t b : visit_order) current[b] = rule.body[b].relation;

  auto emit = [&](std::size_t target, int pass, std::vector<Atom> reducers) {
    const Atom& original = rule.body[target];
    const std::string name = sip_relation_name(rule.id, target, pass);
    Rule aux;
    aux.id = next_id++;
    aux.head.relation = name;
    Atom source = original;
    source.relation = current[target];
    for (std::size_t i = 0; i < source.terms.size(); ++i) {
      if (source.terms[i].is_placeholder()) source.terms[i] = Term::variable(fresh());
    }
    aux.head.terms = source.terms;
    if (pass == 1) {
      aux.body = std::move(reducers);
      aux.body.push_back(source);
    } else {
      aux.body.push_back(source);
      for (auto& r : reducers) aux.body.push_back(std::move(r));
    }
    RelationDecl decl = program.relation(original.relation);
    decl.name = name;
    decl.kind = RelationKind::Idb;
    decl.input = false;
    decl.output = false;
    out.aux_relations.push_back(std::move(decl));
    out.aux_rules.push_back(std::move(aux));
    current[target] = name;
  };

  // Pass 1: reduce each atom by its already-visited neighbors.
  for (std::size_t k = 0; k < visit_order.size(); ++k) {
    const std::size_t a = visit_order[k];
    std::vector<Atom> reducers;
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t b = visit_order[j];
      if (!shares(catalog.vars_of(a), catalog.vars_of(b))) continue;
      reducers.push_back(reducer(rule.body[b], current[b], catalog.vars_of(a)));
    }
    if (!reducers.empty()) emit(a, 1, std::move(reducers));
  }

  // Pass 2: reverse order, reduce by later-visited neighbors in the order
  // they were finalized.
  for (std::size_t k = visit_order.size(); k-- > 0;) {
    const std::size_t a = visit_order[k];
    std::vector<Atom> reducers;
    for (std::size_t j = visit_order.size(); j-- > k + 1;) {
      const std::size_t b = visit_order[j];
      if (!shares(catalog.vars_of(a), catalog.vars_of(b))) continue;
      reducers.push_back(reducer(rule.body[b], current[b], catalog.vars_of(a)));
    }
    if (!reducers.empty()) emit(a, 2, std::move(reducers));
  }

  out.reduced_rule = rule;
  for (std::size_t b : visit_order) out.reduced_rule.body[b].relation = current[b];
  return out;
}

namespace {

// A forest has exactly nodes - components edges.
bool is_cyclic(const JoinGraph& graph) {
  const std::size_t n = graph.nodes.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& e : graph.edges) {
    const std::size_t a = find(e.u), b = find(e.v);
    if (a == b) return true;
    parent[a] = b;
  }
  return false;
}

}  // namespace

Program apply_sip(const Program& program, const Stratification& strata, SipMode mode, std::vector<SipRewrite>* rewrites) {
  if (mode == SipMode::Never) return program;
  Program out = program;
  out.rules.clear();
  int next_id = program.next_rule_id();
  for (const auto& rule : program.rules) {
    const RuleCatalog catalog = build_rule_catalog(program, strata, rule.id);
    const JoinGraph graph = build_join_graph(catalog);
    const bool recursive = strata.strata[strata.stratum_of_rule(rule.id)].recursive;
    const bool wanted = graph.nodes.size() >= 2 && (mode == SipMode::Always || (recursive && is_cyclic(graph)));
    if (!wanted) {
      out.rules.push_back(rule);
      continue;
    }
    SipRewrite rw = sip_rewrite(program, catalog, default_sip_order(catalog, graph), next_id);
    next_id += static_cast<int>(rw.aux_rules.size());
    for (const auto& decl : rw.aux_relations) {
      out.relations[decl.name] = decl;
      out.declaration_order.push_back(decl.name);
    }
    for (const auto& aux : rw.aux_rules) out.rules.push_back(aux);
    out.rules.push_back(rw.reduced_rule);
    if (rewrites) rewrites->push_back(std::move(rw));
  }
  validate_program(out);
  return out;
}

}  // namespace flowlog
