#include "flowlog/engine.hpp"

#include <algorithm>

#include "flowlog/error.hpp"

namespace flowlog {

namespace {

struct RelState {
  std::size_t arity = 0;
  bool lattice = false;
  Monoid lattice_monoid = Monoid::min();
  std::shared_ptr<const Collection> full;
  std::shared_ptr<const Collection> delta;
  std::uint64_t full_version = 0;
  std::uint64_t delta_version = 0;
  // Rows added to `full` by its latest update, which moved the version from
  // `batch_base` to `full_version`.
  std::shared_ptr<const Collection> batch;
  std::uint64_t batch_base = 0;
};

struct Dep {
  std::string relation;
  bool delta = false;
};

struct CacheEntry {
  std::shared_ptr<const Collection> data;
  std::vector<std::uint64_t> versions;
  std::map<std::size_t, Arrangement> arrangements;
  bool incremental = false;
};

RowTransform transform_of(const IRNode& op) { return {op.filters, op.projection}; }

}  // namespace

struct Engine::Impl {
  Program program;
  Stratification strata;
  PlanDAG dag;
  EngineOptions options;
  EvalStats& stats;
  Monoid diffs;
  std::map<std::string, RelState> rels;
  std::vector<std::vector<Dep>> deps;
  std::vector<std::optional<std::string>> linear_source;
  std::vector<std::optional<CacheEntry>> cache;
  std::map<int, std::vector<std::size_t>> roots_of_rule;
  std::uint64_t clock = 0;

  Impl(const Program& p, const Stratification& s, const PlanDAG& d, EngineOptions o, EvalStats& st)
      : program(p), strata(s), dag(d), options(o), stats(st),
        diffs(o.count_diffs ? Monoid::count() : Monoid::presence()) {
    if (options.workers == 0) throw Error(ErrorKind::InvalidArgument, "workers must be at least 1");
    for (const auto& [name, decl] : program.relations) {
      RelState st_rel;
      st_rel.arity = decl.arity();
      for (const auto& rule : program.rules) {
        if (rule.head.relation == name && rule.aggregate && flowlog::is_lattice(rule.aggregate->fn)) {
          st_rel.lattice = true;
          st_rel.lattice_monoid = Monoid::for_aggregate(rule.aggregate->fn);
        }
      }
      const std::size_t stored_arity = st_rel.lattice ? st_rel.arity - 1 : st_rel.arity;
      const Monoid m = st_rel.lattice ? st_rel.lattice_monoid : diffs;
      st_rel.full = std::make_shared<const Collection>(stored_arity, m);
      st_rel.delta = st_rel.full;
      st_rel.full_version = ++clock;
      st_rel.delta_version = ++clock;
      rels.emplace(name, std::move(st_rel));
    }

    const std::size_t n = dag.nodes.size();
    deps.resize(n);
    linear_source.resize(n);
    cache.resize(n);
    stats.nodes.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
      const IRNode& op = dag.nodes[i].op;
      std::vector<Dep> d;
      if (op.kind == IRKind::Scan) {
        d.push_back({op.relation, op.role == ScanRole::IdbDelta});
        if (op.role == ScanRole::IdbFull && !relation(op.relation).lattice) linear_source[i] = op.relation;
      } else if (op.kind == IRKind::FlatMap && linear_source[dag.nodes[i].inputs[0]]) {
        linear_source[i] = linear_source[dag.nodes[i].inputs[0]];
      }
      for (std::size_t in : dag.nodes[i].inputs) {
        for (const auto& x : deps[in]) {
          const bool seen = std::any_of(d.begin(), d.end(), [&](const Dep& y) {
            return y.relation == x.relation && y.delta == x.delta;
          });
          if (!seen) d.push_back(x);
        }
      }
      deps[i] = std::move(d);
    }
    for (std::size_t r = 0; r < dag.roots.size(); ++r) roots_of_rule[dag.roots[r].rule_id].push_back(r);
  }

  RelState& relation(const std::string& name) {
    auto it = rels.find(name);
    if (it == rels.end()) throw Error(ErrorKind::UndeclaredRelation, "relation '" + name + "' is not declared");
    return it->second;
  }

  std::vector<std::uint64_t> versions_of(std::size_t node) {
    std::vector<std::uint64_t> v;
    for (const auto& d : deps[node]) {
      const RelState& st = relation(d.relation);
      v.push_back(d.delta ? st.delta_version : st.full_version);
    }
    return v;
  }

  // Scan output: set relations as stored, lattice relations flattened to
  // group ++ value rows.
  std::shared_ptr<const Collection> scan(const RelState& st, bool delta) {
    const auto& src = delta ? st.delta : st.full;
    if (!st.lattice) return src;
    Collection out(st.arity, diffs);
    out.reserve(src->size());
    Tuple row(st.arity);
    for (std::size_t i = 0; i < src->size(); ++i) {
      auto g = src->row(i);
      std::copy(g.begin(), g.end(), row.begin());
      row.back() = src->diff(i);
      out.push(std::span<const Value>(row), diffs.one());
    }
    out.consolidate();
    return std::make_shared<const Collection>(std::move(out));
  }

  Collection eval_linear(std::size_t node, const Collection& batch) {
    const IRNode& op = dag.nodes[node].op;
    if (op.kind == IRKind::Scan) return batch;
    return flat_map_op(eval_linear(dag.nodes[node].inputs[0], batch), transform_of(op));
  }

  std::shared_ptr<const Collection> compute(std::size_t node) {
    const DagNode& dn = dag.nodes[node];
    const IRNode& op = dn.op;
    switch (op.kind) {
      case IRKind::Scan:
        return scan(relation(op.relation), op.role == ScanRole::IdbDelta);
      case IRKind::FlatMap:
        return std::make_shared<const Collection>(flat_map_op(*eval(dn.inputs[0]), transform_of(op)));
      case IRKind::Join:
      case IRKind::JoinFlatMap: {
        const Arrangement& l = arrangement(dn.inputs[0], op.key_arity);
        const Arrangement& r = arrangement(dn.inputs[1], op.key_arity);
        std::size_t emitted = 0;
        Collection out = join_core(l, r, transform_of(op), options.workers, &emitted);
        stats.join_output_tuples += emitted;
        return std::make_shared<const Collection>(std::move(out));
      }
      case IRKind::Antijoin: {
        const auto left = eval(dn.inputs[0]);
        const Arrangement& r = arrangement(dn.inputs[1], op.key_arity);
        return std::make_shared<const Collection>(antijoin_op(*left, r));
      }
      case IRKind::SharedRef:
        return eval(op.shared_id);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown operator");
  }

  std::shared_ptr<const Collection> eval(std::size_t node) {
    auto current = versions_of(node);
    auto& slot = cache[node];
    NodeStats& ns = stats.nodes[node];
    if (slot && slot->versions == current) return slot->data;

    if (slot && linear_source[node]) {
      const RelState& st = relation(*linear_source[node]);
      if (st.batch && slot->versions.size() == 1 && slot->versions[0] == st.batch_base) {
        Collection inc = eval_linear(node, *st.batch);
        Collection merged = *slot->data;
        merged.append(inc);
        merged.consolidate();
        slot->data = std::make_shared<const Collection>(std::move(merged));
        slot->versions = std::move(current);
        slot->arrangements.clear();
        slot->incremental = true;
        ++ns.incremental_updates;
        ns.output_tuples += inc.size();
        ns.peak_size = std::max(ns.peak_size, slot->data->size());
        return slot->data;
      }
    }

    auto data = compute(node);
    ++ns.evaluations;
    ns.output_tuples += data->size();
    ns.peak_size = std::max(ns.peak_size, data->size());
    CacheEntry entry;
    entry.data = data;
    entry.versions = versions_of(node);
    slot = std::move(entry);
    return data;
  }

  const Arrangement& arrangement(std::size_t node, std::size_t key_arity) {
    eval(node);
    auto& entry = *cache[node];
    auto it = entry.arrangements.find(key_arity);
    if (it != entry.arrangements.end()) return it->second;
    if (!entry.incremental) ++stats.nodes[node].arrangement_builds;
    return entry.arrangements.emplace(key_arity, Arrangement(entry.data, key_arity)).first->second;
  }

  // Head facts of one plan root: set relations in the diff monoid, lattice
  // relations as group -> value.
  Collection head_rows(const PlanRoot& root) {
    const auto data = eval(root.node);
    const HeadBinding& h = root.head;
    const RelState& st = relation(h.relation);
    const std::size_t arity = h.columns.size();
    if (!h.aggregate) {
      Collection out(arity, diffs);
      Tuple row(arity);
      for (std::size_t i = 0; i < data->size(); ++i) {
        const Value* in = data->row_ptr(i);
        for (std::size_t c = 0; c < arity; ++c) row[c] = h.columns[c].eval(in);
        out.push(std::span<const Value>(row), data->diff(i));
      }
      out.consolidate();
      return options.count_diffs ? distinct_op(out) : out;
    }
    const std::size_t pos = h.aggregate_position;
    auto value_of = [&](const Value* in) {
      Value v = 0;
      for (const auto& t : h.aggregate_terms) v += t.eval(in);
      return v;
    };
    auto group_of = [&](const Value* in) {
      Tuple g;
      for (std::size_t c = 0; c < arity; ++c) {
        if (c != pos) g.push_back(h.columns[c].eval(in));
      }
      return g;
    };
    if (flowlog::is_lattice(*h.aggregate)) {
      Collection out(arity - 1, st.lattice_monoid);
      for (std::size_t i = 0; i < data->size(); ++i) {
        if (data->diff(i) <= 0) continue;
        const Value* in = data->row_ptr(i);
        out.push(std::span<const Value>(group_of(in)), value_of(in));
      }
      return reduce_lattice(out);
    }
    std::map<Tuple, Value> groups;
    for (std::size_t i = 0; i < data->size(); ++i) {
      if (data->diff(i) <= 0) continue;
      const Value* in = data->row_ptr(i);
      Value& acc = groups[group_of(in)];
      acc += *h.aggregate == AggregateFn::Count ? 1 : value_of(in);
    }
    Collection out(arity, diffs);
    for (const auto& [g, v] : groups) {
      Tuple row = g;
      row.insert(row.begin() + static_cast<long>(pos), v);
      out.push(std::span<const Value>(row), diffs.one());
    }
    out.consolidate();
    return out;
  }

  // Merges candidates into `full`; returns the strictly new part (set
  // relations) or the strictly improved groups (lattice relations).
  Collection merge(RelState& st, const Collection& cand) {
    Collection fresh(cand.arity(), cand.monoid());
    for (std::size_t i = 0; i < cand.size(); ++i) {
      auto existing = st.full->find(cand.row(i));
      if (st.lattice) {
        const Diff v = cand.diff(i);
        if (existing && st.lattice_monoid.combine(*existing, v) == *existing) continue;
        fresh.push(cand.row(i), v);
      } else {
        if (existing) continue;
        fresh.push(cand.row(i), diffs.one());
      }
    }
    fresh.consolidate();
    if (fresh.empty()) return fresh;
    Collection next = *st.full;
    next.append(fresh);
    next.consolidate();
    st.batch_base = st.full_version;
    st.full = std::make_shared<const Collection>(std::move(next));
    st.full_version = ++clock;
    st.batch = st.lattice ? nullptr : std::make_shared<const Collection>(fresh);
    return fresh;
  }

  std::vector<std::size_t> roots_for(int rule_id, bool recursive) {
    std::vector<std::size_t> out;
    for (std::size_t r : roots_of_rule[rule_id]) {
      const bool delta = dag.roots[r].variant.rfind("delta@", 0) == 0;
      if (delta == recursive) out.push_back(r);
    }
    return out;
  }

  void evaluate_stratum(std::size_t index) {
    const Stratum& s = strata.strata[index];
    std::size_t iterations = 0;
    if (!s.recursive) {
      for (int id : s.rules) {
        for (std::size_t r : roots_for(id, false)) {
          Collection rows = head_rows(dag.roots[r]);
          stats.rule_derived[id] += rows.size();
          merge(relation(dag.roots[r].head.relation), rows);
        }
      }
      stats.stratum_iterations.push_back(s.rules.empty() ? 0 : 1);
      return;
    }

    // Seed with one full evaluation, then iterate on deltas.
    for (int id : s.rules) {
      for (std::size_t r : roots_for(id, false)) {
        Collection rows = head_rows(dag.roots[r]);
        stats.rule_derived[id] += rows.size();
        merge(relation(dag.roots[r].head.relation), rows);
      }
    }
    for (const auto& name : s.relations) {
      RelState& st = relation(name);
      st.delta = st.full;
      st.delta_version = ++clock;
    }
    auto pending = [&] {
      return std::any_of(s.relations.begin(), s.relations.end(),
                         [&](const std::string& n) { return !relation(n).delta->empty(); });
    };
    while (pending()) {
      if (options.max_iterations && iterations >= *options.max_iterations) {
        throw Error(ErrorKind::NonTermination, "stratum " + std::to_string(index) + " did not converge within " +
                                                   std::to_string(*options.max_iterations) + " iterations");
      }
      ++iterations;
      std::map<std::string, Collection> candidates;
      for (const auto& name : s.relations) {
        const RelState& st = relation(name);
        candidates.emplace(name, Collection(st.full->arity(), st.full->monoid()));
      }
      for (int id : s.rules) {
        for (std::size_t r : roots_for(id, true)) {
          Collection rows = head_rows(dag.roots[r]);
          stats.rule_derived[id] += rows.size();
          candidates.at(dag.roots[r].head.relation).append(rows);
        }
      }
      for (auto& [name, cand] : candidates) {
        cand.consolidate();
        if (options.count_diffs && !cand.monoid().is_lattice()) cand = distinct_op(cand);
        RelState& st = relation(name);
        Collection fresh = merge(st, cand);
        st.delta = std::make_shared<const Collection>(std::move(fresh));
        st.delta_version = ++clock;
      }
    }
    stats.stratum_iterations.push_back(iterations);
  }
};

Engine::Engine(const Program& program, const Stratification& strata, const PlanDAG& dag, EngineOptions options)
    : impl_(std::make_unique<Impl>(program, strata, dag, options, stats_)) {}

Engine::~Engine() = default;

Monoid Engine::diff_monoid() const { return impl_->diffs; }

void Engine::load(const std::string& relation, const Collection& rows) {
  RelState& st = impl_->relation(relation);
  if (rows.arity() != st.arity) {
    throw Error(ErrorKind::ArityMismatch, "relation '" + relation + "' has arity " + std::to_string(st.arity) +
                                              ", got rows of arity " + std::to_string(rows.arity()));
  }
  st.full = std::make_shared<const Collection>(lift_diff(rows, impl_->diffs));
  st.full_version = ++impl_->clock;
  st.batch = nullptr;
}

void Engine::run() {
  stats_.stratum_iterations.clear();
  for (std::size_t i = 0; i < impl_->strata.strata.size(); ++i) impl_->evaluate_stratum(i);
}

bool Engine::is_lattice(const std::string& relation) const { return impl_->relation(relation).lattice; }

const Collection& Engine::stored(const std::string& relation) const { return *impl_->relation(relation).full; }

std::set<Tuple> Engine::relation_tuples(const std::string& relation) const {
  const RelState& st = impl_->relation(relation);
  std::set<Tuple> out;
  for (std::size_t i = 0; i < st.full->size(); ++i) {
    Tuple t(st.full->row(i).begin(), st.full->row(i).end());
    if (st.lattice) t.push_back(st.full->diff(i));
    out.insert(std::move(t));
  }
  return out;
}

Facts Engine::facts(const std::vector<std::string>& relations) const {
  Facts out;
  for (const auto& r : relations) out[r] = relation_tuples(r);
  return out;
}

}  // namespace flowlog
