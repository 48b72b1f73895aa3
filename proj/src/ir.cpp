#include "flowlog/ir.hpp"

#include <algorithm>
#include <sstream>

#include "flowlog/error.hpp"

namespace flowlog {

namespace {

bool synthetic(const std::string& name) { return !name.empty() && name[0] == '$'; }

bool has(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

std::vector<std::string> real_columns(const IRNode& n) {
  std::vector<std::string> out;
  for (const auto& c : n.out.columns()) {
    if (!synthetic(c)) out.push_back(c);
  }
  return out;
}

Operand operand_for(const Term& t, const Schema& layout) {
  if (t.is_constant()) return Operand::lit(t.value);
  auto idx = layout.index_of(t.name);
  if (!idx) throw Error(ErrorKind::InvalidArgument, "variable '" + t.name + "' is not in the operator layout");
  return Operand::col(*idx);
}

IRNode scan_of(const Atom& atom, std::size_t body_index, const Program& program) {
  IRNode scan;
  scan.kind = IRKind::Scan;
  scan.relation = atom.relation;
  scan.role = program.is_idb(atom.relation) ? ScanRole::IdbFull : ScanRole::Edb;
  scan.atom_index = static_cast<long>(body_index);
  std::vector<Predicate> preds;
  for (std::size_t i = 0; i < atom.terms.size(); ++i) {
    const Term& t = atom.terms[i];
    const std::string synth = "$a" + std::to_string(body_index) + "." + std::to_string(i);
    if (t.is_variable() && !has(scan.out.value, t.name)) {
      scan.out.value.push_back(t.name);
      continue;
    }
    scan.out.value.push_back(synth);
    if (t.is_constant()) {
      preds.push_back({Operand::col(i), CompareOp::Eq, Operand::lit(t.value)});
    } else if (t.is_variable()) {
      const auto first = std::find(scan.out.value.begin(), scan.out.value.end(), t.name) - scan.out.value.begin();
      preds.push_back({Operand::col(i), CompareOp::Eq, Operand::col(static_cast<std::size_t>(first))});
    }
  }
  if (preds.empty()) return scan;
  IRNode filter;
  filter.kind = IRKind::FlatMap;
  filter.filters = std::move(preds);
  filter.out = scan.out;
  filter.children.push_back(std::move(scan));
  return filter;
}

// Re-keys `child` on `keys`, keeping the variables of `keep` in the child's
// column order. Returns the child itself when nothing changes.
IRNode rekey(IRNode child, const std::vector<std::string>& keys, const std::vector<std::string>& keep) {
  std::vector<std::string> values;
  for (const auto& c : child.out.columns()) {
    if (has(keep, c) && !has(keys, c)) values.push_back(c);
  }
  if (child.out.key == keys && child.out.value == values) return child;
  IRNode map;
  map.kind = IRKind::FlatMap;
  std::vector<Operand> proj;
  for (const auto& k : keys) {
    auto idx = child.out.index_of(k);
    if (!idx) throw Error(ErrorKind::InvalidArgument, "join key '" + k + "' missing from operator layout");
    proj.push_back(Operand::col(*idx));
  }
  for (const auto& v : values) proj.push_back(Operand::col(*child.out.index_of(v)));
  map.projection = std::move(proj);
  map.out.key = keys;
  map.out.value = std::move(values);
  map.children.push_back(std::move(child));
  return map;
}

IRNode join_of(IRNode left, IRNode right, const std::vector<std::string>& keys) {
  IRNode j;
  j.kind = IRKind::Join;
  j.key_arity = keys.size();
  j.out.key = keys;
  j.out.value = left.out.value;
  for (const auto& v : right.out.value) j.out.value.push_back(v);
  j.children.push_back(std::move(left));
  j.children.push_back(std::move(right));
  return j;
}

Operand remap(const Operand& o, const std::optional<std::vector<Operand>>& inner) {
  if (!inner || !o.is_column()) return o;
  return (*inner)[o.column];
}

std::optional<std::vector<Operand>> compose(const std::optional<std::vector<Operand>>& outer,
                                            const std::optional<std::vector<Operand>>& inner) {
  if (!outer) return inner;
  if (!inner) return outer;
  std::vector<Operand> out;
  for (const auto& o : *outer) out.push_back(remap(o, inner));
  return out;
}

std::string operand_code(const Operand& o) {
  return o.is_column() ? "c" + std::to_string(o.column) : "#" + std::to_string(o.value);
}

std::string preds_code(const std::vector<Predicate>& ps) {
  std::string s;
  for (const auto& p : ps) {
    s += operand_code(p.left) + compare_op_text(p.op) + operand_code(p.right) + ";";
  }
  return s;
}

std::string proj_code(const std::optional<std::vector<Operand>>& p) {
  if (!p) return "*";
  std::string s;
  for (const auto& o : *p) s += operand_code(o) + ",";
  return s;
}

std::string schema_text(const Schema& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.key.size(); ++i) out += (i ? ", " : "") + s.key[i];
  out += " |";
  for (std::size_t i = 0; i < s.value.size(); ++i) out += (i ? ", " : " ") + s.value[i];
  return out + ")";
}

}  // namespace

std::vector<std::string> Schema::columns() const {
  std::vector<std::string> out = key;
  out.insert(out.end(), value.begin(), value.end());
  return out;
}

std::optional<std::size_t> Schema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key[i] == name) return i;
  }
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (value[i] == name) return key.size() + i;
  }
  return std::nullopt;
}

const char* ir_kind_name(IRKind kind) {
  switch (kind) {
    case IRKind::Scan: return "Scan";
    case IRKind::FlatMap: return "FlatMap";
    case IRKind::Join: return "Join";
    case IRKind::JoinFlatMap: return "JoinFlatMap";
    case IRKind::Antijoin: return "Antijoin";
    case IRKind::SharedRef: return "SharedRef";
  }
  return "?";
}

const char* scan_role_name(ScanRole role) {
  switch (role) {
    case ScanRole::Edb: return "edb";
    case ScanRole::IdbFull: return "full";
    case ScanRole::IdbDelta: return "delta";
  }
  return "?";
}

std::size_t IRNode::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.node_count();
  return n;
}

TranslatedRule translate_jst_to_ir(const RootedJST& jst, const JoinGraph& graph, const RuleCatalog& catalog,
                                   const Program& program) {
  const Rule& rule = catalog.rule;
  const JoinSchedule sched = schedule_joins(jst, graph, catalog);
  std::vector<bool> filter_done(catalog.filters.size(), false);
  std::vector<bool> negation_done(catalog.negations.size(), false);

  auto apply_pending = [&](IRNode cur) {
    const auto cols = real_columns(cur);
    auto ready = [&](const std::vector<std::string>& vars) {
      return std::all_of(vars.begin(), vars.end(), [&](const std::string& v) { return has(cols, v); });
    };
    std::vector<Predicate> preds;
    for (std::size_t i = 0; i < catalog.filters.size(); ++i) {
      if (filter_done[i] || !ready(catalog.filters[i].variables)) continue;
      const auto& c = catalog.filters[i].constraint;
      preds.push_back({operand_for(c.left, cur.out), c.op, operand_for(c.right, cur.out)});
      filter_done[i] = true;
    }
    if (!preds.empty()) {
      IRNode f;
      f.kind = IRKind::FlatMap;
      f.filters = std::move(preds);
      f.out = cur.out;
      f.children.push_back(std::move(cur));
      cur = std::move(f);
    }
    for (std::size_t i = 0; i < catalog.negations.size(); ++i) {
      if (negation_done[i] || !ready(catalog.negations[i].variables)) continue;
      negation_done[i] = true;
      const auto& keys = catalog.negations[i].variables;
      const std::size_t b = catalog.negations[i].body_index;
      const auto keep = real_columns(cur);
      IRNode left = rekey(std::move(cur), keys, keep);
      IRNode right = rekey(scan_of(rule.body[b], b, program), keys, keys);
      IRNode anti;
      anti.kind = IRKind::Antijoin;
      anti.key_arity = keys.size();
      anti.out = left.out;
      anti.children.push_back(std::move(left));
      anti.children.push_back(std::move(right));
      cur = std::move(anti);
    }
    return cur;
  };

  std::vector<std::optional<IRNode>> leaves(graph.nodes.size());
  for (std::size_t node = 0; node < graph.nodes.size(); ++node) {
    const std::size_t b = graph.nodes[node].body_index;
    IRNode cur = scan_of(rule.body[b], b, program);
    for (const auto& sj : catalog.semijoins) {
      if (sj.subsumer != b) continue;
      const auto& vars = catalog.vars_of(sj.body_index);
      const auto keep = real_columns(cur);
      IRNode left = rekey(std::move(cur), vars, keep);
      IRNode right = rekey(scan_of(rule.body[sj.body_index], sj.body_index, program), vars, vars);
      cur = join_of(std::move(left), std::move(right), vars);
    }
    leaves[node] = apply_pending(std::move(cur));
  }

  std::vector<std::optional<IRNode>> steps(sched.steps.size());
  auto retained = [&](const JoinOperand& op) -> const std::vector<std::string>& {
    return op.is_step ? sched.steps[op.index].retained : sched.leaf_retained[op.index];
  };
  auto take = [&](const JoinOperand& op) {
    auto& slot = op.is_step ? steps[op.index] : leaves[op.index];
    IRNode n = std::move(*slot);
    slot.reset();
    return n;
  };
  for (std::size_t i = 0; i < sched.steps.size(); ++i) {
    const auto& s = sched.steps[i];
    IRNode l = rekey(take(s.left), s.keys, retained(s.left));
    IRNode r = rekey(take(s.right), s.keys, retained(s.right));
    steps[i] = apply_pending(join_of(std::move(l), std::move(r), s.keys));
  }

  TranslatedRule out;
  out.root = rekey(take(sched.result), {}, catalog.output_variables);

  HeadBinding& head = out.head;
  head.relation = rule.head.relation;
  for (std::size_t i = 0; i < rule.head.terms.size(); ++i) {
    if (rule.aggregate && rule.aggregate->position == i) {
      head.columns.push_back(Operand::lit(0));
    } else {
      head.columns.push_back(operand_for(rule.head.terms[i], out.root.out));
    }
  }
  if (rule.aggregate) {
    head.aggregate = rule.aggregate->fn;
    head.aggregate_position = rule.aggregate->position;
    for (const auto& t : rule.aggregate->over) head.aggregate_terms.push_back(operand_for(t, out.root.out));
    for (std::size_t i = 0; i < out.root.out.arity(); ++i) head.binding_columns.push_back(i);
  }
  return out;
}

IRNode fuse(const IRNode& ir) {
  IRNode n = ir;
  for (auto& c : n.children) c = fuse(c);
  if (n.kind != IRKind::FlatMap) return n;
  const IRNode& child = n.children.front();
  if (child.kind != IRKind::FlatMap && child.kind != IRKind::Join && child.kind != IRKind::JoinFlatMap) return n;
  IRNode merged = child;
  if (merged.kind == IRKind::Join) merged.kind = IRKind::JoinFlatMap;
  for (const auto& p : n.filters) {
    merged.filters.push_back({remap(p.left, child.projection), p.op, remap(p.right, child.projection)});
  }
  merged.projection = compose(n.projection, child.projection);
  merged.out = n.out;
  return merged;
}

std::string canonicalize(const IRNode& ir) {
  std::string s = ir_kind_name(ir.kind);
  switch (ir.kind) {
    case IRKind::Scan:
      s += "[" + std::to_string(ir.relation.size()) + ":" + ir.relation + "," + scan_role_name(ir.role) + "," +
           std::to_string(ir.out.arity()) + "]";
      break;
    case IRKind::SharedRef:
      s += "[" + std::to_string(ir.shared_id) + "]";
      break;
    default:
      s += "[k" + std::to_string(ir.key_arity) + ";o" + std::to_string(ir.out.key.size()) + ";f" +
           preds_code(ir.filters) + ";p" + proj_code(ir.projection) + "]";
      break;
  }
  s += "(";
  for (std::size_t i = 0; i < ir.children.size(); ++i) s += (i ? "," : "") + canonicalize(ir.children[i]);
  return s + ")";
}

IRNode with_delta_scan(const IRNode& ir, std::size_t atom_index) {
  IRNode n = ir;
  if (n.kind == IRKind::Scan && n.atom_index == static_cast<long>(atom_index)) n.role = ScanRole::IdbDelta;
  for (auto& c : n.children) c = with_delta_scan(c, atom_index);
  return n;
}

std::string describe_ir(const IRNode& ir, int indent) {
  std::ostringstream os;
  os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << ir_kind_name(ir.kind);
  if (ir.kind == IRKind::Scan) os << " " << ir.relation << " [" << scan_role_name(ir.role) << "]";
  if (ir.kind == IRKind::SharedRef) os << " -> #" << ir.shared_id;
  if (ir.kind == IRKind::Join || ir.kind == IRKind::JoinFlatMap || ir.kind == IRKind::Antijoin) {
    os << " keys=" << ir.key_arity;
  }
  if (!ir.filters.empty()) os << " filter=" << preds_code(ir.filters);
  if (ir.projection) os << " map=" << proj_code(ir.projection);
  os << " " << schema_text(ir.out) << "\n";
  for (const auto& c : ir.children) os << describe_ir(c, indent + 1);
  return os.str();
}

}  // namespace flowlog
