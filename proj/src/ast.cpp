#include "flowlog/ast.hpp"

#include <algorithm>
#include <sstream>

#include "flowlog/error.hpp"

namespace flowlog {

namespace {

void add_unique(std::vector<std::string>& out, const std::string& name) {
  if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
}

void add_term(std::vector<std::string>& out, const Term& t) {
  if (t.is_variable()) add_unique(out, t.name);
}

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Value Dictionary::encode(const std::string& text) {
  auto [it, inserted] = codes_.emplace(text, static_cast<Value>(strings_.size()));
  if (inserted) strings_.push_back(text);
  return it->second;
}

std::optional<Value> Dictionary::lookup(const std::string& text) const {
  auto it = codes_.find(text);
  if (it == codes_.end()) return std::nullopt;
  return it->second;
}

const std::string* Dictionary::decode(Value code) const {
  if (code < 0 || static_cast<std::size_t>(code) >= strings_.size()) return nullptr;
  return &strings_[static_cast<std::size_t>(code)];
}

std::vector<std::string> Atom::variables() const {
  std::vector<std::string> out;
  for (const auto& t : terms) add_term(out, t);
  return out;
}

bool evaluate_compare(Value lhs, CompareOp op, Value rhs) {
  switch (op) {
    case CompareOp::Eq: return lhs == rhs;
    case CompareOp::Ne: return lhs != rhs;
    case CompareOp::Lt: return lhs < rhs;
    case CompareOp::Le: return lhs <= rhs;
    case CompareOp::Gt: return lhs > rhs;
    case CompareOp::Ge: return lhs >= rhs;
  }
  return false;
}

const char* compare_op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

std::vector<std::string> Constraint::variables() const {
  std::vector<std::string> out;
  add_term(out, left);
  add_term(out, right);
  return out;
}

const char* aggregate_fn_text(AggregateFn fn) {
  switch (fn) {
    case AggregateFn::Min: return "MIN";
    case AggregateFn::Max: return "MAX";
    case AggregateFn::Count: return "COUNT";
    case AggregateFn::Sum: return "SUM";
  }
  return "?";
}

std::vector<std::string> AggregateSpec::variables() const {
  std::vector<std::string> out;
  for (const auto& t : over) add_term(out, t);
  return out;
}

std::vector<std::string> Rule::head_variables() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < head.terms.size(); ++i) {
    if (aggregate && aggregate->position == i) {
      for (const auto& v : aggregate->variables()) add_unique(out, v);
    } else {
      add_term(out, head.terms[i]);
    }
  }
  return out;
}

std::vector<std::string> Rule::positive_variables() const {
  std::vector<std::string> out;
  for (const auto& atom : body) {
    if (atom.negated) continue;
    for (const auto& t : atom.terms) add_term(out, t);
  }
  return out;
}

std::vector<std::string> Rule::variable_order() const {
  std::vector<std::string> out = positive_variables();
  for (const auto& atom : body) {
    for (const auto& t : atom.terms) add_term(out, t);
  }
  for (const auto& c : constraints) {
    for (const auto& v : c.variables()) add_unique(out, v);
  }
  for (const auto& v : head_variables()) add_unique(out, v);
  return out;
}

const RelationDecl& Program::relation(const std::string& name) const {
  auto it = relations.find(name);
  if (it == relations.end()) {
    throw Error(ErrorKind::UndeclaredRelation, "relation '" + name + "' is not declared");
  }
  return it->second;
}

bool Program::is_idb(const std::string& name) const {
  auto it = relations.find(name);
  return it != relations.end() && it->second.kind == RelationKind::Idb;
}

const Rule& Program::rule(int id) const {
  for (const auto& r : rules) {
    if (r.id == id) return r;
  }
  throw Error(ErrorKind::InvalidArgument, "no rule with id " + std::to_string(id));
}

int Program::next_rule_id() const {
  int next = 1;
  for (const auto& r : rules) next = std::max(next, r.id + 1);
  return next;
}

std::vector<std::string> Program::output_relations() const {
  std::vector<std::string> out;
  for (const auto& name : declaration_order) {
    const auto& decl = relations.at(name);
    if (outputs.empty() ? decl.kind == RelationKind::Idb : outputs.count(name) > 0) {
      out.push_back(name);
    }
  }
  return out;
}

bool same_program(const Program& a, const Program& b) {
  return a.relations == b.relations && a.declaration_order == b.declaration_order &&
         a.rules == b.rules && a.outputs == b.outputs;
}

std::string to_string(const Term& term, const Dictionary* symbols) {
  switch (term.kind) {
    case Term::Kind::Variable: return term.name;
    case Term::Kind::Placeholder: return "_";
    case Term::Kind::Constant:
      if (term.symbol && symbols != nullptr) {
        if (const auto* text = symbols->decode(term.value)) return quote(*text);
      }
      return std::to_string(term.value);
  }
  return "?";
}

std::string to_string(const Atom& atom, const Dictionary* symbols) {
  std::string out = atom.negated ? "!" : "";
  out += atom.relation + "(";
  for (std::size_t i = 0; i < atom.terms.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(atom.terms[i], symbols);
  }
  return out + ")";
}

std::string to_string(const Constraint& constraint, const Dictionary* symbols) {
  return to_string(constraint.left, symbols) + " " + compare_op_text(constraint.op) + " " +
         to_string(constraint.right, symbols);
}

std::string to_string(const Rule& rule, const Dictionary* symbols) {
  std::string out = rule.head.relation + "(";
  for (std::size_t i = 0; i < rule.head.terms.size(); ++i) {
    if (i > 0) out += ", ";
    if (rule.aggregate && rule.aggregate->position == i) {
      out += aggregate_fn_text(rule.aggregate->fn);
      out += "(";
      for (std::size_t k = 0; k < rule.aggregate->over.size(); ++k) {
        if (k > 0) out += " + ";
        out += to_string(rule.aggregate->over[k], symbols);
      }
      out += ")";
    } else {
      out += to_string(rule.head.terms[i], symbols);
    }
  }
  out += ") :- ";
  bool first = true;
  for (const auto& atom : rule.body) {
    if (!first) out += ", ";
    first = false;
    out += to_string(atom, symbols);
  }
  for (const auto& c : rule.constraints) {
    if (!first) out += ", ";
    first = false;
    out += to_string(c, symbols);
  }
  return out + ".";
}

std::string unparse(const Program& program) {
  std::ostringstream out;
  for (const auto& name : program.declaration_order) {
    const auto& decl = program.relations.at(name);
    out << ".decl " << name << "(";
    for (std::size_t i = 0; i < decl.columns.size(); ++i) {
      if (i > 0) out << ", ";
      out << decl.columns[i] << ":"
          << (decl.types[i] == ColumnType::Symbol ? "symbol" : "number");
    }
    out << ")\n";
    if (decl.input) out << ".input " << name << "\n";
    if (program.outputs.count(name)) out << ".output " << name << "\n";
  }
  for (const auto& rule : program.rules) out << to_string(rule, &program.symbols) << "\n";
  return out.str();
}

}  // namespace flowlog
