#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace flowlog {

using Value = std::int64_t;

// First-seen string interning. Codes start at 0 and are stable for the
// lifetime of the dictionary.
class Dictionary {
 public:
  Value encode(const std::string& text);
  std::optional<Value> lookup(const std::string& text) const;
  const std::string* decode(Value code) const;
  std::size_t size() const { return strings_.size(); }

 private:
  std::map<std::string, Value> codes_;
  std::vector<std::string> strings_;
};

struct Term {
  enum class Kind { Variable, Constant, Placeholder };

  Kind kind = Kind::Placeholder;
  std::string name;
  Value value = 0;
  // Constant written as a string literal; `value` is its dictionary code.
  bool symbol = false;

  static Term variable(std::string n) { return {Kind::Variable, std::move(n), 0, false}; }
  static Term constant(Value v) { return {Kind::Constant, {}, v, false}; }
  static Term symbol_constant(Value code) { return {Kind::Constant, {}, code, true}; }
  static Term placeholder() { return {}; }

  bool is_variable() const { return kind == Kind::Variable; }
  bool is_constant() const { return kind == Kind::Constant; }
  bool is_placeholder() const { return kind == Kind::Placeholder; }

  friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
  std::string relation;
  std::vector<Term> terms;
  bool negated = false;

  std::size_t arity() const { return terms.size(); }
  // Distinct variable names in first-occurrence order.
  std::vector<std::string> variables() const;

  friend bool operator==(const Atom&, const Atom&) = default;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

bool evaluate_compare(Value lhs, CompareOp op, Value rhs);
const char* compare_op_text(CompareOp op);

struct Constraint {
  Term left;
  CompareOp op = CompareOp::Eq;
  Term right;

  std::vector<std::string> variables() const;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

enum class AggregateFn { Min, Max, Count, Sum };

const char* aggregate_fn_text(AggregateFn fn);
inline bool is_lattice(AggregateFn fn) { return fn == AggregateFn::Min || fn == AggregateFn::Max; }

// Head aggregate. `over` is a sum of terms (a single term in the common
// case); the aggregate always occupies the last head column.
struct AggregateSpec {
  AggregateFn fn = AggregateFn::Min;
  std::vector<Term> over;
  std::size_t position = 0;

  std::vector<std::string> variables() const;

  friend bool operator==(const AggregateSpec&, const AggregateSpec&) = default;
};

struct Rule {
  int id = 0;
  // When `aggregate` is set, head.terms[aggregate->position] is a placeholder
  // slot standing for the aggregate value.
  Atom head;
  std::optional<AggregateSpec> aggregate;
  std::vector<Atom> body;
  std::vector<Constraint> constraints;

  std::vector<std::string> head_variables() const;
  std::vector<std::string> positive_variables() const;
  // Every distinct variable of the rule in first-occurrence order (body
  // first, then head), used as the canonical variable order when planning.
  std::vector<std::string> variable_order() const;

  friend bool operator==(const Rule&, const Rule&) = default;
};

enum class RelationKind { Edb, Idb };
enum class ColumnType { Number, Symbol };

struct RelationDecl {
  std::string name;
  std::vector<std::string> columns;
  std::vector<ColumnType> types;
  RelationKind kind = RelationKind::Edb;
  bool input = false;
  bool output = false;

  std::size_t arity() const { return columns.size(); }

  friend bool operator==(const RelationDecl&, const RelationDecl&) = default;
};

struct Program {
  std::map<std::string, RelationDecl> relations;
  std::vector<std::string> declaration_order;
  std::vector<Rule> rules;
  std::set<std::string> outputs;
  Dictionary symbols;

  const RelationDecl& relation(const std::string& name) const;
  bool is_idb(const std::string& name) const;
  const Rule& rule(int id) const;
  int next_rule_id() const;
  // Relations written by the driver: the `.output` set, or every IDB when no
  // output directive is present.
  std::vector<std::string> output_relations() const;
};

bool same_program(const Program& a, const Program& b);

std::string to_string(const Term& term, const Dictionary* symbols = nullptr);
std::string to_string(const Atom& atom, const Dictionary* symbols = nullptr);
std::string to_string(const Constraint& constraint, const Dictionary* symbols = nullptr);
std::string to_string(const Rule& rule, const Dictionary* symbols = nullptr);
// Renders a program back into the accepted surface syntax.
std::string unparse(const Program& program);

}  // namespace flowlog
