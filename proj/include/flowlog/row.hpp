#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "flowlog/ast.hpp"

namespace flowlog {

// A column of the operator's input row, or a literal.
struct Operand {
  enum class Kind { Column, Constant };
  Kind kind = Kind::Column;
  std::size_t column = 0;
  Value value = 0;

  static Operand col(std::size_t c) { return {Kind::Column, c, 0}; }
  static Operand lit(Value v) { return {Kind::Constant, 0, v}; }
  bool is_column() const { return kind == Kind::Column; }
  Value eval(const Value* row) const { return is_column() ? row[column] : value; }

  friend bool operator==(const Operand&, const Operand&) = default;
};

struct Predicate {
  Operand left;
  CompareOp op = CompareOp::Eq;
  Operand right;

  bool eval(const Value* row) const { return evaluate_compare(left.eval(row), op, right.eval(row)); }

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

// Filters then projects one row. No projection keeps the row as is.
struct RowTransform {
  std::vector<Predicate> filters;
  std::optional<std::vector<Operand>> projection;

  bool passes(const Value* row) const {
    for (const auto& p : filters) {
      if (!p.eval(row)) return false;
    }
    return true;
  }
  std::size_t output_arity(std::size_t input_arity) const { return projection ? projection->size() : input_arity; }
};

}  // namespace flowlog
