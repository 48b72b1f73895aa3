#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "flowlog/analysis.hpp"
#include "flowlog/ast.hpp"
#include "flowlog/optimizer.hpp"
#include "flowlog/row.hpp"

namespace flowlog {

struct Schema {
  std::vector<std::string> key;
  std::vector<std::string> value;

  std::size_t arity() const { return key.size() + value.size(); }
  std::vector<std::string> columns() const;
  std::optional<std::size_t> index_of(const std::string& name) const;

  friend bool operator==(const Schema&, const Schema&) = default;
};

enum class IRKind { Scan, FlatMap, Join, JoinFlatMap, Antijoin, SharedRef };
enum class ScanRole { Edb, IdbFull, IdbDelta };

const char* ir_kind_name(IRKind kind);
const char* scan_role_name(ScanRole role);

// Row layouts:
//   Scan         the relation's columns
//   FlatMap      projection over the child's columns (identity when absent)
//   Join         key ++ left values ++ right values
//   JoinFlatMap  projection over the Join layout
//   Antijoin     the left child's layout; right child is key only
// The first out.key.size() output columns form the arrangement key.
struct IRNode {
  IRKind kind = IRKind::Scan;
  std::string relation;
  ScanRole role = ScanRole::Edb;
  long atom_index = -1;
  std::vector<Predicate> filters;
  std::optional<std::vector<Operand>> projection;
  std::size_t key_arity = 0;  // join / antijoin keys
  std::size_t shared_id = 0;
  Schema out;
  std::vector<IRNode> children;

  std::size_t node_count() const;
};

// How a rule's root rows become head facts.
struct HeadBinding {
  std::string relation;
  std::vector<Operand> columns;  // aggregate slot left as a literal 0
  std::optional<AggregateFn> aggregate;
  std::size_t aggregate_position = 0;
  std::vector<Operand> aggregate_terms;  // summed
  // COUNT/SUM aggregate over distinct bindings of these root columns.
  std::vector<std::size_t> binding_columns;
};

struct TranslatedRule {
  IRNode root;
  HeadBinding head;
};

TranslatedRule translate_jst_to_ir(const RootedJST& jst, const JoinGraph& graph, const RuleCatalog& catalog,
                                   const Program& program);

IRNode fuse(const IRNode& ir);

// Positional, injective encoding: variables never appear, only column
// positions, so subplans equal up to renaming encode identically.
std::string canonicalize(const IRNode& ir);

// Copy with the scan of body atom `atom_index` reading the delta.
IRNode with_delta_scan(const IRNode& ir, std::size_t atom_index);

std::string describe_ir(const IRNode& ir, int indent = 0);

}  // namespace flowlog
