#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "flowlog/ast.hpp"
#include "flowlog/row.hpp"

namespace flowlog {

using Diff = std::int64_t;
using Tuple = std::vector<Value>;

enum class MonoidKind { Presence, Count, Min, Max };

const char* monoid_name(MonoidKind kind);

struct Monoid {
  MonoidKind kind = MonoidKind::Presence;

  static Monoid presence() { return {MonoidKind::Presence}; }
  static Monoid count() { return {MonoidKind::Count}; }
  static Monoid min() { return {MonoidKind::Min}; }
  static Monoid max() { return {MonoidKind::Max}; }
  static Monoid for_aggregate(AggregateFn fn) { return fn == AggregateFn::Max ? max() : min(); }

  bool is_lattice() const { return kind == MonoidKind::Min || kind == MonoidKind::Max; }
  Diff zero() const;
  Diff combine(Diff a, Diff b) const;
  // Presence: AND; Count: product. Lattices do not multiply.
  Diff multiply(Diff a, Diff b) const;
  bool is_zero(Diff d) const { return d == zero(); }
  // A presence value (1) or a unit count.
  Diff one() const;

  friend bool operator==(const Monoid&, const Monoid&) = default;
};

// Rows of fixed arity stored back to back, each with a diff. After
// consolidate() rows are sorted lexicographically, unique, and no diff is
// the monoid's zero.
class Collection {
 public:
  Collection() = default;
  Collection(std::size_t arity, Monoid monoid) : arity_(arity), monoid_(monoid) {}

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return diffs_.size(); }
  bool empty() const { return diffs_.empty(); }
  const Monoid& monoid() const { return monoid_; }
  bool consolidated() const { return consolidated_; }

  void push(std::span<const Value> row, Diff diff);
  void push(const Value* row, Diff diff) { push(std::span<const Value>(row, arity_), diff); }
  void append(const Collection& other);
  void reserve(std::size_t rows);
  void consolidate();

  std::span<const Value> row(std::size_t i) const { return {data_.data() + i * arity_, arity_}; }
  const Value* row_ptr(std::size_t i) const { return data_.data() + i * arity_; }
  Diff diff(std::size_t i) const { return diffs_[i]; }
  void set_diff(std::size_t i, Diff d) { diffs_[i] = d; }

  // Requires a consolidated collection.
  std::optional<Diff> find(std::span<const Value> row) const;
  bool contains(std::span<const Value> row) const { return find(row).has_value(); }

  std::vector<Tuple> tuples() const;
  std::vector<std::pair<Tuple, Diff>> entries() const;

 private:
  std::size_t arity_ = 0;
  Monoid monoid_;
  std::vector<Value> data_;
  std::vector<Diff> diffs_;
  bool consolidated_ = true;
};

// Key-prefix index over a consolidated collection. Rows sharing the first
// `key_arity` columns are contiguous, so a group is a row range.
class Arrangement {
 public:
  Arrangement() = default;
  Arrangement(std::shared_ptr<const Collection> source, std::size_t key_arity);

  const Collection& source() const { return *source_; }
  std::size_t key_arity() const { return key_arity_; }
  std::size_t groups() const { return starts_.empty() ? 0 : starts_.size() - 1; }
  std::size_t group_begin(std::size_t g) const { return starts_[g]; }
  std::size_t group_end(std::size_t g) const { return starts_[g + 1]; }
  std::span<const Value> key(std::size_t g) const { return source_->row(starts_[g]).first(key_arity_); }
  std::optional<std::size_t> find_group(std::span<const Value> key) const;

 private:
  std::shared_ptr<const Collection> source_;
  std::size_t key_arity_ = 0;
  std::vector<std::size_t> starts_;
};

Arrangement arrange(std::shared_ptr<const Collection> c, std::size_t key_arity);
Arrangement arrange(Collection c, std::size_t key_arity);

// Matches equal keys and emits transform(key ++ left values ++ right values)
// with diff = multiply(left diff, right diff). Work is split over `workers`
// threads by key hash; the consolidated result does not depend on it.
// `emitted` receives the number of matched rows before consolidation.
Collection join_core(const Arrangement& left, const Arrangement& right, const RowTransform& transform,
                     std::size_t workers = 1, std::size_t* emitted = nullptr);

Collection flat_map_op(const Collection& c, const RowTransform& transform);
Collection concat_op(const Collection& a, const Collection& b);
Collection distinct_op(const Collection& c);
Collection lift_diff(const Collection& c, Monoid target);
// Rows of `left` whose key prefix has no match in `right`.
Collection antijoin_op(const Collection& left, const Arrangement& right);
Collection reduce_lattice(const Collection& c);

// One row per group: the group columns followed by the aggregate. COUNT
// counts distinct rows, SUM adds the term sum of distinct rows, MIN/MAX keep
// the extreme term sum.
Collection reduce_aggregate(const Collection& c, const std::vector<std::size_t>& group_columns, AggregateFn fn,
                            const std::vector<Operand>& terms, Monoid out = Monoid::presence());

}  // namespace flowlog
