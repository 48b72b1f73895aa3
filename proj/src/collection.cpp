#include "flowlog/collection.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include "flowlog/error.hpp"

namespace flowlog {

namespace {

int compare_rows(const Value* a, const Value* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

void require_same(const Monoid& a, const Monoid& b, const char* op) {
  if (a.kind != b.kind) {
    throw Error(ErrorKind::MonoidMismatch,
                std::string(op) + ": " + monoid_name(a.kind) + " vs " + monoid_name(b.kind));
  }
}

std::size_t hash_key(std::span<const Value> key) {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (Value v : key) {
    h ^= std::hash<Value>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace

const char* monoid_name(MonoidKind kind) {
  switch (kind) {
    case MonoidKind::Presence: return "presence";
    case MonoidKind::Count: return "count";
    case MonoidKind::Min: return "min";
    case MonoidKind::Max: return "max";
  }
  return "?";
}

Diff Monoid::zero() const {
  switch (kind) {
    case MonoidKind::Presence:
    case MonoidKind::Count: return 0;
    case MonoidKind::Min: return std::numeric_limits<Diff>::max();
    case MonoidKind::Max: return std::numeric_limits<Diff>::min();
  }
  return 0;
}

Diff Monoid::combine(Diff a, Diff b) const {
  switch (kind) {
    case MonoidKind::Presence: return (a != 0 || b != 0) ? 1 : 0;
    case MonoidKind::Count: return a + b;
    case MonoidKind::Min: return std::min(a, b);
    case MonoidKind::Max: return std::max(a, b);
  }
  return 0;
}

Diff Monoid::multiply(Diff a, Diff b) const {
  switch (kind) {
    case MonoidKind::Presence: return (a != 0 && b != 0) ? 1 : 0;
    case MonoidKind::Count: return a * b;
    default: break;
  }
  throw Error(ErrorKind::UnsupportedMonoid, std::string("multiply is undefined for ") + monoid_name(kind));
}

Diff Monoid::one() const {
  if (is_lattice()) throw Error(ErrorKind::UnsupportedMonoid, std::string("no unit for ") + monoid_name(kind));
  return 1;
}

void Collection::push(std::span<const Value> row, Diff diff) {
  if (row.size() != arity_) {
    throw Error(ErrorKind::InvalidArgument,
                "row of arity " + std::to_string(row.size()) + " pushed into arity " + std::to_string(arity_));
  }
  data_.insert(data_.end(), row.begin(), row.end());
  diffs_.push_back(diff);
  consolidated_ = false;
}

void Collection::append(const Collection& other) {
  if (other.arity_ != arity_) throw Error(ErrorKind::InvalidArgument, "append: arity mismatch");
  require_same(monoid_, other.monoid_, "append");
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  diffs_.insert(diffs_.end(), other.diffs_.begin(), other.diffs_.end());
  consolidated_ = consolidated_ && other.empty();
}

void Collection::reserve(std::size_t rows) {
  data_.reserve(rows * arity_);
  diffs_.reserve(rows);
}

void Collection::consolidate() {
  if (consolidated_) return;
  const std::size_t n = diffs_.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return compare_rows(row_ptr(a), row_ptr(b), arity_) < 0;
  });
  std::vector<Value> data;
  std::vector<Diff> diffs;
  data.reserve(data_.size());
  diffs.reserve(n);
  for (std::size_t i = 0; i < n;) {
    Diff d = diffs_[order[i]];
    std::size_t j = i + 1;
    while (j < n && compare_rows(row_ptr(order[i]), row_ptr(order[j]), arity_) == 0) {
      d = monoid_.combine(d, diffs_[order[j]]);
      ++j;
    }
    if (!monoid_.is_zero(d)) {
      const Value* r = row_ptr(order[i]);
      data.insert(data.end(), r, r + arity_);
      diffs.push_back(d);
    }
    i = j;
  }
  data_ = std::move(data);
  diffs_ = std::move(diffs);
  consolidated_ = true;
}

std::optional<Diff> Collection::find(std::span<const Value> row) const {
  if (!consolidated_) throw Error(ErrorKind::InvalidArgument, "find on an unconsolidated collection");
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const int c = compare_rows(row_ptr(mid), row.data(), arity_);
    if (c == 0) return diffs_[mid];
    if (c < 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return std::nullopt;
}

std::vector<Tuple> Collection::tuples() const {
  std::vector<Tuple> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.emplace_back(row(i).begin(), row(i).end());
  return out;
}

std::vector<std::pair<Tuple, Diff>> Collection::entries() const {
  std::vector<std::pair<Tuple, Diff>> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.emplace_back(Tuple(row(i).begin(), row(i).end()), diffs_[i]);
  return out;
}

Arrangement::Arrangement(std::shared_ptr<const Collection> source, std::size_t key_arity)
    : source_(std::move(source)), key_arity_(key_arity) {
  if (!source_->consolidated()) throw Error(ErrorKind::InvalidArgument, "arrange needs a consolidated collection");
  if (key_arity_ > source_->arity()) throw Error(ErrorKind::InvalidArgument, "key arity exceeds row arity");
  const std::size_t n = source_->size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || compare_rows(source_->row_ptr(i - 1), source_->row_ptr(i), key_arity_) != 0) starts_.push_back(i);
  }
  starts_.push_back(n);
}

std::optional<std::size_t> Arrangement::find_group(std::span<const Value> key) const {
  std::size_t lo = 0, hi = groups();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const int c = compare_rows(source_->row_ptr(starts_[mid]), key.data(), key_arity_);
    if (c == 0) return mid;
    if (c < 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return std::nullopt;
}

Arrangement arrange(std::shared_ptr<const Collection> c, std::size_t key_arity) {
  return Arrangement(std::move(c), key_arity);
}

Arrangement arrange(Collection c, std::size_t key_arity) {
  c.consolidate();
  return Arrangement(std::make_shared<const Collection>(std::move(c)), key_arity);
}

Collection join_core(const Arrangement& left, const Arrangement& right, const RowTransform& transform,
                     std::size_t workers, std::size_t* emitted) {
  const Collection& l = left.source();
  const Collection& r = right.source();
  require_same(l.monoid(), r.monoid(), "join");
  if (left.key_arity() != right.key_arity()) throw Error(ErrorKind::InvalidArgument, "join: key arity mismatch");
  const Monoid monoid = l.monoid();
  const std::size_t k = left.key_arity();
  const std::size_t in_arity = l.arity() + r.arity() - k;
  const std::size_t out_arity = transform.output_arity(in_arity);

  std::vector<std::pair<std::size_t, std::size_t>> matches;
  for (std::size_t gl = 0, gr = 0; gl < left.groups() && gr < right.groups();) {
    const int c = compare_rows(left.key(gl).data(), right.key(gr).data(), k);
    if (c == 0) {
      matches.emplace_back(gl, gr);
      ++gl;
      ++gr;
    } else if (c < 0) {
      ++gl;
    } else {
      ++gr;
    }
  }

  auto run = [&](std::size_t part, std::size_t parts, Collection& out) {
    std::vector<Value> buf(in_arity);
    std::vector<Value> proj(out_arity);
    for (const auto& [gl, gr] : matches) {
      if (parts > 1 && hash_key(left.key(gl)) % parts != part) continue;
      for (std::size_t i = left.group_begin(gl); i < left.group_end(gl); ++i) {
        const Value* lr = l.row_ptr(i);
        std::copy(lr, lr + l.arity(), buf.begin());
        for (std::size_t j = right.group_begin(gr); j < right.group_end(gr); ++j) {
          const Value* rr = r.row_ptr(j);
          std::copy(rr + k, rr + r.arity(), buf.begin() + static_cast<long>(l.arity()));
          if (!transform.passes(buf.data())) continue;
          const Diff d = monoid.multiply(l.diff(i), r.diff(j));
          if (monoid.is_zero(d)) continue;
          if (transform.projection) {
            for (std::size_t c = 0; c < out_arity; ++c) proj[c] = (*transform.projection)[c].eval(buf.data());
            out.push(std::span<const Value>(proj), d);
          } else {
            out.push(std::span<const Value>(buf), d);
          }
        }
      }
    }
  };

  Collection out(out_arity, monoid);
  if (workers <= 1 || matches.size() < 2) {
    run(0, 1, out);
    if (emitted) *emitted = out.size();
  } else {
    std::vector<Collection> parts(workers, Collection(out_arity, monoid));
    std::vector<std::size_t> counts(workers, 0);
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        run(w, workers, parts[w]);
        counts[w] = parts[w].size();
        parts[w].consolidate();
      });
    }
    for (auto& t : threads) t.join();
    if (emitted) *emitted = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    for (const auto& p : parts) out.append(p);
  }
  out.consolidate();
  return out;
}

Collection flat_map_op(const Collection& c, const RowTransform& transform) {
  const std::size_t out_arity = transform.output_arity(c.arity());
  Collection out(out_arity, c.monoid());
  out.reserve(c.size());
  std::vector<Value> proj(out_arity);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Value* row = c.row_ptr(i);
    if (!transform.passes(row)) continue;
    if (transform.projection) {
      for (std::size_t k = 0; k < out_arity; ++k) proj[k] = (*transform.projection)[k].eval(row);
      out.push(std::span<const Value>(proj), c.diff(i));
    } else {
      out.push(c.row(i), c.diff(i));
    }
  }
  out.consolidate();
  return out;
}

Collection concat_op(const Collection& a, const Collection& b) {
  require_same(a.monoid(), b.monoid(), "concat");
  if (a.arity() != b.arity()) throw Error(ErrorKind::InvalidArgument, "concat: arity mismatch");
  Collection out = a;
  out.append(b);
  out.consolidate();
  return out;
}

Collection distinct_op(const Collection& c) {
  if (c.monoid().is_lattice()) {
    throw Error(ErrorKind::UnsupportedMonoid, std::string("distinct over ") + monoid_name(c.monoid().kind));
  }
  Collection in = c;
  in.consolidate();
  if (c.monoid().kind == MonoidKind::Presence) return in;
  Collection out(c.arity(), c.monoid());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in.diff(i) > 0) out.push(in.row(i), 1);
  }
  out.consolidate();
  return out;
}

Collection lift_diff(const Collection& c, Monoid target) {
  const MonoidKind from = c.monoid().kind;
  if (from == target.kind) {
    Collection out = c;
    out.consolidate();
    return out;
  }
  Collection out(c.arity(), target);
  if (from == MonoidKind::Presence && target.kind == MonoidKind::Count) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c.diff(i) != 0) out.push(c.row(i), 1);
    }
  } else if (from == MonoidKind::Count && target.kind == MonoidKind::Presence) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c.diff(i) > 0) out.push(c.row(i), 1);
    }
  } else {
    throw Error(ErrorKind::UnsupportedLift,
                std::string("cannot lift ") + monoid_name(from) + " to " + monoid_name(target.kind));
  }
  out.consolidate();
  return out;
}

Collection antijoin_op(const Collection& left, const Arrangement& right) {
  const std::size_t k = right.key_arity();
  const bool presence = left.monoid().kind == MonoidKind::Presence;
  // Presence has no subtraction: lift to counts, subtract the matched part,
  // then cast back.
  Collection lifted = lift_diff(left, Monoid::count());
  Collection matched(left.arity(), Monoid::count());
  for (std::size_t i = 0; i < lifted.size(); ++i) {
    auto g = right.find_group(lifted.row(i).first(k));
    if (!g) continue;
    bool positive = false;
    for (std::size_t j = right.group_begin(*g); j < right.group_end(*g); ++j) {
      if (right.source().diff(j) > 0 || right.source().monoid().kind == MonoidKind::Presence) positive = true;
    }
    if (positive) matched.push(lifted.row(i), -lifted.diff(i));
  }
  Collection out = concat_op(lifted, matched);
  return presence ? lift_diff(out, Monoid::presence()) : out;
}

Collection reduce_lattice(const Collection& c) {
  if (!c.monoid().is_lattice()) {
    throw Error(ErrorKind::UnsupportedMonoid, std::string("lattice reduce over ") + monoid_name(c.monoid().kind));
  }
  Collection out = c;
  out.consolidate();
  return out;
}

Collection reduce_aggregate(const Collection& c, const std::vector<std::size_t>& group_columns, AggregateFn fn,
                            const std::vector<Operand>& terms, Monoid out_monoid) {
  Collection in = c;
  in.consolidate();
  std::map<Tuple, Value> groups;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!in.monoid().is_lattice() && in.diff(i) <= 0) continue;
    const Value* row = in.row_ptr(i);
    Tuple key;
    for (std::size_t g : group_columns) key.push_back(row[g]);
    Value v = 0;
    for (const auto& t : terms) v += t.eval(row);
    auto [it, inserted] = groups.emplace(std::move(key), 0);
    switch (fn) {
      case AggregateFn::Count: it->second += 1; break;
      case AggregateFn::Sum: it->second += v; break;
      case AggregateFn::Min: it->second = inserted ? v : std::min(it->second, v); break;
      case AggregateFn::Max: it->second = inserted ? v : std::max(it->second, v); break;
    }
  }
  Collection out(group_columns.size() + 1, out_monoid);
  for (auto& [key, v] : groups) {
    Tuple row = key;
    row.push_back(v);
    out.push(std::span<const Value>(row), out_monoid.is_lattice() ? v : out_monoid.one());
  }
  out.consolidate();
  return out;
}

}  // namespace flowlog
