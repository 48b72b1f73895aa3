#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flowlog/analysis.hpp"
#include "flowlog/collection.hpp"
#include "flowlog/plan_dag.hpp"

namespace flowlog {

using Facts = std::map<std::string, std::set<Tuple>>;

struct EngineOptions {
  std::size_t workers = 1;
  // Count diffs with distinct after every rule instead of presence diffs.
  bool count_diffs = false;
  std::optional<std::size_t> max_iterations;
};

struct NodeStats {
  std::size_t evaluations = 0;
  std::size_t incremental_updates = 0;
  std::size_t output_tuples = 0;  // cumulative over evaluations
  std::size_t peak_size = 0;
  std::size_t arrangement_builds = 0;
};

struct EvalStats {
  std::vector<NodeStats> nodes;
  std::vector<std::size_t> stratum_iterations;
  std::map<int, std::size_t> rule_derived;
  std::size_t join_output_tuples = 0;  // rows matched by joins, before consolidation
};

class Engine {
 public:
  Engine(const Program& program, const Stratification& strata, const PlanDAG& dag, EngineOptions options = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  Monoid diff_monoid() const;
  // Replaces the contents of an input relation. Rows are converted to the
  // engine's diff monoid.
  void load(const std::string& relation, const Collection& rows);
  void run();

  bool is_lattice(const std::string& relation) const;
  // Set relations: their rows. Lattice relations: group columns then value.
  std::set<Tuple> relation_tuples(const std::string& relation) const;
  Facts facts(const std::vector<std::string>& relations) const;
  const Collection& stored(const std::string& relation) const;
  const EvalStats& stats() const { return stats_; }

 private:
  struct Impl;
  EvalStats stats_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace flowlog
