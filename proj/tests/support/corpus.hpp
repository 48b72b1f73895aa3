#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowlog/oracle.hpp"

namespace flowlog::testing {

struct CorpusProgram {
  std::string name;  // file stem under programs/
  std::optional<ReferenceKind> reference;
  std::string reference_relation;
};

const std::vector<CorpusProgram>& corpus();
std::string program_text(const std::string& name);

struct Instance {
  Relations inputs;
  GraphInstance graph;  // what the reference algorithm sees
};

// Seeded random input for one corpus program. Graphs stay at or below 200
// nodes; Galen gets small random relations over a narrow domain.
Instance make_instance(const std::string& name, std::uint64_t seed);

}  // namespace flowlog::testing
