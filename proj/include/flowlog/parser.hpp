#pragma once

#include <string_view>

#include "flowlog/ast.hpp"

namespace flowlog {

// Parses the supported Datalog subset:
//
//   .decl edge(x:number, y:number)
//   .input edge
//   .output reach
//   reach(x) :- target(x).
//   reach(x) :- edge(x, y), edge(y, z), reach(z).
//   cc(x, MIN(i)) :- edge(y, x), cc(y, i).
//   nh(x, z) :- edge(x, y), edge(y, z), x != z, !edge(x, z).
//
// Comments use `//` or `/* */`. The result is validated (declarations,
// arities, range restriction and negation safety); errors carry line and
// column of the offending construct.
Program parse_program(std::string_view text);

// Checks the structural invariants of an already-built program. Used by the
// parser and by rewrites that synthesize rules.
void validate_program(const Program& program);

}  // namespace flowlog
