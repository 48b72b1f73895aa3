#pragma once

#include <filesystem>
#include <istream>
#include <set>
#include <string>

#include "flowlog/ast.hpp"
#include "flowlog/collection.hpp"

namespace flowlog {

// Fact files are `<relation>.facts`, one row per line, no header.
std::filesystem::path facts_file(const std::filesystem::path& dir, const std::string& relation);

// Integer fields parse directly; symbol columns and non-integer fields are
// dictionary-encoded. Duplicates consolidate under `monoid`.
Collection parse_relation(std::istream& in, const RelationDecl& decl, Dictionary& dictionary, Monoid monoid,
                          char delimiter = '\t', const std::string& source = "<input>");
Collection load_relation(const std::filesystem::path& file, const RelationDecl& decl, Dictionary& dictionary,
                         Monoid monoid = Monoid::presence(), char delimiter = '\t');

// Sorted rows, symbol columns decoded.
std::string format_relation(const std::set<Tuple>& rows, const RelationDecl& decl, const Dictionary& dictionary,
                            char delimiter = '\t');
void write_relation(const std::set<Tuple>& rows, const std::filesystem::path& file, const RelationDecl& decl,
                    const Dictionary& dictionary, char delimiter = '\t');

}  // namespace flowlog
