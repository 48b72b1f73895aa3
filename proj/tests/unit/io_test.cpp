#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "flowlog/error.hpp"
#include "flowlog/io.hpp"

using namespace flowlog;

namespace {

RelationDecl decl(std::size_t arity, ColumnType type = ColumnType::Number) {
  RelationDecl d;
  d.name = "r";
  for (std::size_t i = 0; i < arity; ++i) {
    d.columns.push_back("c" + std::to_string(i));
    d.types.push_back(type);
  }
  return d;
}

Collection parse(const std::string& text, const RelationDecl& d, Dictionary& dict, Monoid m = Monoid::presence()) {
  std::istringstream in(text);
  return parse_relation(in, d, dict, m, '\t', "mem");
}

}  // namespace

TEST(Io, ParsesIntegers) {
  Dictionary dict;
  EXPECT_EQ(parse("1\t2\n2\t3\n", decl(2), dict).tuples(), (std::vector<Tuple>{{1, 2}, {2, 3}}));
}

TEST(Io, EncodesStringsFirstSeen) {
  Dictionary dict;
  const Collection c = parse("a\tb\n", decl(2, ColumnType::Symbol), dict);
  EXPECT_EQ(c.tuples(), (std::vector<Tuple>{{0, 1}}));
  EXPECT_EQ(*dict.decode(0), "a");
  EXPECT_EQ(dict.lookup("b"), std::optional<Value>(1));
}

TEST(Io, DuplicatesUnderEachMonoid) {
  Dictionary dict;
  EXPECT_EQ(parse("1\n1\n", decl(1), dict).entries(), (std::vector<std::pair<Tuple, Diff>>{{{1}, 1}}));
  EXPECT_EQ(parse("1\n1\n", decl(1), dict, Monoid::count()).entries(),
            (std::vector<std::pair<Tuple, Diff>>{{{1}, 2}}));
}

TEST(Io, MalformedRowReportsLine) {
  Dictionary dict;
  try {
    parse("1\t2\n3\n", decl(2), dict);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedRow);
    EXPECT_NE(std::string(e.what()).find("mem:2"), std::string::npos);
  }
}

TEST(Io, MissingFile) {
  Dictionary dict;
  try {
    load_relation("/nonexistent/r.facts", decl(1), dict);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
}

TEST(Io, WritesSortedAndDecoded) {
  Dictionary dict;
  EXPECT_EQ(format_relation({{3}, {1}, {2}}, decl(1), dict), "1\n2\n3\n");
  EXPECT_EQ(format_relation({{5, 1}, {7, 1}}, decl(2), dict), "5\t1\n7\t1\n");
  dict.encode("x");
  RelationDecl mixed = decl(2);
  mixed.types[0] = ColumnType::Symbol;
  EXPECT_EQ(format_relation({{0, 4}}, mixed, dict), "x\t4\n");
}

TEST(Io, RoundTripAndEmptyFile) {
  const auto dir = std::filesystem::temp_directory_path() / "flowlog_io_test";
  std::filesystem::create_directories(dir);
  Dictionary dict;
  const RelationDecl d = decl(2, ColumnType::Symbol);
  const Collection c = parse("b\ta\na\tb\nb\ta\n", d, dict);
  const auto tuples = c.tuples();
  write_relation({tuples.begin(), tuples.end()}, facts_file(dir, "r"), d, dict);
  Dictionary again;
  const Collection back = load_relation(facts_file(dir, "r"), d, again);
  EXPECT_EQ(back.size(), 2u);
  const auto back_tuples = back.tuples();
  EXPECT_EQ(format_relation({back_tuples.begin(), back_tuples.end()}, d, again),
            format_relation({tuples.begin(), tuples.end()}, d, dict));

  write_relation({}, facts_file(dir, "empty"), d, dict);
  EXPECT_TRUE(std::filesystem::exists(facts_file(dir, "empty")));
  EXPECT_EQ(std::filesystem::file_size(facts_file(dir, "empty")), 0u);
  std::filesystem::remove_all(dir);
}
