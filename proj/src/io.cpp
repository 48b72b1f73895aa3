#include "flowlog/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "flowlog/error.hpp"

namespace flowlog {

namespace {

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == delimiter) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::optional<Value> parse_int(const std::string& s) {
  Value v = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

std::filesystem::path facts_file(const std::filesystem::path& dir, const std::string& relation) {
  return dir / (relation + ".facts");
}

Collection parse_relation(std::istream& in, const RelationDecl& decl, Dictionary& dictionary, Monoid monoid,
                          char delimiter, const std::string& source) {
  const std::size_t arity = decl.arity();
  Collection out(arity, monoid);
  std::string line;
  std::size_t line_no = 0;
  Tuple row(arity);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (arity == 0) {
      if (!line.empty()) {
        throw Error(ErrorKind::MalformedRow, source + ":" + std::to_string(line_no) + ": expected an empty row");
      }
      out.push(std::span<const Value>(row), monoid.one());
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split(line, delimiter);
    if (fields.size() != arity) {
      throw Error(ErrorKind::MalformedRow, source + ":" + std::to_string(line_no) + ": expected " +
                                               std::to_string(arity) + " fields, found " +
                                               std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < arity; ++i) {
      std::optional<Value> v;
      if (decl.types.empty() || decl.types[i] == ColumnType::Number) v = parse_int(fields[i]);
      row[i] = v ? *v : dictionary.encode(fields[i]);
    }
    out.push(std::span<const Value>(row), monoid.one());
  }
  out.consolidate();
  return out;
}

Collection load_relation(const std::filesystem::path& file, const RelationDecl& decl, Dictionary& dictionary,
                         Monoid monoid, char delimiter) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + file.string());
  return parse_relation(in, decl, dictionary, monoid, delimiter, file.string());
}

std::string format_relation(const std::set<Tuple>& rows, const RelationDecl& decl, const Dictionary& dictionary,
                            char delimiter) {
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << delimiter;
      const std::string* text = nullptr;
      if (i < decl.types.size() && decl.types[i] == ColumnType::Symbol) text = dictionary.decode(row[i]);
      if (text) {
        os << *text;
      } else {
        os << row[i];
      }
    }
    os << '\n';
  }
  return os.str();
}

void write_relation(const std::set<Tuple>& rows, const std::filesystem::path& file, const RelationDecl& decl,
                    const Dictionary& dictionary, char delimiter) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + file.string());
  out << format_relation(rows, decl, dictionary, delimiter);
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + file.string());
}

}  // namespace flowlog
