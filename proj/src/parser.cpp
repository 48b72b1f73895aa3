#include "flowlog/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>

#include "flowlog/error.hpp"

namespace flowlog {

namespace {

enum class Tok {
  Ident,
  Number,
  String,
  Directive,
  LParen,
  RParen,
  Comma,
  Dot,
  Colon,
  If,  // :-
  Bang,
  Plus,
  Cmp,
  Underscore,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  CompareOp op = CompareOp::Eq;
  SourceLocation where;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '?';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token tok;
    tok.where = {line_, col_};
    if (pos_ >= src_.size()) return tok;
    const char c = src_[pos_];

    if (c == '.' && pos_ + 1 < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_ + 1]))) {
      std::size_t end = pos_ + 1;
      while (end < src_.size() && ident_char(src_[end])) ++end;
      const auto word = src_.substr(pos_ + 1, end - pos_ - 1);
      if (word == "decl" || word == "input" || word == "output") {
        tok.kind = Tok::Directive;
        tok.text = std::string(word);
        advance(end - pos_);
        return tok;
      }
    }
    if (ident_start(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && ident_char(src_[end])) ++end;
      tok.text = std::string(src_.substr(pos_, end - pos_));
      tok.kind = tok.text == "_" ? Tok::Underscore : Tok::Ident;
      advance(end - pos_);
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::size_t end = pos_ + 1;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
      tok.kind = Tok::Number;
      tok.text = std::string(src_.substr(pos_, end - pos_));
      advance(end - pos_);
      return tok;
    }
    if (c == '"') {
      std::string text;
      std::size_t i = pos_ + 1;
      while (i < src_.size() && src_[i] != '"') {
        if (src_[i] == '\\' && i + 1 < src_.size()) ++i;
        if (src_[i] == '\n') break;
        text += src_[i++];
      }
      if (i >= src_.size() || src_[i] != '"') {
        throw Error(ErrorKind::SyntaxError, "unterminated string literal", tok.where);
      }
      tok.kind = Tok::String;
      tok.text = std::move(text);
      advance(i + 1 - pos_);
      return tok;
    }
    if (starts_with(":-")) return punct(tok, Tok::If, 2);
    if (starts_with("!=")) return cmp(tok, CompareOp::Ne, 2);
    if (starts_with("<=")) return cmp(tok, CompareOp::Le, 2);
    if (starts_with(">=")) return cmp(tok, CompareOp::Ge, 2);
    // UTF-8 spellings of the comparison and negation symbols.
    if (starts_with("\xE2\x89\xA0")) return cmp(tok, CompareOp::Ne, 3);
    if (starts_with("\xE2\x89\xA4")) return cmp(tok, CompareOp::Le, 3);
    if (starts_with("\xE2\x89\xA5")) return cmp(tok, CompareOp::Ge, 3);
    if (starts_with("\xC2\xAC")) return punct(tok, Tok::Bang, 2);
    switch (c) {
      case '(': return punct(tok, Tok::LParen, 1);
      case ')': return punct(tok, Tok::RParen, 1);
      case ',': return punct(tok, Tok::Comma, 1);
      case '.': return punct(tok, Tok::Dot, 1);
      case ':': return punct(tok, Tok::Colon, 1);
      case '!': return punct(tok, Tok::Bang, 1);
      case '+': return punct(tok, Tok::Plus, 1);
      case '=': return cmp(tok, CompareOp::Eq, 1);
      case '<': return cmp(tok, CompareOp::Lt, 1);
      case '>': return cmp(tok, CompareOp::Gt, 1);
      default: break;
    }
    throw Error(ErrorKind::SyntaxError, std::string("unexpected character '") + c + "'", tok.where);
  }

 private:
  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  Token punct(Token& tok, Tok kind, std::size_t len) {
    tok.kind = kind;
    tok.text = std::string(src_.substr(pos_, len));
    advance(len);
    return tok;
  }

  Token cmp(Token& tok, CompareOp op, std::size_t len) {
    tok.op = op;
    return punct(tok, Tok::Cmp, len);
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      const auto byte = static_cast<unsigned char>(src_[pos_++]);
      if (byte == '\n') {
        ++line_;
        col_ = 1;
      } else if ((byte & 0xC0) != 0x80) {
        ++col_;
      }
    }
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else if (starts_with("//")) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
      } else if (starts_with("/*")) {
        const SourceLocation where{line_, col_};
        advance(2);
        while (pos_ < src_.size() && !starts_with("*/")) advance(1);
        if (pos_ >= src_.size()) throw Error(ErrorKind::SyntaxError, "unterminated comment", where);
        advance(2);
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

std::optional<AggregateFn> aggregate_named(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "MIN") return AggregateFn::Min;
  if (upper == "MAX") return AggregateFn::Max;
  if (upper == "COUNT") return AggregateFn::Count;
  if (upper == "SUM") return AggregateFn::Sum;
  return std::nullopt;
}

struct RuleSite {
  SourceLocation head;
  std::vector<SourceLocation> body;
  std::vector<SourceLocation> constraints;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

  Program parse() {
    while (tok_.kind != Tok::End) {
      if (tok_.kind == Tok::Directive) {
        parse_directive();
      } else {
        parse_rule();
      }
    }
    finish();
    return std::move(program_);
  }

 private:
  Token take() {
    Token t = tok_;
    tok_ = lex_.next();
    return t;
  }

  Token expect(Tok kind, const char* what) {
    if (tok_.kind != kind) {
      throw Error(ErrorKind::SyntaxError,
                  std::string("expected ") + what + (tok_.kind == Tok::End ? " but reached end of input"
                                                                          : " but found '" + tok_.text + "'"),
                  tok_.where);
    }
    return take();
  }

  bool accept(Tok kind) {
    if (tok_.kind != kind) return false;
    take();
    return true;
  }

  void parse_directive() {
    const Token directive = take();
    if (directive.text == "decl") {
      const Token name = expect(Tok::Ident, "relation name");
      if (program_.relations.count(name.text)) {
        throw Error(ErrorKind::InvalidProgram, "relation '" + name.text + "' declared twice", name.where);
      }
      RelationDecl decl;
      decl.name = name.text;
      expect(Tok::LParen, "'('");
      if (tok_.kind != Tok::RParen) {
        do {
          const Token column = expect(Tok::Ident, "column name");
          ColumnType type = ColumnType::Number;
          if (accept(Tok::Colon)) {
            const Token type_name = expect(Tok::Ident, "column type");
            if (type_name.text == "symbol") {
              type = ColumnType::Symbol;
            } else if (type_name.text != "number") {
              throw Error(ErrorKind::SyntaxError, "unknown column type '" + type_name.text + "'",
                          type_name.where);
            }
          }
          decl.columns.push_back(column.text);
          decl.types.push_back(type);
        } while (accept(Tok::Comma));
      }
      expect(Tok::RParen, "')'");
      program_.declaration_order.push_back(decl.name);
      program_.relations.emplace(decl.name, std::move(decl));
      return;
    }
    do {
      const Token name = expect(Tok::Ident, "relation name");
      if (tok_.kind == Tok::LParen) skip_parameters();
      directives_.push_back({directive.text, name});
    } while (accept(Tok::Comma));
  }

  // `.input edge(IO=file, ...)` parameters are accepted and ignored.
  void skip_parameters() {
    int depth = 0;
    do {
      if (tok_.kind == Tok::End) throw Error(ErrorKind::SyntaxError, "unbalanced '('", tok_.where);
      if (tok_.kind == Tok::LParen) ++depth;
      if (tok_.kind == Tok::RParen) --depth;
      take();
    } while (depth > 0);
  }

  Term parse_term() {
    if (tok_.kind == Tok::Underscore) {
      take();
      return Term::placeholder();
    }
    if (tok_.kind == Tok::Ident) return Term::variable(take().text);
    if (tok_.kind == Tok::Number) {
      const Token t = take();
      Value v = 0;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
        throw Error(ErrorKind::SyntaxError, "integer literal out of range: " + t.text, t.where);
      }
      return Term::constant(v);
    }
    if (tok_.kind == Tok::String) return Term::symbol_constant(program_.symbols.encode(take().text));
    throw Error(ErrorKind::SyntaxError, "expected a term but found '" + tok_.text + "'", tok_.where);
  }

  Atom parse_atom_after_name(const Token& name) {
    Atom atom;
    atom.relation = name.text;
    expect(Tok::LParen, "'('");
    if (tok_.kind != Tok::RParen) {
      do {
        atom.terms.push_back(parse_term());
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    return atom;
  }

  void parse_rule() {
    Rule rule;
    rule.id = static_cast<int>(program_.rules.size()) + 1;
    RuleSite site;
    const Token head_name = expect(Tok::Ident, "rule head");
    site.head = head_name.where;
    rule.head.relation = head_name.text;
    expect(Tok::LParen, "'('");
    if (tok_.kind != Tok::RParen) {
      do {
        if (tok_.kind == Tok::Ident) {
          const Token ident = take();
          if (tok_.kind == Tok::LParen) {
            const auto fn = aggregate_named(ident.text);
            if (!fn) throw Error(ErrorKind::SyntaxError, "unknown aggregate '" + ident.text + "'", ident.where);
            if (rule.aggregate) {
              throw Error(ErrorKind::InvalidProgram, "at most one aggregate per rule head", ident.where);
            }
            take();
            AggregateSpec agg;
            agg.fn = *fn;
            agg.position = rule.head.terms.size();
            do {
              agg.over.push_back(parse_term());
            } while (accept(Tok::Plus));
            expect(Tok::RParen, "')'");
            rule.aggregate = std::move(agg);
            rule.head.terms.push_back(Term::placeholder());
          } else {
            rule.head.terms.push_back(Term::variable(ident.text));
          }
        } else {
          rule.head.terms.push_back(parse_term());
        }
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    if (tok_.kind == Tok::Dot) {
      throw Error(ErrorKind::SyntaxError, "facts are not supported; supply them through an input relation",
                  tok_.where);
    }
    expect(Tok::If, "':-'");
    do {
      parse_literal(rule, site);
    } while (accept(Tok::Comma));
    expect(Tok::Dot, "'.' at end of rule");
    sites_.push_back(std::move(site));
    program_.rules.push_back(std::move(rule));
  }

  void parse_literal(Rule& rule, RuleSite& site) {
    const SourceLocation where = tok_.where;
    if (accept(Tok::Bang)) {
      const Token name = expect(Tok::Ident, "relation name after '!'");
      Atom atom = parse_atom_after_name(name);
      atom.negated = true;
      rule.body.push_back(std::move(atom));
      site.body.push_back(where);
      return;
    }
    if (tok_.kind == Tok::Ident) {
      const Token ident = take();
      if (tok_.kind == Tok::LParen) {
        rule.body.push_back(parse_atom_after_name(ident));
        site.body.push_back(where);
        return;
      }
      finish_constraint(rule, site, Term::variable(ident.text), where);
      return;
    }
    finish_constraint(rule, site, parse_term(), where);
  }

  void finish_constraint(Rule& rule, RuleSite& site, Term left, SourceLocation where) {
    const Token op = expect(Tok::Cmp, "comparison operator");
    Term right = parse_term();
    rule.constraints.push_back({std::move(left), op.op, std::move(right)});
    site.constraints.push_back(where);
  }

  void finish() {
    for (const auto& [kind, name] : directives_) {
      auto it = program_.relations.find(name.text);
      if (it == program_.relations.end()) {
        throw Error(ErrorKind::UndeclaredRelation, "relation '" + name.text + "' is not declared", name.where);
      }
      if (kind == "input") {
        it->second.input = true;
      } else {
        it->second.output = true;
        program_.outputs.insert(name.text);
      }
    }
    for (std::size_t i = 0; i < program_.rules.size(); ++i) {
      check_rule(program_.rules[i], &sites_[i]);
    }
    for (const auto& rule : program_.rules) {
      program_.relations.at(rule.head.relation).kind = RelationKind::Idb;
    }
    validate_program(program_);
  }

  void check_rule(const Rule& rule, const RuleSite* site);

  Lexer lex_;
  Token tok_;
  Program program_;
  std::vector<RuleSite> sites_;
  std::vector<std::pair<std::string, Token>> directives_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message, const Rule& rule,
                       const SourceLocation* where) {
  const std::string text = "rule " + std::to_string(rule.id) + ": " + message;
  if (where != nullptr) throw Error(kind, text, *where);
  throw Error(kind, text);
}

void check_atom(const Program& program, const Rule& rule, const Atom& atom, const SourceLocation* where) {
  auto it = program.relations.find(atom.relation);
  if (it == program.relations.end()) {
    fail(ErrorKind::UndeclaredRelation, "relation '" + atom.relation + "' is not declared", rule, where);
  }
  if (it->second.arity() != atom.arity()) {
    fail(ErrorKind::ArityMismatch,
         "relation '" + atom.relation + "' has arity " + std::to_string(it->second.arity()) + " but is used with " +
             std::to_string(atom.arity()) + " arguments",
         rule, where);
  }
}

void check_rule_structure(const Program& program, const Rule& rule, const RuleSite* site) {
  const SourceLocation* head_where = site ? &site->head : nullptr;
  check_atom(program, rule, rule.head, head_where);
  for (std::size_t i = 0; i < rule.head.terms.size(); ++i) {
    const bool aggregate_slot = rule.aggregate && rule.aggregate->position == i;
    if (!aggregate_slot && rule.head.terms[i].is_placeholder()) {
      fail(ErrorKind::UnsafeRule, "placeholder '_' is not allowed in a rule head", rule, head_where);
    }
  }
  if (rule.aggregate && rule.aggregate->position + 1 != rule.head.arity()) {
    fail(ErrorKind::InvalidProgram, "an aggregate must be the last head column", rule, head_where);
  }
  bool has_positive = false;
  for (std::size_t i = 0; i < rule.body.size(); ++i) {
    check_atom(program, rule, rule.body[i], site ? &site->body[i] : nullptr);
    has_positive = has_positive || !rule.body[i].negated;
  }
  if (!has_positive) fail(ErrorKind::UnsafeRule, "rule body needs at least one positive atom", rule, head_where);

  const auto bound = rule.positive_variables();
  auto is_bound = [&](const std::string& v) { return std::find(bound.begin(), bound.end(), v) != bound.end(); };
  for (const auto& v : rule.head_variables()) {
    if (!is_bound(v)) {
      fail(ErrorKind::UnsafeRule, "head variable '" + v + "' does not occur in a positive body atom", rule,
           head_where);
    }
  }
  for (std::size_t i = 0; i < rule.body.size(); ++i) {
    if (!rule.body[i].negated) continue;
    for (const auto& v : rule.body[i].variables()) {
      if (!is_bound(v)) {
        fail(ErrorKind::UnsafeRule, "variable '" + v + "' of a negated atom is not bound by a positive atom", rule,
             site ? &site->body[i] : nullptr);
      }
    }
  }
  for (std::size_t i = 0; i < rule.constraints.size(); ++i) {
    const auto& c = rule.constraints[i];
    const SourceLocation* where = site ? &site->constraints[i] : nullptr;
    if (!c.left.is_variable() && !c.right.is_variable()) {
      fail(ErrorKind::InvalidProgram, "a constraint needs at least one variable", rule, where);
    }
    if (c.left.is_placeholder() || c.right.is_placeholder()) {
      fail(ErrorKind::UnsafeRule, "placeholder '_' is not allowed in a constraint", rule, where);
    }
    for (const auto& v : c.variables()) {
      if (!is_bound(v)) {
        fail(ErrorKind::UnsafeRule, "constraint variable '" + v + "' is not bound by a positive atom", rule, where);
      }
    }
  }
}

void Parser::check_rule(const Rule& rule, const RuleSite* site) { check_rule_structure(program_, rule, site); }

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).parse(); }

void validate_program(const Program& program) {
  std::set<std::string> heads;
  for (const auto& rule : program.rules) {
    check_rule_structure(program, rule, nullptr);
    heads.insert(rule.head.relation);
  }
  for (const auto& [name, decl] : program.relations) {
    const bool is_head = heads.count(name) > 0;
    if (is_head && decl.input) {
      throw Error(ErrorKind::InvalidProgram, "input relation '" + name + "' cannot be the head of a rule");
    }
    if (is_head != (decl.kind == RelationKind::Idb)) {
      throw Error(ErrorKind::InvalidProgram, "relation '" + name + "' has an inconsistent EDB/IDB classification");
    }
  }
  // Every rule defining a relation must agree on its aggregate.
  std::map<std::string, std::vector<const Rule*>> defining;
  for (const auto& rule : program.rules) defining[rule.head.relation].push_back(&rule);
  for (const auto& [name, rules] : defining) {
    const auto& first = rules.front()->aggregate;
    for (const Rule* r : rules) {
      const bool same = r->aggregate.has_value() == first.has_value() &&
                        (!first || (r->aggregate->fn == first->fn && r->aggregate->position == first->position));
      if (!same) {
        throw Error(ErrorKind::InvalidProgram,
                    "rules defining '" + name + "' disagree on the head aggregate (rule " + std::to_string(r->id) + ")");
      }
    }
    if (first && !is_lattice(first->fn) && rules.size() != 1) {
      throw Error(ErrorKind::InvalidProgram,
                  std::string(aggregate_fn_text(first->fn)) + " relation '" + name + "' must be defined by one rule");
    }
  }
}

}  // namespace flowlog
