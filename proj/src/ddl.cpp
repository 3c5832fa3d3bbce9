#include "precog/ddl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace precog::ddl {

SyntaxError::SyntaxError(const std::string& msg, std::size_t line, std::size_t column)
    : Error("syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// Expressions

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::lor: return 1;
    case Expr::Kind::land: return 2;
    case Expr::Kind::lnot: return 3;
    case Expr::Kind::compare:
    case Expr::Kind::matches: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string quote(const std::string& s, char q) {
  std::string out(1, q);
  for (char c : s) {
    if (c == q) out += q;
    out += c;
  }
  return out + q;
}

std::string child(const Expr& parent, const ExprPtr& c) {
  const auto s = to_string(*c);
  return precedence(*c) < precedence(parent) || (precedence(*c) == precedence(parent) && precedence(parent) >= 3)
             ? "(" + s + ")"
             : s;
}

}  // namespace

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::column: return e.text;
    case Expr::Kind::number: return format_number(e.number);
    case Expr::Kind::string: return quote(e.text, '\'');
    case Expr::Kind::compare: return child(e, e.args[0]) + " " + e.text + " " + child(e, e.args[1]);
    case Expr::Kind::matches: return child(e, e.args[0]) + " MATCHES " + quote(e.text, '\'');
    case Expr::Kind::land: return child(e, e.args[0]) + " AND " + child(e, e.args[1]);
    case Expr::Kind::lor: return child(e, e.args[0]) + " OR " + child(e, e.args[1]);
    case Expr::Kind::lnot: return "NOT " + child(e, e.args[0]);
  }
  return {};
}

std::vector<std::string> referenced_columns(const Expr& e) {
  std::vector<std::string> out;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (x.kind == Expr::Kind::column && std::find(out.begin(), out.end(), x.text) == out.end()) out.push_back(x.text);
    for (const auto& a : x.args) walk(*a);
  };
  walk(e);
  return out;
}

std::string to_string(ColumnType t) {
  switch (t) {
    case ColumnType::integer: return "int";
    case ColumnType::real: return "real";
    case ColumnType::text: return "text";
    case ColumnType::autoincrement: return "autoincrement";
  }
  return {};
}

std::string to_string(ConstraintType t) {
  switch (t) {
    case ConstraintType::domain: return "domain";
    case ConstraintType::unique: return "unique";
    case ConstraintType::fkey: return "fkey";
    case ConstraintType::pkey: return "pkey";
  }
  return {};
}

const Column* CrowdTableDef::column(const std::string& n) const {
  for (const auto& c : columns)
    if (c.name == n) return &c;
  return nullptr;
}

const Constraint* CrowdTableDef::constraint(const std::string& n) const {
  for (const auto& c : constraints)
    if (c.name == n) return &c;
  return nullptr;
}

const CrowdTableDef* Program::crowd_table(const std::string& name) const {
  for (const auto& s : statements)
    if (auto t = std::get_if<CrowdTableDef>(&s); t && t->name == name) return t;
  return nullptr;
}

const FeatureTableDef* Program::feature_table(const std::string& name) const {
  for (const auto& s : statements)
    if (auto t = std::get_if<FeatureTableDef>(&s); t && t->name == name) return t;
  return nullptr;
}

std::vector<const ExplanationDef*> Program::explanations() const {
  std::vector<const ExplanationDef*> out;
  for (const auto& s : statements)
    if (auto e = std::get_if<ExplanationDef>(&s)) out.push_back(e);
  return out;
}

std::vector<const InterfaceDef*> Program::interfaces() const {
  std::vector<const InterfaceDef*> out;
  for (const auto& s : statements)
    if (auto e = std::get_if<InterfaceDef>(&s)) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

enum class Tok { ident, number, string, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::size_t line = 1, column = 1;
};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  const Token& peek() {
    if (!cached_) {
      cache_ = lex();
      cached_ = true;
    }
    return cache_;
  }

  Token next() {
    peek();
    cached_ = false;
    return cache_;
  }

  /// An unquoted regex runs to whitespace, ',' , ';' or an unbalanced ')'.
  Token raw_regex() {
    if (cached_) throw SyntaxError("internal: lookahead before regex", cache_.line, cache_.column);
    skip_space();
    Token t{Tok::string, {}, line_, col_};
    if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"')) return lex();
    int depth = 0;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (depth == 0 && (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';' || c == ')')) break;
      if (c == '(') ++depth;
      if (c == ')') --depth;
      t.text += c;
      advance();
    }
    if (t.text.empty()) throw SyntaxError("expected a regular expression", t.line, t.column);
    return t;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
        advance();
      } else if (src_.substr(pos_, 2) == "--") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token lex() {
    skip_space();
    Token t{Tok::end, {}, line_, col_};
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Tok::ident;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        t.text += src_[pos_];
        advance();
      }
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = Tok::number;
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.') &&
             src_.substr(pos_, 3) != "...") {
        t.text += src_[pos_];
        advance();
      }
      return t;
    }
    if (c == '\'' || c == '"') {
      t.kind = Tok::string;
      advance();
      while (true) {
        if (pos_ >= src_.size()) throw SyntaxError("unterminated string literal", t.line, t.column);
        if (src_[pos_] == c) {
          advance();
          if (pos_ < src_.size() && src_[pos_] == c) {
            t.text += c;
            advance();
            continue;
          }
          break;
        }
        t.text += src_[pos_];
        advance();
      }
      return t;
    }
    t.kind = Tok::punct;
    for (const char* op : {"...", ">=", "<=", "<>", "!="}) {
      if (src_.substr(pos_, std::char_traits<char>::length(op)) == op) {
        t.text = op;
        for (std::size_t i = 0; i < t.text.size(); ++i) advance();
        return t;
      }
    }
    if (std::string_view("(),;.=<>-*").find(c) == std::string_view::npos)
      throw SyntaxError(std::string("unexpected character '") + c + "'", t.line, t.column);
    t.text = std::string(1, c);
    advance();
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
  Token cache_;
  bool cached_ = false;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::end: return "end of input";
    case Tok::string: return "string " + quote(t.text, '"');
    default: return "'" + t.text + "'";
  }
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  Program program() {
    Program p;
    while (lex_.peek().kind != Tok::end) p.statements.push_back(statement());
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& expected, const Token& t) {
    throw SyntaxError("expected " + expected + ", found " + describe(t), t.line, t.column);
  }

  bool is_kw(const Token& t, std::string_view kw) { return t.kind == Tok::ident && iequals(t.text, kw); }
  bool peek_kw(std::string_view kw) { return is_kw(lex_.peek(), kw); }
  bool peek_punct(std::string_view p) { return lex_.peek().kind == Tok::punct && lex_.peek().text == p; }

  bool accept_kw(std::string_view kw) {
    if (!peek_kw(kw)) return false;
    lex_.next();
    return true;
  }
  bool accept_punct(std::string_view p) {
    if (!peek_punct(p)) return false;
    lex_.next();
    return true;
  }
  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw)) fail(std::string(kw), lex_.peek());
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail("'" + std::string(p) + "'", lex_.peek());
  }
  std::string ident(const std::string& what) {
    if (lex_.peek().kind != Tok::ident) fail(what, lex_.peek());
    return lex_.next().text;
  }
  std::string string_lit(const std::string& what) {
    if (lex_.peek().kind != Tok::string) fail(what, lex_.peek());
    return lex_.next().text;
  }

  std::vector<std::string> ident_list() {
    expect_punct("(");
    std::vector<std::string> out{ident("column name")};
    while (accept_punct(",")) out.push_back(ident("column name"));
    expect_punct(")");
    return out;
  }

  /// A single column, optionally parenthesized.
  std::string one_column() {
    if (accept_punct("(")) {
      auto c = ident("column name");
      expect_punct(")");
      return c;
    }
    return ident("column name");
  }

  Statement statement() {
    expect_kw("CREATE");
    Statement s;
    if (accept_kw("CROWD")) {
      expect_kw("TABLE");
      s = crowd_table();
    } else if (accept_kw("FEATURE")) {
      expect_kw("TABLE");
      s = feature_table();
    } else if (accept_kw("EXPLANATION")) {
      s = explanation();
    } else if (accept_kw("INTERFACE")) {
      s = interface();
    } else {
      fail("CROWD TABLE, FEATURE TABLE, EXPLANATION or INTERFACE", lex_.peek());
    }
    if (!accept_punct(";") && lex_.peek().kind != Tok::end) fail("';'", lex_.peek());
    return s;
  }

  ColumnType column_type() {
    const Token t = lex_.peek();
    if (t.kind != Tok::ident) fail("column type", t);
    lex_.next();
    if (iequals(t.text, "int") || iequals(t.text, "integer")) return ColumnType::integer;
    if (iequals(t.text, "real") || iequals(t.text, "float") || iequals(t.text, "double")) return ColumnType::real;
    if (iequals(t.text, "text") || iequals(t.text, "varchar") || iequals(t.text, "string")) return ColumnType::text;
    if (iequals(t.text, "autoincrement") || iequals(t.text, "serial")) return ColumnType::autoincrement;
    fail("column type", t);
  }

  Constraint foreign_key(const std::string& column) {
    Constraint c;
    c.type = ConstraintType::fkey;
    c.attributes = {column};
    if (!accept_kw("REF")) expect_kw("REFERENCES");
    c.refTable = ident("referenced table");
    c.refColumn = one_column();
    return c;
  }

  CrowdTableDef crowd_table() {
    CrowdTableDef t;
    t.name = ident("table name");
    expect_punct("(");
    do {
      std::string explicitName;
      if (accept_kw("CONSTRAINT")) explicitName = ident("constraint name");
      Constraint c;
      bool isConstraint = true;
      if (accept_kw("CHECK")) {
        c.type = ConstraintType::domain;
        c.check = expr();
        c.attributes = referenced_columns(*c.check);
      } else if (accept_kw("UNIQUE")) {
        c.type = ConstraintType::unique;
        c.attributes = ident_list();
      } else if (accept_kw("PRIMARY")) {
        expect_kw("KEY");
        c.type = ConstraintType::pkey;
        c.attributes = ident_list();
      } else if (accept_kw("FOREIGN")) {
        expect_kw("KEY");
        c = foreign_key(one_column());
      } else if (explicitName.empty() && accept_kw("QUALITY")) {
        expect_kw("SCORE");
        QualityScore q;
        q.name = ident("quality score name");
        q.scorer = ident("scoring function");
        expect_punct("(");
        q.target = ident("column name");
        expect_punct(")");
        t.qualityScores.push_back(q);
        isConstraint = false;
      } else if (explicitName.empty()) {
        column(t);
        isConstraint = false;
      } else {
        fail("CHECK, UNIQUE, PRIMARY KEY or FOREIGN KEY", lex_.peek());
      }
      if (isConstraint) {
        c.name = explicitName;
        t.constraints.push_back(std::move(c));
      }
    } while (accept_punct(","));
    expect_punct(")");
    return t;
  }

  void column(CrowdTableDef& t) {
    Column col;
    col.name = ident("column name, CHECK, UNIQUE, PRIMARY KEY, FOREIGN KEY or QUALITY SCORE");
    col.type = column_type();
    t.columns.push_back(col);
    while (true) {
      Constraint c;
      if (accept_kw("UNIQUE")) {
        c.type = ConstraintType::unique;
        c.attributes = {col.name};
      } else if (accept_kw("PRIMARY")) {
        expect_kw("KEY");
        c.type = ConstraintType::pkey;
        c.attributes = {col.name};
      } else if (accept_kw("CHECK")) {
        c.type = ConstraintType::domain;
        c.check = expr();
        c.attributes = {col.name};
        for (auto& r : referenced_columns(*c.check))
          if (r != col.name) c.attributes.push_back(r);
      } else if (peek_kw("REFERENCES") || peek_kw("REF")) {
        c = foreign_key(col.name);
      } else {
        break;
      }
      t.constraints.push_back(std::move(c));
    }
  }

  FeatureTableDef feature_table() {
    FeatureTableDef t;
    t.name = ident("table name");
    expect_punct("(");
    t.key.name = ident("key column name");
    t.key.type = column_type();
    expect_kw("PRIMARY");
    expect_kw("KEY");
    if (!accept_kw("REFERENCES")) expect_kw("REF");
    t.refTable = ident("referenced table");
    if (accept_punct(".")) {
      t.refColumn = ident("referenced column");
    } else {
      t.refColumn = one_column();
    }
    while (accept_punct(",")) {
      if (accept_punct("...")) {
        t.elided = true;
        break;
      }
      FeatureColumn f;
      f.name = ident("feature name or '...'");
      expect_kw("FEATURE");
      f.extractor = ident("extractor id");
      t.features.push_back(f);
    }
    expect_punct(")");
    return t;
  }

  ExplanationDef explanation() {
    ExplanationDef e;
    if (!peek_kw("ON")) e.name = ident("ON");
    expect_kw("ON");
    e.table = ident("table name");
    e.attributes = ident_list();
    if (accept_kw("FOR")) e.constraint = ident("constraint name");
    expect_kw("USING");
    e.explainer = ident("explanation function");
    return e;
  }

  InterfaceDef interface() {
    InterfaceDef i;
    expect_kw("ON");
    i.table = ident("table name");
    expect_punct("(");
    i.attribute = ident("column name");
    expect_punct(")");
    expect_kw("USING");
    i.widget = string_lit("widget name string");
    expect_kw("FROM");
    i.source = string_lit("source file string");
    if (accept_kw("AND")) i.explainer = ident("explanation function");
    return i;
  }

  // expr := or
  ExprPtr expr() { return disjunction(); }

  ExprPtr binary(Expr::Kind k, ExprPtr a, ExprPtr b, std::string op = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->text = std::move(op);
    e->args = {std::move(a), std::move(b)};
    return e;
  }

  ExprPtr disjunction() {
    auto lhs = conjunction();
    while (accept_kw("OR")) lhs = binary(Expr::Kind::lor, lhs, conjunction());
    return lhs;
  }

  ExprPtr conjunction() {
    auto lhs = negation();
    while (accept_kw("AND")) lhs = binary(Expr::Kind::land, lhs, negation());
    return lhs;
  }

  ExprPtr negation() {
    if (accept_kw("NOT")) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::lnot;
      e->args = {negation()};
      return e;
    }
    return comparison();
  }

  ExprPtr comparison() {
    auto lhs = primary();
    if (accept_kw("MATCHES")) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::matches;
      e->text = lex_.raw_regex().text;
      e->args = {lhs};
      return e;
    }
    const Token& t = lex_.peek();
    if (t.kind == Tok::punct) {
      for (const char* op : {">=", "<=", "<>", "!=", "=", "<", ">"}) {
        if (t.text == op) {
          std::string o = t.text == "!=" ? "<>" : t.text;
          lex_.next();
          return binary(Expr::Kind::compare, lhs, primary(), o);
        }
      }
    }
    return lhs;
  }

  ExprPtr primary() {
    const Token t = lex_.peek();
    auto e = std::make_shared<Expr>();
    if (accept_punct("(")) {
      auto inner = expr();
      expect_punct(")");
      return inner;
    }
    const bool negative = accept_punct("-");
    const Token v = lex_.peek();
    if (v.kind == Tok::number) {
      lex_.next();
      e->kind = Expr::Kind::number;
      try {
        std::size_t used = 0;
        e->number = std::stod(v.text, &used);
        if (used != v.text.size()) throw std::invalid_argument(v.text);
      } catch (const std::exception&) {
        throw SyntaxError("malformed number '" + v.text + "'", v.line, v.column);
      }
      if (negative) e->number = -e->number;
      return e;
    }
    if (negative) fail("number", v);
    if (t.kind == Tok::string) {
      lex_.next();
      e->kind = Expr::Kind::string;
      e->text = t.text;
      return e;
    }
    if (t.kind == Tok::ident && !is_kw(t, "AND") && !is_kw(t, "OR") && !is_kw(t, "NOT")) {
      lex_.next();
      e->kind = Expr::Kind::column;
      e->text = t.text;
      return e;
    }
    fail("column, number, string or '('", t);
  }

  Lexer lex_;
};

// ---------------------------------------------------------------------------
// Resolution

void name_constraints(CrowdTableDef& t) {
  std::set<std::string> used;
  for (const auto& c : t.constraints)
    if (!c.name.empty() && !used.insert(c.name).second)
      throw ResolutionError("duplicate constraint name " + c.name + " in table " + t.name);
  for (auto& c : t.constraints) {
    if (!c.name.empty()) continue;
    std::string base = t.name;
    for (const auto& a : c.attributes.empty() ? std::vector<std::string>{"expr"}
                         : c.type == ConstraintType::domain ? std::vector<std::string>{c.attributes.front()}
                                                            : c.attributes)
      base += "_" + a;
    base += "_" + to_string(c.type);
    std::string name = base;
    for (int i = 2; used.count(name); ++i) name = base + "_" + std::to_string(i);
    used.insert(name);
    c.name = name;
  }
}

void resolve(Program& p) {
  std::set<std::string> tables;
  for (auto& s : p.statements) {
    std::string name;
    if (auto t = std::get_if<CrowdTableDef>(&s)) name = t->name;
    if (auto t = std::get_if<FeatureTableDef>(&s)) name = t->name;
    if (!name.empty() && !tables.insert(name).second) throw ResolutionError("duplicate table " + name);
  }
  for (auto& s : p.statements) {
    if (auto t = std::get_if<CrowdTableDef>(&s)) {
      std::set<std::string> cols;
      for (const auto& c : t->columns)
        if (!cols.insert(c.name).second) throw ResolutionError("duplicate column " + c.name + " in table " + t->name);
      for (const auto& c : t->constraints)
        for (const auto& a : c.attributes)
          if (!cols.count(a)) throw ResolutionError("constraint on " + t->name + " references unknown column " + a);
      for (const auto& q : t->qualityScores)
        if (!cols.count(q.target))
          throw ResolutionError("quality score " + q.name + " targets unknown column " + t->name + "." + q.target);
      name_constraints(*t);
    }
  }
  for (const auto& s : p.statements) {
    if (auto t = std::get_if<CrowdTableDef>(&s)) {
      for (const auto& c : t->constraints) {
        if (c.type != ConstraintType::fkey) continue;
        if (p.feature_table(c.refTable)) throw ResolutionError("foreign key " + c.name + " references a feature table");
        if (auto ref = p.crowd_table(c.refTable); ref && !ref->column(c.refColumn))
          throw ResolutionError("foreign key " + c.name + " references unknown column " + c.refTable + "." + c.refColumn);
      }
    } else if (auto f = std::get_if<FeatureTableDef>(&s)) {
      const auto* ref = p.crowd_table(f->refTable);
      if (!ref) throw ResolutionError("feature table " + f->name + " references unknown table " + f->refTable);
      if (!ref->column(f->refColumn))
        throw ResolutionError("feature table " + f->name + " references unknown column " + f->refTable + "." + f->refColumn);
      std::set<std::string> names{f->key.name};
      for (const auto& fc : f->features)
        if (!names.insert(fc.name).second) throw ResolutionError("duplicate feature " + fc.name + " in " + f->name);
    } else if (auto e = std::get_if<ExplanationDef>(&s)) {
      if (const auto* t = p.crowd_table(e->table)) {
        if (e->constraint.empty())
          throw ResolutionError("explanation on crowd table " + e->table + " must name a constraint with FOR");
        if (!t->constraint(e->constraint))
          throw ResolutionError("explanation references unknown constraint " + e->constraint + " on table " + e->table);
        for (const auto& a : e->attributes)
          if (!t->column(a)) throw ResolutionError("explanation references unknown column " + e->table + "." + a);
      } else if (const auto* f = p.feature_table(e->table)) {
        if (!e->constraint.empty())
          throw ResolutionError("explanation on feature table " + e->table + " cannot name a constraint");
        for (const auto& a : e->attributes)
          if (std::none_of(f->features.begin(), f->features.end(), [&](const FeatureColumn& fc) { return fc.name == a; }))
            throw ResolutionError("explanation references unknown feature " + e->table + "." + a);
      } else {
        throw ResolutionError("explanation references unknown table " + e->table);
      }
    } else if (auto i = std::get_if<InterfaceDef>(&s)) {
      const auto* t = p.crowd_table(i->table);
      if (!t) throw ResolutionError("interface references unknown table " + i->table);
      if (!t->column(i->attribute)) throw ResolutionError("interface references unknown column " + i->table + "." + i->attribute);
      const auto& w = known_widgets();
      if (std::find(w.begin(), w.end(), i->widget) == w.end()) throw ResolutionError("unknown widget \"" + i->widget + "\"");
    }
  }
}

// ---------------------------------------------------------------------------
// Printer

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

void print_crowd(std::ostream& out, const CrowdTableDef& t) {
  std::vector<std::string> items;
  for (const auto& c : t.columns) items.push_back(c.name + " " + to_string(c.type));
  for (const auto& c : t.constraints) {
    std::string s = "CONSTRAINT " + c.name + " ";
    switch (c.type) {
      case ConstraintType::domain: s += "CHECK (" + to_string(*c.check) + ")"; break;
      case ConstraintType::unique: s += "UNIQUE (" + join(c.attributes, ", ") + ")"; break;
      case ConstraintType::pkey: s += "PRIMARY KEY (" + join(c.attributes, ", ") + ")"; break;
      case ConstraintType::fkey:
        s += "FOREIGN KEY (" + c.attributes.front() + ") REFERENCES " + c.refTable + "(" + c.refColumn + ")";
        break;
    }
    items.push_back(s);
  }
  for (const auto& q : t.qualityScores) items.push_back("QUALITY SCORE " + q.name + " " + q.scorer + "(" + q.target + ")");
  out << "CREATE CROWD TABLE " << t.name << " (\n  " << join(items, ",\n  ") << "\n);\n";
}

void print_feature(std::ostream& out, const FeatureTableDef& t) {
  std::vector<std::string> items{t.key.name + " " + to_string(t.key.type) + " PRIMARY KEY REFERENCES " + t.refTable + "." +
                                 t.refColumn};
  for (const auto& f : t.features) items.push_back(f.name + " FEATURE " + f.extractor);
  if (t.elided) items.push_back("...");
  out << "CREATE FEATURE TABLE " << t.name << " (\n  " << join(items, ",\n  ") << "\n);\n";
}

}  // namespace

Program parse_ddl(std::string_view source) {
  Program p = Parser(source).program();
  resolve(p);
  return p;
}

std::string print_ddl(const Program& program) {
  std::ostringstream out;
  for (std::size_t i = 0; i < program.statements.size(); ++i) {
    if (i) out << "\n";
    const auto& s = program.statements[i];
    if (auto t = std::get_if<CrowdTableDef>(&s)) {
      print_crowd(out, *t);
    } else if (auto f = std::get_if<FeatureTableDef>(&s)) {
      print_feature(out, *f);
    } else if (auto e = std::get_if<ExplanationDef>(&s)) {
      out << "CREATE EXPLANATION " << (e->name.empty() ? "" : e->name + " ") << "ON " << e->table << "("
          << join(e->attributes, ", ") << ")" << (e->constraint.empty() ? "" : " FOR " + e->constraint) << " USING "
          << e->explainer << ";\n";
    } else if (auto in = std::get_if<InterfaceDef>(&s)) {
      out << "CREATE INTERFACE ON " << in->table << "(" << in->attribute << ") USING " << quote(in->widget, '"')
          << " FROM " << quote(in->source, '"') << (in->explainer.empty() ? "" : " AND " + in->explainer) << ";\n";
    }
  }
  return out.str();
}

}  // namespace precog::ddl
