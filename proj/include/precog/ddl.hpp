#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "precog/common.hpp"

namespace precog::ddl {

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

/// A definition refers to something that does not exist or is declared twice.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Check expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { column, number, string, compare, matches, land, lor, lnot };
  Kind kind = Kind::number;
  std::string text;  // column name, string literal, comparison operator or regex
  double number = 0.0;
  std::vector<ExprPtr> args;
};

std::string to_string(const Expr& e);

/// Columns referenced by the expression, in first-occurrence order.
std::vector<std::string> referenced_columns(const Expr& e);

// ---------------------------------------------------------------------------
// Definitions

enum class ColumnType { integer, real, text, autoincrement };
std::string to_string(ColumnType t);

struct Column {
  std::string name;
  ColumnType type = ColumnType::text;
};

enum class ConstraintType { domain, unique, fkey, pkey };
std::string to_string(ConstraintType t);

struct Constraint {
  std::string name;
  ConstraintType type = ConstraintType::domain;
  std::vector<std::string> attributes;
  ExprPtr check;             // domain
  std::string refTable;      // fkey
  std::string refColumn;     // fkey
};

struct QualityScore {
  std::string name;
  std::string scorer;
  std::string target;
};

struct CrowdTableDef {
  std::string name;
  std::vector<Column> columns;
  std::vector<Constraint> constraints;  // declaration order
  std::vector<QualityScore> qualityScores;

  const Column* column(const std::string& name) const;
  const Constraint* constraint(const std::string& name) const;
};

struct FeatureColumn {
  std::string name;
  std::string extractor;
};

struct FeatureTableDef {
  std::string name;
  Column key;
  std::string refTable;
  std::string refColumn;
  std::vector<FeatureColumn> features;
  bool elided = false;  // the definition ends with "..."
};

struct ExplanationDef {
  std::string name;  // optional
  std::string table;
  std::vector<std::string> attributes;
  std::string constraint;  // empty for feature-table bindings
  std::string explainer;
};

struct InterfaceDef {
  std::string table;
  std::string attribute;
  std::string widget;
  std::string source;
  std::string explainer;
};

using Statement = std::variant<CrowdTableDef, FeatureTableDef, ExplanationDef, InterfaceDef>;

struct Program {
  std::vector<Statement> statements;

  const CrowdTableDef* crowd_table(const std::string& name) const;
  const FeatureTableDef* feature_table(const std::string& name) const;
  std::vector<const ExplanationDef*> explanations() const;
  std::vector<const InterfaceDef*> interfaces() const;
};

inline const std::vector<std::string>& known_widgets() {
  static const std::vector<std::string> kWidgets{"stars", "slider", "autocomplete", "textarea", "segment_highlighter"};
  return kWidgets;
}

/// Parses and resolves a DDL source. Unnamed constraints are named <table>_<attribute>_<type>.
/// Foreign keys may point at tables the source does not declare (external base relations).
Program parse_ddl(std::string_view source);

/// Canonical form: every constraint explicit and named at table level.
std::string print_ddl(const Program& program);

// ---------------------------------------------------------------------------
// Validation

/// In-memory table store; each table persists as <dir>/<table>.jsonl.
class Catalog {
 public:
  const std::vector<nlohmann::json>& rows(const std::string& table) const;
  void insert(const std::string& table, nlohmann::json row);
  std::vector<std::string> tables() const;

  static Catalog load(const std::string& dir);
  void save(const std::string& dir) const;

 private:
  std::map<std::string, std::vector<nlohmann::json>> tables_;
};

struct ExplainerInput {
  std::vector<std::pair<std::string, nlohmann::json>> values;  // attribute, offending value
  std::string genericMessage;
  const Constraint& constraint;
  const CrowdTableDef& table;
};

using Explainer = std::function<std::string(const ExplainerInput&)>;
using ExplainerRegistry = std::map<std::string, Explainer>;

/// numeric_exp, unique_exp and product_exp.
ExplainerRegistry builtin_explainers();

struct Violation {
  std::string constraint;
  ConstraintType type = ConstraintType::domain;
  std::vector<std::string> attributes;
  std::vector<nlohmann::json> values;
  std::string genericMessage;
  std::optional<std::string> customMessage;
  std::optional<InterfaceDef> interface;

  nlohmann::json to_json() const;
};

class Validator {
 public:
  explicit Validator(Program program, ExplainerRegistry explainers = builtin_explainers());

  const Program& program() const { return program_; }

  /// Every violated constraint in declaration order. Throws Error for unknown tables,
  /// unknown attributes, missing values and ill-typed values.
  std::vector<Violation> validate(const std::string& table, const nlohmann::json& record, const Catalog& catalog) const;

 private:
  Program program_;
  ExplainerRegistry explainers_;
};

}  // namespace precog::ddl
