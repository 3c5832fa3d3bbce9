#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "precog/ddl.hpp"
#include "precog/text.hpp"

namespace precog::ddl {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Catalog

const std::vector<json>& Catalog::rows(const std::string& table) const {
  static const std::vector<json> kEmpty;
  auto it = tables_.find(table);
  return it == tables_.end() ? kEmpty : it->second;
}

void Catalog::insert(const std::string& table, json row) {
  if (!row.is_object()) throw Error("catalog rows must be JSON objects");
  tables_[table].push_back(std::move(row));
}

std::vector<std::string> Catalog::tables() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : tables_) out.push_back(name);
  return out;
}

Catalog Catalog::load(const std::string& dir) {
  Catalog c;
  if (!fs::is_directory(dir)) throw Error("catalog directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const auto table = f.stem().string();
    c.tables_[table];
    std::istringstream in(read_file(f.string()));
    std::size_t lineNo = 0;
    for (std::string line; std::getline(in, line);) {
      ++lineNo;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        c.insert(table, json::parse(line));
      } catch (const json::exception& e) {
        throw Error(f.string() + ":" + std::to_string(lineNo) + ": " + e.what());
      }
    }
  }
  return c;
}

void Catalog::save(const std::string& dir) const {
  fs::create_directories(dir);
  for (const auto& [table, rows] : tables_) {
    std::ofstream out(fs::path(dir) / (table + ".jsonl"), std::ios::binary);
    for (const auto& r : rows) out << r.dump() << "\n";
    if (!out) throw Error("failed to write catalog table " + table);
  }
}

// ---------------------------------------------------------------------------
// Explainers

namespace {

std::string value_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void collect_bounds(const Expr& e, const std::string& att, bool integral, std::optional<double>& lo,
                    std::optional<double>& hi) {
  if (e.kind == Expr::Kind::land) {
    for (const auto& a : e.args) collect_bounds(*a, att, integral, lo, hi);
    return;
  }
  if (e.kind != Expr::Kind::compare) return;
  const Expr& l = *e.args[0];
  const Expr& r = *e.args[1];
  std::string op = e.text;
  double v;
  if (l.kind == Expr::Kind::column && l.text == att && r.kind == Expr::Kind::number) {
    v = r.number;
  } else if (r.kind == Expr::Kind::column && r.text == att && l.kind == Expr::Kind::number) {
    v = l.number;
    if (op[0] == '<') op[0] = '>';
    else if (op[0] == '>') op[0] = '<';
  } else {
    return;
  }
  auto tighten_lo = [&](double x) { lo = lo ? std::max(*lo, x) : x; };
  auto tighten_hi = [&](double x) { hi = hi ? std::min(*hi, x) : x; };
  if (op == ">") tighten_lo(integral ? std::floor(v) + 1 : v);
  else if (op == ">=") tighten_lo(integral ? std::ceil(v) : v);
  else if (op == "<") tighten_hi(integral ? std::ceil(v) - 1 : v);
  else if (op == "<=") tighten_hi(integral ? std::floor(v) : v);
  else if (op == "=") {
    tighten_lo(v);
    tighten_hi(v);
  }
}

std::string numeric_exp(const ExplainerInput& in) {
  const std::string att = in.values.empty() ? in.constraint.attributes.front() : in.values.front().first;
  if (in.constraint.check) {
    const auto* col = in.table.column(att);
    const bool integral = col && (col->type == ColumnType::integer || col->type == ColumnType::autoincrement);
    std::optional<double> lo, hi;
    collect_bounds(*in.constraint.check, att, integral, lo, hi);
    auto fmt = [](double x) { return json(x == std::floor(x) ? json(static_cast<long long>(x)) : json(x)).dump(); };
    if (lo && hi) return att + " must be between " + fmt(*lo) + " and " + fmt(*hi);
    if (lo) return att + " must be at least " + fmt(*lo);
    if (hi) return att + " must be at most " + fmt(*hi);
  }
  return att + " has an invalid value";
}

std::string unique_exp(const ExplainerInput& in) {
  const auto& [att, val] = in.values.front();
  return att + " '" + value_text(val) + "' is already taken. Please choose another " + att + ".";
}

std::string product_exp(const ExplainerInput& in) {
  const auto& [att, val] = in.values.front();
  return "We could not find '" + value_text(val) + "' in " + in.constraint.refTable +
         ". Please pick one of the suggested entries.";
}

// Three-valued evaluation: nullopt is SQL unknown (a missing value), which never violates.
using Value = std::optional<json>;

Value eval_value(const Expr& e, const json& record) {
  switch (e.kind) {
    case Expr::Kind::column: {
      auto it = record.find(e.text);
      if (it == record.end() || it->is_null()) return std::nullopt;
      return *it;
    }
    case Expr::Kind::number: return json(e.number);
    case Expr::Kind::string: return json(e.text);
    default: throw Error("check expression: boolean used as a value");
  }
}

std::optional<bool> eval(const Expr& e, const json& record) {
  switch (e.kind) {
    case Expr::Kind::land: {
      const auto a = eval(*e.args[0], record), b = eval(*e.args[1], record);
      if ((a && !*a) || (b && !*b)) return false;
      if (!a || !b) return std::nullopt;
      return true;
    }
    case Expr::Kind::lor: {
      const auto a = eval(*e.args[0], record), b = eval(*e.args[1], record);
      if ((a && *a) || (b && *b)) return true;
      if (!a || !b) return std::nullopt;
      return false;
    }
    case Expr::Kind::lnot: {
      const auto a = eval(*e.args[0], record);
      if (!a) return std::nullopt;
      return !*a;
    }
    case Expr::Kind::matches: {
      const auto v = eval_value(*e.args[0], record);
      if (!v) return std::nullopt;
      return std::regex_match(value_text(*v), std::regex(e.text));
    }
    case Expr::Kind::compare: {
      const auto a = eval_value(*e.args[0], record), b = eval_value(*e.args[1], record);
      if (!a || !b) return std::nullopt;
      int cmp;
      if (a->is_number() && b->is_number()) {
        const double x = a->get<double>(), y = b->get<double>();
        cmp = x < y ? -1 : x > y ? 1 : 0;
      } else if (a->is_string() && b->is_string()) {
        const auto c = a->get<std::string>().compare(b->get<std::string>());
        cmp = c < 0 ? -1 : c > 0 ? 1 : 0;
      } else {
        return false;
      }
      const auto& op = e.text;
      if (op == "=") return cmp == 0;
      if (op == "<>") return cmp != 0;
      if (op == "<") return cmp < 0;
      if (op == "<=") return cmp <= 0;
      if (op == ">") return cmp > 0;
      return cmp >= 0;
    }
    default: {
      const auto v = eval_value(e, record);
      if (!v) return std::nullopt;
      if (v->is_boolean()) return v->get<bool>();
      throw Error("check expression: value used as a condition");
    }
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool same_key(const json& a, const json& b, bool caseInsensitive) {
  if (a.is_number() && b.is_number()) return a.get<double>() == b.get<double>();
  if (a.is_string() && b.is_string())
    return caseInsensitive ? lower(a.get<std::string>()) == lower(b.get<std::string>()) : a == b;
  return false;
}

void check_type(const Column& c, const json& v, const std::string& table) {
  const std::string where = table + "." + c.name;
  switch (c.type) {
    case ColumnType::integer:
    case ColumnType::autoincrement:
      if (!v.is_number() || v.get<double>() != std::floor(v.get<double>()))
        throw Error("invalid input for integer column " + where + ": " + v.dump());
      break;
    case ColumnType::real:
      if (!v.is_number()) throw Error("invalid input for real column " + where + ": " + v.dump());
      break;
    case ColumnType::text:
      if (!v.is_string()) throw Error("invalid input for text column " + where + ": " + v.dump());
      break;
  }
}

std::string key_detail(const std::vector<std::string>& atts, const std::vector<json>& vals) {
  std::string a, v;
  for (std::size_t i = 0; i < atts.size(); ++i) {
    a += (i ? ", " : "") + atts[i];
    v += (i ? ", " : "") + value_text(vals[i]);
  }
  return "Key (" + a + ")=(" + v + ")";
}

}  // namespace

ExplainerRegistry builtin_explainers() {
  return {{"numeric_exp", numeric_exp}, {"unique_exp", unique_exp}, {"product_exp", product_exp}};
}

json Violation::to_json() const {
  json j{{"name", constraint},
         {"type", ddl::to_string(type)},
         {"attributes", attributes},
         {"values", values},
         {"generic", genericMessage}};
  if (customMessage) j["custom"] = *customMessage;
  if (interface) j["interface"] = {{"widget", interface->widget}, {"source", interface->source}};
  return j;
}

Validator::Validator(Program program, ExplainerRegistry explainers)
    : program_(std::move(program)), explainers_(std::move(explainers)) {
  for (const auto* e : program_.explanations())
    if (program_.crowd_table(e->table) && !explainers_.count(e->explainer))
      throw ResolutionError("explanation binding uses unregistered explainer " + e->explainer);
}

std::vector<Violation> Validator::validate(const std::string& tableName, const json& record, const Catalog& catalog) const {
  const auto* table = program_.crowd_table(tableName);
  if (!table) throw NotFound("unknown table " + tableName);
  if (!record.is_object()) throw Error("record must be a JSON object");
  for (auto it = record.begin(); it != record.end(); ++it)
    if (!table->column(it.key())) throw Error("unknown attribute " + tableName + "." + it.key());
  for (const auto& c : table->columns) {
    auto it = record.find(c.name);
    if (it == record.end() || it->is_null()) {
      if (c.type != ColumnType::autoincrement) throw Error("missing value for " + tableName + "." + c.name);
      continue;
    }
    check_type(c, *it, tableName);
  }

  std::vector<Violation> out;
  for (const auto& c : table->constraints) {
    std::vector<json> vals;
    bool complete = true;
    for (const auto& a : c.attributes) {
      auto it = record.find(a);
      if (it == record.end() || it->is_null()) {
        complete = false;
        vals.push_back(nullptr);
      } else {
        vals.push_back(*it);
      }
    }

    std::string generic;
    switch (c.type) {
      case ConstraintType::domain: {
        const auto ok = eval(*c.check, record);
        if (ok && !*ok)
          generic = "new row for relation \"" + tableName + "\" violates check constraint \"" + c.name + "\"";
        break;
      }
      case ConstraintType::unique:
      case ConstraintType::pkey: {
        if (!complete) break;
        for (const auto& row : catalog.rows(tableName)) {
          bool same = true;
          for (std::size_t i = 0; i < c.attributes.size() && same; ++i) {
            auto it = row.find(c.attributes[i]);
            same = it != row.end() && same_key(*it, vals[i], false);
          }
          if (same) {
            generic = "duplicate key value violates unique constraint \"" + c.name + "\": " +
                      key_detail(c.attributes, vals) + " already exists.";
            break;
          }
        }
        break;
      }
      case ConstraintType::fkey: {
        if (!complete) break;
        const auto& rows = catalog.rows(c.refTable);
        const bool found = std::any_of(rows.begin(), rows.end(), [&](const json& row) {
          auto it = row.find(c.refColumn);
          return it != row.end() && same_key(*it, vals[0], true);
        });
        if (!found)
          generic = "insert or update on table \"" + tableName + "\" violates foreign key constraint \"" + c.name +
                    "\": " + key_detail(c.attributes, vals) + " is not present in table \"" + c.refTable + "\".";
        break;
      }
    }
    if (generic.empty()) continue;

    Violation v{c.name, c.type, c.attributes, vals, generic, std::nullopt, std::nullopt};
    for (const auto* e : program_.explanations()) {
      if (e->table != tableName || e->constraint != c.name) continue;
      ExplainerInput in{{}, generic, c, *table};
      for (const auto& a : e->attributes.empty() ? c.attributes : e->attributes) {
        auto it = record.find(a);
        in.values.emplace_back(a, it == record.end() ? json(nullptr) : *it);
      }
      v.customMessage = explainers_.at(e->explainer)(in);
    }
    for (const auto* i : program_.interfaces())
      if (i->table == tableName && std::find(c.attributes.begin(), c.attributes.end(), i->attribute) != c.attributes.end())
        v.interface = *i;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace precog::ddl
