#include <filesystem>

#include "doctest.h"
#include "precog/ddl.hpp"
#include "precog/text.hpp"

using namespace precog;
using namespace precog::ddl;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) { return read_file(std::string(PRECOG_FIXTURES) + "/ddl/" + name); }

std::string sample_schema() { return fixture("tables.ddl") + fixture("explanations.ddl") + fixture("interfaces.ddl"); }

Catalog catalog() { return Catalog::load(std::string(PRECOG_FIXTURES) + "/catalog"); }

json review(int rating, std::string product = "Zenith Pro 14") {
  return {{"user_id", 1}, {"product_id", product}, {"rating", rating}, {"review", "Fine."}};
}

}  // namespace

TEST_CASE("sample schema parses") {
  const auto p = parse_ddl(sample_schema());
  const auto* reviews = p.crowd_table("reviews");
  REQUIRE(reviews);
  CHECK(reviews->columns.size() == 4);
  CHECK(reviews->qualityScores.size() == 1);
  CHECK(reviews->qualityScores[0].scorer == "qual_udf");
  REQUIRE(reviews->constraint("reviews_rating_domain"));
  REQUIRE(reviews->constraint("reviews_product_id_fkey"));
  CHECK(reviews->constraint("reviews_product_id_fkey")->refTable == "products");
  CHECK(reviews->constraint("reviews_id_pkey"));

  const auto* users = p.crowd_table("users");
  REQUIRE(users);
  CHECK(users->constraint("users_username_unique"));
  CHECK(users->constraint("users_age_domain"));
  CHECK(users->constraint("users_username_domain"));
  CHECK(users->constraint("users_username_domain")->check->kind == Expr::Kind::matches);
  CHECK(users->constraint("users_username_domain")->check->text == "\\w+");

  const auto* feats = p.feature_table("review_feats");
  REQUIRE(feats);
  CHECK(feats->elided);
  CHECK(feats->features.size() == 2);
  CHECK(feats->features[1].extractor == "len_extracton");
  CHECK(p.explanations().size() == 2);
  REQUIRE(p.interfaces().size() == 2);
  CHECK(p.interfaces()[0]->widget == "stars");
}

TEST_CASE("printer round trip is a fixpoint") {
  for (const auto& src : {sample_schema(), fixture("app.ddl")}) {
    const auto once = print_ddl(parse_ddl(src));
    CHECK(print_ddl(parse_ddl(once)) == once);
  }
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_ddl("CREATE CROWD TABLE t (");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 23);
    CHECK(std::string(e.what()).find("end of input") != std::string::npos);
  }
  try {
    parse_ddl("CREATE CROWD TABLE t (\n  a int CHECK a >,\n)");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_ddl("DROP TABLE t;"), SyntaxError);
  CHECK_THROWS_AS(parse_ddl("CREATE CROWD TABLE t (a blob);"), SyntaxError);
  CHECK_THROWS_AS(parse_ddl("CREATE CROWD TABLE t (a text CHECK a = 'x);"), SyntaxError);
}

TEST_CASE("resolution errors") {
  CHECK_THROWS_AS(parse_ddl("CREATE CROWD TABLE t (a int); CREATE CROWD TABLE t (b int);"), ResolutionError);
  CHECK_THROWS_AS(parse_ddl("CREATE CROWD TABLE t (a int, a text);"), ResolutionError);
  CHECK_THROWS_AS(parse_ddl("CREATE CROWD TABLE t (a int, CHECK(b > 0));"), ResolutionError);
  try {
    parse_ddl("CREATE CROWD TABLE t (a int); CREATE EXPLANATION ON t(a) FOR t_a_nothing USING numeric_exp;");
    FAIL("expected a resolution error");
  } catch (const ResolutionError& e) {
    CHECK(std::string(e.what()).find("t_a_nothing") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_ddl("CREATE CROWD TABLE t (a int); CREATE INTERFACE ON t(a) USING \"dial\" FROM \"x.js\";"),
                  ResolutionError);
  CHECK_THROWS_AS(parse_ddl("CREATE FEATURE TABLE f (r text primary key references nope.r, x FEATURE y);"),
                  ResolutionError);
  // a foreign key to an undeclared relation is allowed
  CHECK_NOTHROW(parse_ddl("CREATE CROWD TABLE t (a text, FOREIGN KEY a REF elsewhere(id));"));
}

TEST_CASE("auto names stay unique") {
  const auto p = parse_ddl("CREATE CROWD TABLE t (a int CHECK a > 0, CHECK(a < 9), CONSTRAINT mine CHECK (a <> 4));");
  const auto& c = p.crowd_table("t")->constraints;
  REQUIRE(c.size() == 3);
  CHECK(c[0].name == "t_a_domain");
  CHECK(c[1].name == "t_a_domain_2");
  CHECK(c[2].name == "mine");
}

TEST_CASE("rating 7 violates the domain constraint") {
  const Validator v(parse_ddl(sample_schema()));
  auto record = review(7);
  record.erase("user_id");
  const auto out = v.validate("reviews", record, catalog());
  REQUIRE(out.size() == 1);
  CHECK(out[0].constraint == "reviews_rating_domain");
  CHECK(out[0].genericMessage == "new row for relation \"reviews\" violates check constraint \"reviews_rating_domain\"");
  REQUIRE(out[0].customMessage);
  CHECK(*out[0].customMessage == "rating must be between 1 and 5");
  REQUIRE(out[0].interface);
  CHECK(out[0].interface->widget == "stars");
}

TEST_CASE("validation against the application schema") {
  const Validator v(parse_ddl(fixture("app.ddl")));
  const auto cat = catalog();
  CHECK(v.validate("reviews", review(5), cat).empty());
  CHECK(v.validate("reviews", review(3, "zenith pro 14"), cat).empty());

  SUBCASE("duplicate username") {
    const auto out = v.validate("users", {{"username", "bob"}, {"age", 30}}, cat);
    REQUIRE(out.size() == 1);
    CHECK(out[0].constraint == "users_username_unique");
    CHECK(out[0].genericMessage.starts_with("duplicate key value violates unique constraint \"users_username_unique\""));
    CHECK(*out[0].customMessage == "username 'bob' is already taken. Please choose another username.");
  }
  SUBCASE("every violated constraint is reported in declaration order") {
    const auto out = v.validate("users", {{"username", "bob smith"}, {"age", 0}}, cat);
    REQUIRE(out.size() == 2);
    CHECK(out[0].constraint == "users_age_domain");
    CHECK(*out[0].customMessage == "age must be between 1 and 99");
    CHECK(out[1].constraint == "users_username_domain");
    CHECK_FALSE(out[1].customMessage);

    const auto three = v.validate("reviews", {{"user_id", 99}, {"product_id", "Nope"}, {"rating", 0}, {"review", ""}}, cat);
    REQUIRE(three.size() == 3);
    CHECK(three[0].constraint == "reviews_rating_domain");
    CHECK(three[1].constraint == "reviews_product_id_fkey");
    CHECK(three[1].customMessage->find("Nope") != std::string::npos);
    CHECK(three[2].constraint == "reviews_user_id_fkey");
  }
  SUBCASE("explicit primary key collision") {
    const auto out = v.validate("users", {{"id", 1}, {"username", "carol"}, {"age", 30}}, cat);
    REQUIRE(out.size() == 1);
    CHECK(out[0].constraint == "users_id_pkey");
  }
  SUBCASE("errors distinct from violations") {
    CHECK_THROWS_AS(v.validate("reviews", {{"rating", 3}, {"colour", "red"}}, cat), Error);
    CHECK_THROWS_AS(v.validate("reviews", {{"rating", 3}}, cat), Error);
    auto bad = review(3);
    bad["rating"] = "five";
    CHECK_THROWS_AS(v.validate("reviews", bad, cat), Error);
    CHECK_THROWS_AS(v.validate("nope", json::object(), cat), NotFound);
  }
  SUBCASE("violation json") {
    const auto j = v.validate("reviews", review(9), cat)[0].to_json();
    CHECK(j["name"] == "reviews_rating_domain");
    CHECK(j["custom"] == "rating must be between 1 and 5");
    CHECK(j["generic"].is_string());
  }
}

TEST_CASE("catalog persistence") {
  Catalog c;
  c.insert("t", {{"a", 1}});
  c.insert("t", {{"a", 2}});
  const std::string dir = (std::filesystem::temp_directory_path() / "precog_catalog_roundtrip").string();
  c.save(dir);
  const auto back = Catalog::load(dir);
  CHECK(back.rows("t").size() == 2);
  CHECK(back.rows("missing").empty());
  CHECK_THROWS_AS(c.insert("t", json::array()), Error);
}

TEST_CASE("unregistered explainer is rejected") {
  CHECK_THROWS_AS(Validator(parse_ddl("CREATE CROWD TABLE t (a int CHECK a > 0);"
                                      "CREATE EXPLANATION ON t(a) FOR t_a_domain USING mystery;")),
                  ResolutionError);
}
