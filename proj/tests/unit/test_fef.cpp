#include "doctest.h"
#include "worked_example.hpp"
#include "precog/fef.hpp"
#include "precog/tcruise.hpp"

using namespace precog;

namespace {

FefGenerator echo(std::string s) {
  return [s](const FefInput&) -> std::optional<std::string> { return s; };
}

FeatureSchema text_schema() {
  const auto& names = text_feature_names();
  Matrix rows = Matrix::Zero(2, static_cast<Eigen::Index>(names.size()));
  rows.row(1).setOnes();
  return FeatureSchema::fit(names, rows);
}

FeatureResources tiny_resources() {
  std::vector<std::vector<std::string>> high{{"battery", "screen", "zoom"}, {"battery", "screen", "lens"}};
  std::vector<std::vector<std::string>> low{{"bad", "meh"}, {"stuff", "meh"}};
  auto all = high;
  all.insert(all.end(), low.begin(), low.end());
  LdaParams p;
  p.K = 2;
  p.iterations = 20;
  auto lda = std::make_shared<LdaModel>(fit_lda(all, p));
  ResourceParams rp;
  rp.jargonMinSupport = 0.5;
  return build_resources(high, low, lda, {}, {}, rp);
}

}  // namespace

TEST_CASE("score_fefs on the worked example") {
  const auto model = worked::model();
  const auto r = feature_responsibility(worked::point(), model, worked::config());
  FefRegistry reg("t", {{1, "emotionOnly", {worked::kEmotion}, echo("a")}, {2, "both", {worked::kLen, worked::kEmotion}, echo("b")}},
                  2);
  const auto scores = score_fefs(r.raw, reg.binding(), 2, 0.0);
  REQUIRE(scores.size() == 2);
  CHECK(scores[0].fefId == 1);
  CHECK(scores[0].score == doctest::Approx(0.10547).epsilon(1e-4));
  CHECK(scores[1].score == doctest::Approx((0.10547 + 0.05547) / 2).epsilon(1e-4));
  CHECK(score_fefs(r.raw, reg.binding(), 1, 0.0).size() == 1);
  CHECK(score_fefs(r.raw, reg.binding(), 10, 0.0).size() == 2);
}

TEST_CASE("score_fefs edge cases") {
  FefRegistry reg("t", {{2, "b", {0}, echo("b")}, {1, "a", {1}, echo("a")}}, 2);
  CHECK(score_fefs(Vector::Zero(2), reg.binding(), 2, 0.0).empty());
  const auto tie = score_fefs(Vector::Ones(2), reg.binding(), 2, 0.0);
  REQUIRE(tie.size() == 2);
  CHECK(tie[0].fefId == 1);
  CHECK(score_fefs(Vector::Ones(0), FefRegistry("e", {}, 0).binding(), 2, 0.0).empty());
  CHECK_THROWS_AS(score_fefs(Vector::Ones(3), reg.binding(), 2, 0.0), Error);
  CHECK_THROWS_AS(score_fefs(Vector::Ones(2), reg.binding(), 0, 0.0), Error);
}

TEST_CASE("scoring ranking is scale invariant") {
  Rng rng(8);
  std::vector<Fef> fefs;
  for (int j = 0; j < 6; ++j) {
    Fef f{j + 1, "f" + std::to_string(j), {}, echo("x")};
    for (std::size_t i = 0; i < 8; ++i)
      if (rng.uniform() < 0.4) f.boundFeatures.push_back(i);
    if (f.boundFeatures.empty()) f.boundFeatures.push_back(static_cast<std::size_t>(j));
    fefs.push_back(f);
  }
  FefRegistry reg("r", fefs, 8);
  for (int trial = 0; trial < 50; ++trial) {
    Vector s(8);
    for (int i = 0; i < 8; ++i) s[i] = rng.uniform(-2, 2);
    const auto a = score_fefs(s, reg.binding(), 6, 0.0);
    const auto b = score_fefs(3.5 * s, reg.binding(), 6, 0.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].fefId == b[i].fefId);
      CHECK(a[i].score > 0.0);
    }
  }
}

TEST_CASE("registry validation") {
  CHECK_THROWS_AS(FefRegistry("r", {{1, "a", {}, echo("a")}}, 2), Error);
  CHECK_THROWS_AS(FefRegistry("r", {{1, "a", {5}, echo("a")}}, 2), Error);
  CHECK_THROWS_AS(FefRegistry("r", {{1, "a", {0}, echo("a")}, {1, "b", {1}, echo("b")}}, 2), Error);
  const FefRegistry reg("r", {{1, "a", {1, 0, 1}, echo("a")}}, 2);
  CHECK(reg.fefs()[0].boundFeatures == std::vector<std::size_t>{0, 1});
  CHECK(reg.binding().A.sum() == 2.0);
  CHECK_THROWS_AS(reg.by_id(9), NotFound);
}

TEST_CASE("builtin registries") {
  const auto schema = text_schema();
  const auto reviews = builtin_registry(Domain::reviews, schema);
  const auto profiles = builtin_registry(Domain::profiles, schema);
  CHECK(reviews.size() == 4);
  CHECK(profiles.size() == 4);
  int shared = 0;
  for (int id : reviews.binding().ids)
    shared += static_cast<int>(std::count(profiles.binding().ids.begin(), profiles.binding().ids.end(), id));
  CHECK(shared == 3);
  const auto& friendly = profiles.by_id(fef_ids::friendliness);
  CHECK(friendly.boundFeatures == std::vector<std::size_t>{*schema.index_of("social_ratio"), *schema.index_of("inclusive_ratio")});
  for (const auto& f : reviews.fefs())
    CHECK((reviews.binding().A.row(static_cast<Eigen::Index>(&f - &reviews.fefs()[0])).sum()) ==
          static_cast<double>(f.boundFeatures.size()));
}

TEST_CASE("generators") {
  const auto res = tiny_resources();
  const FeatureVector v = Vector::Zero(3);
  const Vector bound = Vector::Zero(1);
  const auto detail = builtin_generator("notEnoughDetail")({bound, v, "It is ok.", res});
  REQUIRE(detail);
  CHECK(detail->starts_with("Try adding information about: "));
  CHECK(detail->find("battery") != std::string::npos);
  const auto topics = builtin_generator("offTopic")({bound, v, "It is ok.", res});
  REQUIRE(topics);
  CHECK(topics->starts_with("Try discussing some of these topics: "));
  CHECK(*builtin_generator("subjectivity")({bound, v, "", res}) == "Please make your writing more balanced and neutral");
  CHECK_THROWS_AS(builtin_generator("nope"), NotFound);
  const auto all = builtin_generator("notEnoughDetail")({bound, v, "battery screen zoom lens", res});
  CHECK_FALSE(all);
}

TEST_CASE("generate_feedback") {
  const auto res = tiny_resources();
  FefRegistry reg("r",
                  {{1, "ok", {0}, echo("first")},
                   {2, "boom", {1}, [](const FefInput&) -> std::optional<std::string> { throw Error("broken"); }},
                   {3, "silent", {2}, [](const FefInput&) -> std::optional<std::string> { return std::nullopt; }}},
                  3);
  Vector s(3);
  s << 1.0, 2.0, 3.0;
  std::vector<ScopeInput> scopes{{-1, "doc", Vector::Zero(3), true, s}, {0, "seg", Vector::Zero(3), false, s}};
  const auto out = generate_feedback(scopes, reg, res, {3, 0.0});
  REQUIRE(out.items.size() == 1);
  CHECK(out.items[0].text == "first");
  CHECK(out.items[0].scope == -1);
  CHECK(out.diagnostics.size() == 1);

  scopes[0].lowQuality = false;
  CHECK(generate_feedback(scopes, reg, res).items.empty());
}
