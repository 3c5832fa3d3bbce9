#include <filesystem>

#include "doctest.h"
#include "precog/http_api.hpp"
#include "precog/synthetic.hpp"

// after Eigen: <resolv.h> defines a _res macro that collides with Eigen internals
#include "httplib.h"

using namespace precog;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

TrainConfig small_config() {
  TrainConfig c;
  c.trees = 10;
  c.topics = 6;
  c.ldaIterations = 60;
  return c;
}

const LabeledCorpus& corpus() {
  static const auto c = synthetic::planted_corpus(21, 120);
  return c;
}

const Bundle& bundle() {
  static const auto b = train_bundle("laptops", corpus(), small_config());
  return b;
}

std::string temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("precog_test_" + name);
  fs::remove_all(p);
  return p.string();
}

std::string fixture(const std::string& rel) { return read_file(std::string(PRECOG_FIXTURES) + "/" + rel); }

}  // namespace

TEST_CASE("train config json") {
  auto c = small_config();
  c.utility = {{"high", 1.0}, {"low", 0.0}};
  const auto back = TrainConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK_THROWS_AS(TrainConfig::from_json({{"trees", 0}}), Error);
  CHECK_THROWS_AS(TrainConfig::from_json({{"colour", 1}}), Error);
  CHECK_THROWS_AS(TrainConfig::from_json({{"domain", "poems"}}), Error);
}

TEST_CASE("segment models learn the planted rule") {
  const auto& b = bundle();
  CHECK(b.metadata["segAccuracy"].get<double>() >= 0.85);
  CHECK(b.metadata["docAccuracy"].get<double>() >= 0.85);
  CHECK(b.metadata["trainSegments"].get<std::size_t>() > b.metadata["trainDocuments"].get<std::size_t>());
  CHECK(b.registry.size() == 4);
}

TEST_CASE("degenerate corpora are rejected") {
  LabeledCorpus one;
  one.documents = {{"Battery good.", "low", Split::train}, {"Screen bright.", "low", Split::train}};
  CHECK_THROWS_AS(train_bundle("x", one, small_config()), Error);
  auto c = small_config();
  c.utility = {{"high", 1.0}};
  CHECK_THROWS_AS(train_bundle("x", corpus(), c), Error);
}

TEST_CASE("training is deterministic") {
  const auto a = temp_dir("det_a"), b = temp_dir("det_b");
  save_bundle(bundle(), a);
  save_bundle(train_bundle("laptops", corpus(), small_config()), b);
  for (const auto& f : {"manifest.json", "config.json", "lda.json", "resources.json", "doc_model.json", "seg_model.json",
                        "baselines.json"})
    CHECK(read_file(a + "/" + f) == read_file(b + "/" + f));
  const auto loaded = load_bundle(a);
  CHECK(loaded.docModel == bundle().docModel);
  const auto text = synthetic::long_review(4, 120);
  CHECK(get_feedback(loaded, text).dump() == get_feedback(bundle(), text).dump());
}

TEST_CASE("feedback reports") {
  const auto& b = bundle();
  SUBCASE("offsets tile the text") {
    const std::string text = "Ünïcode first. " + synthetic::long_review(9, 200);
    const auto r = get_feedback(b, text);
    std::size_t expect = 0;
    for (const auto& s : r["segments"]) {
      CHECK(s["startChar"].get<std::size_t>() == expect);
      expect = s["endChar"].get<std::size_t>();
    }
    CHECK(expect == codepoint_length(text));
    CHECK(r.dump() == get_feedback(b, text).dump());
  }
  SUBCASE("low quality text gets feedback") {
    const auto r = get_feedback(b, "It is GREAT stuff! Battery good.");
    CHECK(r["docQuality"]["label"] == "low");
    std::size_t items = r["docFeedback"].size();
    for (const auto& s : r["segments"]) items += s["feedback"].size();
    CHECK(items >= 1);
    for (const auto& it : r["docFeedback"]) CHECK(it["score"].get<double>() > 0.0);
  }
  SUBCASE("high quality text gets none") {
    const auto r = get_feedback(b, synthetic::long_review(5, 300));
    CHECK(r["docQuality"]["label"] == "high");
    CHECK(r["docFeedback"].empty());
    for (const auto& s : r["segments"])
      if (s["label"] == "high") CHECK(s["feedback"].empty());
  }
  SUBCASE("empty text") {
    const auto r = get_feedback(b, "   ");
    CHECK(r["degenerate"] == true);
    CHECK(r["segments"].empty());
    CHECK(r["docFeedback"].empty());
  }
}

TEST_CASE("registry from DDL") {
  const auto program = ddl::parse_ddl(fixture("ddl/app.ddl"));
  const auto reg = registry_from_ddl(program, "review_feats", bundle().docModel.schema());
  CHECK(reg.size() == 4);
  const auto& off = reg.by_id(fef_ids::offTopic);
  CHECK(off.boundFeatures.size() == 8);
  CHECK_THROWS_AS(registry_from_ddl(program, "nope", bundle().docModel.schema()), ddl::ResolutionError);

  auto c = small_config();
  c.ddl = fixture("ddl/app.ddl");
  Bundle b = bundle();
  b.config = c;
  b.finalize();
  CHECK(b.registry.name() == "review_feats");
}

TEST_CASE("model store versions") {
  ModelStore store(temp_dir("store"));
  CHECK_THROWS_AS(store.get("laptops"), NotFound);
  CHECK(store.publish(bundle()) == 1);
  CHECK(store.publish(bundle()) == 2);
  CHECK_THROWS_AS(store.publish(bundle(), 2), Error);
  CHECK(store.versions("laptops") == std::vector<int>{1, 2});
  CHECK(store.get("laptops")->version == 2);
  CHECK(store.get("laptops", 1)->version == 1);

  ModelStore reopened(store.root());
  CHECK(reopened.get("laptops")->docModel == bundle().docModel);
  CHECK(reopened.describe()[0]["latest"] == 2);
  Bundle bad = bundle();
  bad.corpus = "../escape";
  CHECK_THROWS_AS(store.publish(bad), Error);
}

TEST_CASE("service handlers") {
  ModelStore store(temp_dir("service"));
  store.publish(bundle());
  Service svc(store, ddl::Validator(ddl::parse_ddl(fixture("ddl/app.ddl"))),
              ddl::Catalog::load(std::string(PRECOG_FIXTURES) + "/catalog"));

  CHECK(svc.feedback(R"({"corpus":"laptops","text":"Battery good."})").status == 200);
  CHECK(svc.feedback(R"({"corpus":"nope","text":"x"})").status == 404);
  CHECK(svc.feedback(R"({"corpus":"nope","text":"x")").status == 400);
  CHECK(svc.feedback(R"({"text":"x"})").status == 400);

  const auto v = svc.validate(
      R"({"table":"reviews","record":{"user_id":1,"product_id":"Zenith Pro 14","rating":7,"review":"ok"}})");
  REQUIRE(v.status == 200);
  REQUIRE(v.body["violations"].size() == 1);
  CHECK(v.body["violations"][0]["name"] == "reviews_rating_domain");
  CHECK(v.body["violations"][0]["custom"] == "rating must be between 1 and 5");
  CHECK(svc.validate(R"({"table":"reviews","record":{"bogus":1}})").status == 400);
  CHECK(svc.validate(R"({"table":"nope","record":{}})").status == 404);

  json docs = json::array();
  for (const auto& d : synthetic::planted_corpus(3, 40).documents) docs.push_back({{"text", d.text}, {"label", d.label}});
  const auto t = svc.train(json{{"corpus", "phones"}, {"documents", docs}, {"params", {{"trees", 5}, {"ldaIterations", 20}}}}.dump());
  REQUIRE(t.status == 202);
  svc.wait_idle();
  const auto job = svc.job(t.body["job"]);
  CHECK(job.body["status"] == "succeeded");
  CHECK(job.body["bundle"] == "phones/v1");
  CHECK(svc.job("job-999").status == 404);
  CHECK(svc.models().body["models"].size() == 2);

  const auto bad = svc.train(json{{"corpus", "solo"}, {"documents", json::array({{{"text", "a"}, {"label", "low"}}})}}.dump());
  REQUIRE(bad.status == 202);
  svc.wait_idle();
  CHECK(svc.job(bad.body["job"]).body["status"] == "failed");
}

TEST_CASE("http round trip") {
  ModelStore store(temp_dir("http"));
  store.publish(bundle());
  Service svc(store);
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  server.start();
  httplib::Client client("127.0.0.1", port);
  const std::string body = json{{"corpus", "laptops"}, {"text", synthetic::long_review(2, 150)}}.dump();
  const auto a = client.Post("/feedback", body, "application/json");
  const auto b = client.Post("/feedback", body, "application/json");
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->status == 200);
  CHECK(a->body == b->body);
  const auto missing = client.Post("/feedback", R"({"corpus":"nope","text":""})", "application/json");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body).contains("error"));
  CHECK(client.Post("/validate", "{}", "application/json")->status == 503);
  CHECK(client.Get("/models")->status == 200);
  server.stop();
}
