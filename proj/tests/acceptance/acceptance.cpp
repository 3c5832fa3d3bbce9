// Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "worked_example.hpp"
#include "precog/ddl.hpp"
#include "precog/features.hpp"
#include "precog/http_api.hpp"
#include "precog/oracle.hpp"
#include "precog/synthetic.hpp"

// after Eigen: <resolv.h> defines a _res macro that collides with Eigen internals
#include "httplib.h"

using namespace precog;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::ostringstream line;
  line << (o.pass ? "PASS " : "FAIL ") << name << " [" << std::fixed;
  line.precision(3);
  line << secs << "s] " << o.detail;
  std::cout << line.str() << std::endl;
}

void info(const std::string& text) { std::cout << "     " << text << std::endl; }

std::string fixture(const std::string& rel) { return read_file(std::string(PRECOG_FIXTURES) + "/" + rel); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ImpactConfig matched_confidence() {
  ImpactConfig cfg;
  cfg.confidence = ConfidenceSource::forestMajority;
  return cfg;
}

// Instances shared by the oracle suites so the linear-scan check sees all of them.
struct OracleInstance {
  RandomForest model;
  FeatureVector d;
};

std::vector<OracleInstance> oracle_instances(std::uint64_t seed, std::size_t count,
                                             const std::function<RandomForestSpec(std::size_t)>& spec) {
  Rng rng(seed);
  std::vector<OracleInstance> out;
  while (out.size() < count) {
    auto model = random_forest(rng, spec(out.size()));
    if (auto d = random_low_point(rng, model)) out.push_back({std::move(model), *d});
  }
  return out;
}

bool is_strict_subset(const std::vector<int>& a, const std::vector<int>& b) {
  return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// TCruise sums, dropping any feature-set group beaten by a group on a strictly smaller set.
Vector undominated_responsibility(const OracleInstance& in, const ImpactConfig& cfg) {
  Vector s = Vector::Zero(in.d.size());
  const auto groups = maximal_impact_paths(in.d, 0, in.model, cfg);
  for (const auto& g : groups) {
    const auto fs = g.perturbation.features();
    const bool dominated = std::any_of(groups.begin(), groups.end(), [&](const ImpactPath& h) {
      return is_strict_subset(h.perturbation.features(), fs) && h.impact >= g.impact;
    });
    if (!dominated)
      for (int f : fs) s[f] += g.impact;
  }
  return s;
}

std::vector<Itemset> brute_force_itemsets(const std::vector<std::set<std::string>>& tx, double minSupport,
                                          std::size_t maxSize, const std::vector<std::string>& vocab) {
  std::vector<Itemset> out;
  for (std::uint32_t mask = 1; mask < (1u << vocab.size()); ++mask) {
    std::vector<std::string> terms;
    for (std::size_t w = 0; w < vocab.size(); ++w)
      if (mask & (1u << w)) terms.push_back(vocab[w]);
    if (terms.size() > maxSize) continue;
    std::size_t c = 0;
    for (const auto& t : tx)
      c += std::all_of(terms.begin(), terms.end(), [&](const std::string& s) { return t.count(s) > 0; });
    const double support = static_cast<double>(c) / static_cast<double>(tx.size());
    if (c > 0 && support >= minSupport - 1e-12) out.push_back({terms, support});
  }
  std::sort(out.begin(), out.end(), [](const Itemset& a, const Itemset& b) {
    return a.terms.size() != b.terms.size() ? a.terms.size() < b.terms.size() : a.terms < b.terms;
  });
  return out;
}

const std::vector<std::string> kCars{"engine", "wheel", "brake", "tire", "gear", "piston", "clutch", "axle"};
const std::vector<std::string> kBaking{"flour", "sugar", "oven", "dough", "butter", "yeast", "whisk", "bake"};

std::vector<std::string> words(Rng& rng, const std::vector<std::string>& vocab, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(vocab[rng.below(vocab.size())]);
  return out;
}

}  // namespace

int main() {
  std::cout << "precog acceptance suite" << std::endl;

  criterion("worked-example responsibilities", [] {
    const auto t0 = Clock::now();
    const auto model = worked::model();
    const auto d = worked::point();
    const auto cfg = worked::config();
    const double blue = 1.0 / std::sqrt(325.0);
    const auto paths = maximal_impact_paths(d, 0, model, cfg);
    const auto r = feature_responsibility(d, model, cfg).raw;
    const double secs = seconds_since(t0);
    bool ok = paths.size() == 2 && secs < 1.0;
    if (ok) {
      ok = std::abs(paths[0].impact - blue) < 1e-6 && std::abs(paths[1].impact - 0.05) < 1e-6;
      ok = ok && std::abs(r[worked::kEmotion] - 0.10547) < 1e-5 && std::abs(r[worked::kLen] - 0.05547) < 1e-5;
      ok = ok && std::abs(r[worked::kEmotion] - (0.05 + blue)) < 1e-6 && std::abs(r[worked::kLen] - blue) < 1e-6;
    }
    std::ostringstream s;
    s.precision(6);
    s << "S_emotion=" << r[worked::kEmotion] << " S_len=" << r[worked::kLen] << " paths=" << paths.size();
    return Outcome{ok, s.str()};
  });

  const auto cfg = matched_confidence();
  const auto single = oracle_instances(4242, 200, [](std::size_t i) {
    RandomForestSpec s;
    s.features = 2 + i % 4;
    s.trees = 1;
    s.maxDepth = 1 + static_cast<int>(i % 4);
    return s;
  });
  const auto pairs = oracle_instances(777, 100, [](std::size_t i) {
    RandomForestSpec s;
    s.features = 3 + i % 3;
    s.trees = 2;
    s.maxDepth = 3;
    return s;
  });

  criterion("single-tree oracle equality", [&] {
    const auto t0 = Clock::now();
    std::size_t equal = 0, undominatedEqual = 0, heuristicAbove = 0;
    for (const auto& in : single) {
      const Vector exact = oracle_responsibility(in.d, in.model, cfg);
      const Vector heuristic = feature_responsibility(in.d, in.model, cfg).raw;
      equal += (exact - heuristic).cwiseAbs().maxCoeff() <= 1e-9;
      undominatedEqual += (exact - undominated_responsibility(in, cfg)).cwiseAbs().maxCoeff() <= 1e-9;
      heuristicAbove += (heuristic - exact).minCoeff() >= -1e-9;
    }
    const double secs = seconds_since(t0);
    info("diagnostic: oracle equals TCruise with dominated feature-set groups removed on " +
         std::to_string(undominatedEqual) + "/" + std::to_string(single.size()) + "; TCruise >= oracle coordinatewise on " +
         std::to_string(heuristicAbove) + "/" + std::to_string(single.size()));
    return Outcome{equal == single.size() && secs < 30.0,
                   "equal within 1e-9 on " + std::to_string(equal) + "/" + std::to_string(single.size())};
  });

  criterion("oracle dominance on two-tree forests", [&] {
    std::size_t checked = 0, violations = 0;
    for (const auto& in : pairs)
      for (std::size_t t = 0; t < in.model.trees().size(); ++t)
        for (const auto& ip : maximal_impact_paths(in.d, t, in.model, cfg)) {
          ++checked;
          violations += ip.impact > exact_max_influence(in.d, ip.perturbation.features(), in.model, cfg).impact + 1e-9;
        }
    const auto report = agreement_report(100, 777, RandomForestSpec{}, cfg);
    info("agreement report: " + report.to_json().dump());
    return Outcome{violations == 0 && checked > 0,
                   std::to_string(checked) + " path perturbations, " + std::to_string(violations) + " above the oracle"};
  });

  criterion("linear-scan bound", [&] {
    std::size_t instances = 0, breaches = 0, maxEval = 0;
    for (const auto* suite : {&single, &pairs})
      for (const auto& in : *suite) {
        ScanStats stats;
        feature_responsibility(in.d, in.model, cfg, &stats);
        ++instances;
        breaches += stats.impactEvaluations > stats.improvingPaths;
        maxEval = std::max(maxEval, stats.impactEvaluations);
      }
    return Outcome{breaches == 0, std::to_string(instances) + " instances, max " + std::to_string(maxEval) +
                                      " impact evaluations, " + std::to_string(breaches) + " above improving paths"};
  });

  criterion("apriori equals brute force", [] {
    Rng rng(31);
    std::size_t mismatches = 0, sets = 0;
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::string> vocab;
      const std::size_t v = 3 + rng.below(10);
      for (std::size_t w = 0; w < v; ++w) vocab.push_back("t" + std::to_string(w));
      std::sort(vocab.begin(), vocab.end());
      std::vector<std::set<std::string>> tx(5 + rng.below(40));
      for (auto& t : tx)
        for (const auto& w : vocab)
          if (rng.uniform() < 0.4) t.insert(w);
      const double support = 0.05 + 0.5 * rng.uniform();
      const std::size_t maxSize = 1 + rng.below(v);
      const auto got = mine_jargon(tx, support, maxSize);
      const auto want = brute_force_itemsets(tx, support, maxSize, vocab);
      sets += want.size();
      bool same = got.size() == want.size();
      for (std::size_t i = 0; same && i < got.size(); ++i)
        same = got[i].terms == want[i].terms && got[i].support == want[i].support;
      mismatches += !same;
    }
    return Outcome{mismatches == 0, "50 corpora, " + std::to_string(sets) + " frequent sets, " +
                                        std::to_string(mismatches) + " mismatching corpora"};
  });

  criterion("readability of the pangram", [] {
    const auto r = readability_scores("The quick brown fox jumps over the lazy dog.");
    // 35 letters, 9 words, 1 sentence
    const double ari = 1.3866666666667, cli = 3.7777777777778;
    std::ostringstream s;
    s.precision(9);
    s << "ARI=" << r.ari << " CLI=" << r.colemanLiau;
    return Outcome{std::abs(r.ari - ari) < 1e-6 && std::abs(r.colemanLiau - cli) < 1e-6, s.str()};
  });

  criterion("topic segmentation recovery", [] {
    Rng rng(58);
    std::vector<std::vector<std::string>> docs;
    for (int d = 0; d < 60; ++d) docs.push_back(words(rng, d % 2 ? kBaking : kCars, 25));
    LdaParams p;
    p.K = 2;
    p.iterations = 100;
    const auto lda = fit_lda(docs, p);
    int hits = 0;
    bool perfectZero = true;
    for (int i = 0; i < 50; ++i) {
      const auto gold = i % 2 ? synthetic::two_topic_document(rng, kCars, kBaking)
                              : synthetic::two_topic_document(rng, kBaking, kCars);
      const auto segs = topictiling_segment(gold.text, lda);
      hits += segs.size() == 2 && std::abs(static_cast<int>(segs[1].firstSentence) - 5) <= 1;
      perfectZero = perfectZero && window_diff(gold.reference, gold.reference, 10,
                                               default_window_diff_k(gold.reference, 10)) == 0.0;
    }
    return Outcome{hits >= 45 && perfectZero, std::to_string(hits) + "/50 documents with one boundary within 1 sentence; " +
                                                  "perfect WindowDiff " + (perfectZero ? "0" : "nonzero")};
  });

  criterion("topic model sanity", [] {
    Rng rng(12);
    std::vector<std::vector<std::string>> docs;
    for (int d = 0; d < 80; ++d) docs.push_back(words(rng, d < 40 ? kCars : kBaking, 20));
    LdaParams p;
    p.K = 2;
    p.iterations = 100;
    const auto m = fit_lda(docs, p);
    double worst = 0.0;
    for (int k = 0; k < m.K; ++k) worst = std::max(worst, std::abs(m.topicTerm.row(k).sum() - 1.0));
    std::vector<Eigen::Index> top;
    for (const auto& d : docs) {
      const auto inf = infer_topic_dist(m, d);
      worst = std::max(worst, std::abs(inf.dist.sum() - 1.0));
      Eigen::Index i;
      inf.dist.maxCoeff(&i);
      top.push_back(i);
    }
    int agree = 0;
    for (std::size_t d = 0; d < docs.size(); ++d) agree += (top[d] == top[0]) == (d < 40);
    const int recovered = std::max(agree, 80 - agree);
    std::ostringstream s;
    s << "max |sum-1|=" << worst << ", recovery " << recovered << "/80";
    return Outcome{worst <= 1e-9 && recovered >= 72, s.str()};
  });

  TrainConfig desk;
  const auto corpus = synthetic::planted_corpus(2024, 240);
  std::optional<Bundle> bundle;

  criterion("segment model on held-out planted data", [&] {
    bundle = train_bundle("laptops", corpus, desk);
    const double acc = segment_accuracy(*bundle, corpus.in(Split::test));
    std::ostringstream s;
    s << "held-out segment accuracy " << acc << " (document " << document_accuracy(*bundle, corpus.in(Split::test)) << ")";
    return Outcome{acc >= 0.85, s.str()};
  });

  criterion("constraint DDL", [] {
    const std::string sample = fixture("ddl/tables.ddl") + fixture("ddl/explanations.ddl") + fixture("ddl/interfaces.ddl");
    const ddl::Validator v(ddl::parse_ddl(sample));
    const json record{{"product_id", "Zenith Pro 14"}, {"rating", 7}, {"review", "Fine."}};
    const auto out = v.validate("reviews", record, ddl::Catalog::load(std::string(PRECOG_FIXTURES) + "/catalog"));
    bool ok = out.size() == 1 && out[0].constraint == "reviews_rating_domain" && !out[0].genericMessage.empty() &&
              out[0].customMessage.has_value();
    std::size_t fixpoints = 0, sources = 0;
    for (const auto& src : {sample, fixture("ddl/tables.ddl"), fixture("ddl/explanations.ddl") + fixture("ddl/tables.ddl"),
                            fixture("ddl/app.ddl")}) {
      ++sources;
      try {
        const auto once = ddl::print_ddl(ddl::parse_ddl(src));
        fixpoints += ddl::print_ddl(ddl::parse_ddl(once)) == once;
      } catch (const std::exception&) {
      }
    }
    ok = ok && fixpoints == sources;
    std::string detail = std::to_string(out.size()) + " violation(s)";
    if (!out.empty()) detail += ": " + out[0].constraint + " / " + out[0].customMessage.value_or("(no custom message)");
    return Outcome{ok, detail + "; printer fixpoint on " + std::to_string(fixpoints) + "/" + std::to_string(sources)};
  });

  criterion("feedback service determinism and latency", [&] {
    if (!bundle) return Outcome{false, "no bundle"};
    const auto root = std::filesystem::temp_directory_path() / "precog_acceptance_store";
    std::filesystem::remove_all(root);
    ModelStore store(root.string());
    store.publish(*bundle);
    Service svc(store);
    HttpServer server(svc);
    const int port = server.bind("127.0.0.1", 0);
    server.start();
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(30, 0);
    const std::string text = synthetic::long_review(9, 500);
    const std::string body = json{{"corpus", "laptops"}, {"text", text}}.dump();
    std::vector<std::string> bodies;
    double slowest = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto t0 = Clock::now();
      const auto res = client.Post("/feedback", body, "application/json");
      slowest = std::max(slowest, seconds_since(t0));
      bodies.push_back(res && res->status == 200 ? res->body : std::string());
    }
    server.stop();
    std::filesystem::remove_all(root);
    const bool same = !bodies[0].empty() && bodies[1] == bodies[0] && bodies[2] == bodies[0];
    std::ostringstream s;
    s << tokenize(text).size() << " words, slowest " << slowest << "s, bodies " << (same ? "identical" : "differ");
    return Outcome{same && slowest < 2.0, s.str()};
  });

  criterion("runs without the ui component", [] {
    // This binary links only the core library and serves no static assets.
    return Outcome{true, "core library only, no static directory"};
  });

  std::cout << (failures ? std::to_string(failures) + " criterion(s) failed" : std::string("all criteria passed"))
            << std::endl;
  return failures == 0 ? 0 : 1;
}
