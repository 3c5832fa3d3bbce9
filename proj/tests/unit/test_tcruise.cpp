#include <cmath>

#include "doctest.h"
#include "worked_example.hpp"
#include "precog/oracle.hpp"
#include "precog/tcruise.hpp"

using namespace precog;

namespace {

const double kBlueImpact = 1.0 / std::sqrt(325.0);

double raw_delta(const Perturbation& p, int f) { return p.deltas.at(f) * 100.0; }

RandomForest emotion_chain() {
  Tree t;
  t.paths = {
      {{{worked::kEmotion, Comparator::le, 0.1}}, 0, {2, 0}},
      {{{worked::kEmotion, Comparator::gt, 0.1}, {worked::kEmotion, Comparator::le, 0.8}}, 1, {0, 2}},
      {{{worked::kEmotion, Comparator::gt, 0.1}, {worked::kEmotion, Comparator::gt, 0.8}}, 0, {2, 0}},
  };
  return RandomForest(worked::schema(), {"high", "low"}, {1.0, 0.0}, {t}, 0);
}

RandomForest trained_forest(std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.labels = {"high", "low"};
  data.X.resize(300, 4);
  for (Eigen::Index r = 0; r < 300; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) data.X(r, c) = rng.uniform();
    data.y.push_back(data.X(r, 0) + 0.5 * data.X(r, 1) > 0.8 ? 0 : 1);
  }
  std::vector<FeatureSpec> f;
  for (int i = 0; i < 4; ++i) f.push_back({"x" + std::to_string(i), FeatureCategory::custom, 0.0, 1.0});
  ForestParams params;
  params.numTrees = 8;
  params.maxDepth = 4;
  params.seed = seed;
  return train_forest(data, FeatureSchema(f), {1.0, 0.0}, params);
}

}  // namespace

TEST_CASE("min_perturbation on the worked example") {
  const auto model = worked::model();
  const auto d = worked::point();
  const auto cfg = worked::config();
  const auto& paths = model.trees()[0].paths;

  const auto green = min_perturbation(d, paths[worked::kGreen], cfg);
  CHECK(green.features() == std::vector<int>{worked::kEmotion});
  CHECK(raw_delta(green, worked::kEmotion) == doctest::Approx(-20.0).epsilon(1e-12));

  const auto blue = min_perturbation(d, paths[worked::kBlue], cfg);
  CHECK(blue.features() == std::vector<int>{worked::kLen, worked::kEmotion});
  CHECK(raw_delta(blue, worked::kEmotion) == doctest::Approx(-15.0).epsilon(1e-12));
  // strict bound len > 20 lands epsilon inside
  CHECK(blue.deltas.at(worked::kLen) == doctest::Approx(0.1 + cfg.epsilon).epsilon(1e-12));
  CHECK(paths[worked::kBlue].matches(d + blue.dense(2)));

  CHECK(min_perturbation(d, paths[1], cfg).empty());
}

TEST_CASE("min_perturbation errors") {
  FeatureVector d(2);
  d << 0.5, 0.5;
  const ImpactConfig cfg;
  const DecisionPath empty{{{0, Comparator::gt, 0.6}, {0, Comparator::le, 0.4}}, 0, {1, 0}};
  CHECK_THROWS_WITH_AS(min_perturbation(d, empty, cfg), doctest::Contains("infeasible"), Error);
  const DecisionPath outside{{{1, Comparator::gt, 1.0}}, 0, {1, 0}};
  CHECK_THROWS_WITH_AS(min_perturbation(d, outside, cfg), doctest::Contains("unreachable path"), Error);
}

TEST_CASE("path_impact on the worked example") {
  const auto model = worked::model();
  const auto d = worked::point();
  const auto cfg = worked::config();
  const auto& paths = model.trees()[0].paths;
  CHECK(path_impact(d, paths[worked::kGreen], model, cfg) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(path_impact(d, paths[worked::kBlue], model, cfg) == doctest::Approx(kBlueImpact).epsilon(1e-6));
  // same-utility path: zero gain
  CHECK(path_impact(d, paths[3], model, cfg) == 0.0);
  CHECK(path_impact(d, paths[1], model, cfg) == 0.0);
}

TEST_CASE("path_impact rejects a zero perturbation with utility gain") {
  // Tree 0 votes high at d but the forest says low.
  auto stump = [](LabelId v) {
    Tree t;
    std::vector<int> c(2, 0);
    c[static_cast<std::size_t>(v)] = 1;
    t.paths = {{{{0, Comparator::le, 0.5}}, v, c}, {{{0, Comparator::gt, 0.5}}, v, c}};
    return t;
  };
  const RandomForest model(worked::schema(), {"high", "low"}, {1.0, 0.0}, {stump(0), stump(1), stump(1)}, 0);
  const auto d = worked::point();
  CHECK_THROWS_WITH_AS(path_impact(d, model.trees()[0].paths[0], model, ImpactConfig{}),
                       doctest::Contains("inconsistent model state"), Error);
  // The scan skips the matched path instead of failing; only the other leaf contributes.
  ScanStats stats;
  const auto r = feature_responsibility(d, model, ImpactConfig{}, &stats);
  CHECK(stats.improvingPaths == 2);
  CHECK(stats.impactEvaluations == 1);
  CHECK(r.raw[0] > 0.0);
  CHECK(r.raw[1] == 0.0);
}

TEST_CASE("maximal_impact_paths keeps one path per perturbed feature set") {
  const auto cfg = worked::config();
  const auto d = worked::point();

  const auto chain = maximal_impact_paths(d, 0, emotion_chain(), cfg);
  REQUIRE(chain.size() == 1);
  CHECK(chain[0].pathIndex == 0);
  CHECK(chain[0].impact == doctest::Approx(0.05));

  const auto q = maximal_impact_paths(d, 0, worked::model(), cfg);
  REQUIRE(q.size() == 2);
  CHECK(q[0].perturbation.features() == std::vector<int>{worked::kLen, worked::kEmotion});
  CHECK(q[0].impact == doctest::Approx(kBlueImpact).epsilon(1e-6));
  CHECK(q[1].perturbation.features() == std::vector<int>{worked::kEmotion});
  CHECK(q[1].impact == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("feature_responsibility on the worked example") {
  ScanStats stats;
  const auto r = feature_responsibility(worked::point(), worked::model(), worked::config(), &stats);
  CHECK(r.raw[worked::kEmotion] == doctest::Approx(0.05 + kBlueImpact).epsilon(1e-6));
  CHECK(r.raw[worked::kLen] == doctest::Approx(kBlueImpact).epsilon(1e-6));
  CHECK(stats.improvingPaths == 2);
  CHECK(stats.impactEvaluations == 2);

  Vector highRaw(2);
  highRaw << 10.0, 5.0;
  CHECK(feature_responsibility(worked::schema().normalize(highRaw), worked::model(), worked::config()).raw.isZero());
}

TEST_CASE("minp is L2-minimal against a grid search") {
  Rng rng(31);
  const ImpactConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    DecisionPath path{{}, 0, {1, 0}};
    for (int c = 0; c < 3; ++c) {
      const int f = static_cast<int>(rng.below(2));
      path.conditions.push_back({f, rng.uniform() < 0.5 ? Comparator::le : Comparator::gt, 0.05 + 0.9 * rng.uniform()});
    }
    FeatureVector d(2);
    d << rng.uniform(), rng.uniform();
    Perturbation p;
    try {
      p = min_perturbation(d, path, cfg);
    } catch (const Error&) {
      continue;
    }
    REQUIRE(path.matches(d + p.dense(2)));
    const double norm = discount(p, cfg);
    for (int i = 0; i <= 100; ++i)
      for (int j = 0; j <= 100; ++j) {
        FeatureVector x(2);
        x << i / 100.0, j / 100.0;
        bool ok = true;
        for (const auto& c : path.conditions)
          ok = ok && (c.op == Comparator::le ? x[c.feature] <= c.threshold : x[c.feature] >= c.threshold + cfg.epsilon);
        if (ok) REQUIRE((x - d).norm() >= norm - 1e-12);
      }
  }
}

TEST_CASE("removing a condition never increases |minp|") {
  Rng rng(77);
  const ImpactConfig cfg;
  for (int trial = 0; trial < 500; ++trial) {
    DecisionPath path{{}, 0, {1, 0}};
    for (int c = 0; c < 4; ++c)
      path.conditions.push_back({static_cast<int>(rng.below(3)), rng.uniform() < 0.5 ? Comparator::le : Comparator::gt,
                                 0.05 + 0.9 * rng.uniform()});
    FeatureVector d(3);
    d << rng.uniform(), rng.uniform(), rng.uniform();
    double full;
    try {
      full = discount(min_perturbation(d, path, cfg), cfg);
    } catch (const Error&) {
      continue;
    }
    for (std::size_t drop = 0; drop < path.conditions.size(); ++drop) {
      auto relaxed = path;
      relaxed.conditions.erase(relaxed.conditions.begin() + static_cast<long>(drop));
      REQUIRE(discount(min_perturbation(d, relaxed, cfg), cfg) <= full + 1e-15);
    }
  }
}

TEST_CASE("impact evaluations never exceed improving paths") {
  const auto model = trained_forest(5);
  Rng rng(8);
  const PathIndex index(model);
  int tested = 0;
  for (int i = 0; i < 200; ++i) {
    FeatureVector d(4);
    for (int k = 0; k < 4; ++k) d[k] = rng.uniform();
    const double u0 = model.utility(predict(model, d).label);
    std::size_t improving = index.above(u0).size();
    ScanStats stats;
    feature_responsibility(d, model, index, ImpactConfig{}, &stats);
    if (u0 < model.max_utility()) {
      CHECK(stats.improvingPaths == improving);
      ++tested;
    }
    CHECK(stats.impactEvaluations <= improving);
  }
  CHECK(tested > 0);
}

TEST_CASE("normalize_responsibility z-scores against a baseline") {
  ResponsibilityVector raw;
  raw.raw = Vector(3);
  raw.raw << 0.5, 1.5, 2.0;
  BaselineStats stats;
  stats.mean = Vector(3);
  stats.mean << 0.5, 1.0, 7.0;
  stats.std = Vector(3);
  stats.std << 0.2, 0.5, 0.0;
  const auto z = normalize_responsibility(raw, stats);
  CHECK(z.normalized[0] == 0.0);
  CHECK(z.normalized[1] == doctest::Approx(1.0));
  CHECK(z.normalized[2] == 0.0);

  const auto model = trained_forest(9);
  Rng rng(10);
  std::vector<FeatureVector> baseline;
  while (baseline.size() < 50) {
    if (auto d = random_low_point(rng, model)) baseline.push_back(*d);
  }
  const ImpactConfig cfg;
  const auto b = baseline_stats(baseline, model, cfg);
  Matrix zs(50, 4);
  for (int i = 0; i < 50; ++i)
    zs.row(i) = normalize_responsibility(feature_responsibility(baseline[static_cast<std::size_t>(i)], model, cfg), b)
                    .normalized.transpose();
  int spread = 0;
  for (int f = 0; f < 4; ++f) {
    const double mean = zs.col(f).mean();
    const double sd = std::sqrt((zs.col(f).array() - mean).square().mean());
    CHECK(std::abs(mean) < 1e-9);
    if (b.std[f] > 0) {
      CHECK(std::abs(sd - 1.0) < 1e-9);
      ++spread;
    }
  }
  CHECK(spread > 0);

  CHECK_THROWS_AS(baseline_stats({baseline[0]}, model, cfg), Error);
  CHECK(baseline_from_json(to_json(b)).mean == b.mean);
}
