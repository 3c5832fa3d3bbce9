#include "precog/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace precog {

using nlohmann::json;

CellGrid::CellGrid(const RandomForest& model) : breakpoints(model.schema().size()) {
  for (const auto& t : model.trees())
    for (const auto& p : t.paths)
      for (const auto& c : p.conditions) breakpoints[static_cast<std::size_t>(c.feature)].push_back(c.threshold);
  for (auto& b : breakpoints) {
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
  }
}

std::vector<double> CellGrid::closest_points(int f, double value, double epsilon) const {
  const auto& t = breakpoints[static_cast<std::size_t>(f)];
  std::vector<double> out;
  // [0, t_0]
  {
    const double hi = t.empty() ? 1.0 : std::min(t.front(), 1.0);
    if (hi >= 0.0) out.push_back(std::clamp(value, 0.0, hi));
  }
  // (t_j, t_{j+1}] and (t_last, 1]
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double lo = t[j];
    const double hi = j + 1 < t.size() ? std::min(t[j + 1], 1.0) : 1.0;
    if (!(lo + epsilon <= hi)) continue;
    if (value > lo && value <= hi)
      out.push_back(value);
    else
      out.push_back(value <= lo ? lo + epsilon : hi);
  }
  return out;
}

InfluenceResult exact_max_influence(const FeatureVector& d, const std::vector<int>& subset, const RandomForest& model,
                                    const ImpactConfig& cfg, const OracleLimits& limits) {
  const auto n = model.schema().size();
  if (static_cast<std::size_t>(d.size()) != n) throw Error("feature vector does not conform to model schema");
  std::set<int> features(subset.begin(), subset.end());
  for (int f : features)
    if (f < 0 || static_cast<std::size_t>(f) >= n) throw Error("feature subset index out of range");
  if (features.size() > limits.maxSubset) throw Error("instance too large for oracle: feature subset");

  const CellGrid grid(model);
  std::vector<int> fs(features.begin(), features.end());
  std::vector<std::vector<double>> choices;
  for (int f : fs) {
    if (grid.breakpoints[static_cast<std::size_t>(f)].size() > limits.maxBreakpoints)
      throw Error("instance too large for oracle: breakpoints");
    choices.push_back(grid.closest_points(f, d[f], cfg.epsilon));
  }

  const double u0 = model.utility(predict(model, d).label);
  InfluenceResult best;
  double bestDelta = 0.0;
  std::vector<std::size_t> odometer(fs.size(), 0);
  FeatureVector x = d;
  while (true) {
    Perturbation p;
    for (std::size_t k = 0; k < fs.size(); ++k) {
      x[fs[k]] = choices[k][odometer[k]];
      const double delta = x[fs[k]] - d[fs[k]];
      if (delta != 0.0) p.deltas[fs[k]] = delta;
    }
    if (!p.empty()) {
      const auto pred = predict(model, x);
      const double delta = discount(p, cfg);
      const double impact = (model.utility(pred.label) - u0) / delta * pred.confidence;
      if (impact > best.impact || (impact == best.impact && !best.perturbation.empty() && delta < bestDelta)) {
        best = {std::move(p), impact};
        bestDelta = delta;
      }
    }
    std::size_t k = 0;
    for (; k < fs.size(); ++k) {
      if (++odometer[k] < choices[k].size()) break;
      odometer[k] = 0;
    }
    if (k == fs.size()) break;
  }
  return best;
}

Vector oracle_responsibility(const FeatureVector& d, const RandomForest& model, const ImpactConfig& cfg,
                             const OracleLimits& limits) {
  const auto n = model.schema().size();
  if (n > limits.maxFeatures) throw Error("instance too large for oracle: feature count");
  Vector s = Vector::Zero(static_cast<Eigen::Index>(n));
  if (model.utility(predict(model, d).label) >= model.max_utility()) return s;

  OracleLimits inner = limits;
  inner.maxSubset = n;
  std::vector<InfluenceResult> chosen;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> subset;
    for (std::size_t f = 0; f < n; ++f)
      if (mask & (1u << f)) subset.push_back(static_cast<int>(f));
    auto r = exact_max_influence(d, subset, model, cfg, inner);
    if (r.impact <= 0.0) continue;
    const bool seen = std::any_of(chosen.begin(), chosen.end(),
                                  [&](const InfluenceResult& c) { return c.perturbation == r.perturbation; });
    if (!seen) chosen.push_back(std::move(r));
  }
  for (const auto& c : chosen)
    for (const auto& [f, _] : c.perturbation.deltas) s[f] += c.impact;
  return s;
}

// ---------------------------------------------------------------------------
// Random instances

namespace {

void grow_random(Rng& rng, const RandomForestSpec& spec, std::vector<double>& lo, std::vector<double>& hi, int depth,
                 std::vector<Condition>& prefix, Tree& tree) {
  constexpr double kMargin = 0.02;
  const bool stop = depth >= spec.maxDepth || (depth > 0 && rng.uniform() < spec.leafProbability);
  int feature = -1;
  if (!stop) {
    for (int attempt = 0; attempt < 8 && feature < 0; ++attempt) {
      const auto f = rng.below(spec.features);
      if (hi[f] - lo[f] > 4 * kMargin) feature = static_cast<int>(f);
    }
  }
  if (feature < 0) {
    DecisionPath p;
    p.conditions = prefix;
    p.labelCounts = {static_cast<int>(rng.below(6)), static_cast<int>(rng.below(6))};
    if (p.labelCounts[0] + p.labelCounts[1] == 0) p.labelCounts[rng.below(2)] = 1;
    p.vote = p.labelCounts[0] >= p.labelCounts[1] ? 0 : 1;
    tree.paths.push_back(std::move(p));
    return;
  }
  const auto f = static_cast<std::size_t>(feature);
  const double thr = rng.uniform(lo[f] + kMargin, hi[f] - kMargin);
  const double savedLo = lo[f], savedHi = hi[f];
  prefix.push_back({feature, Comparator::le, thr});
  hi[f] = thr;
  grow_random(rng, spec, lo, hi, depth + 1, prefix, tree);
  hi[f] = savedHi;
  prefix.back().op = Comparator::gt;
  lo[f] = thr;
  grow_random(rng, spec, lo, hi, depth + 1, prefix, tree);
  lo[f] = savedLo;
  prefix.pop_back();
}

}  // namespace

RandomForest random_forest(Rng& rng, const RandomForestSpec& spec) {
  if (spec.features == 0 || spec.trees == 0) throw Error("random_forest: empty spec");
  std::vector<FeatureSpec> feats;
  for (std::size_t i = 0; i < spec.features; ++i)
    feats.push_back({"f" + std::to_string(i), FeatureCategory::custom, 0.0, 1.0});
  std::vector<Tree> trees;
  for (std::size_t t = 0; t < spec.trees; ++t) {
    Tree tree;
    std::vector<double> lo(spec.features, 0.0), hi(spec.features, 1.0);
    std::vector<Condition> prefix;
    grow_random(rng, spec, lo, hi, 0, prefix, tree);
    trees.push_back(std::move(tree));
  }
  return RandomForest(FeatureSchema(std::move(feats)), {"high", "low"}, {1.0, 0.0}, std::move(trees), 0);
}

std::optional<FeatureVector> random_low_point(Rng& rng, const RandomForest& model, int attempts) {
  const auto n = static_cast<Eigen::Index>(model.schema().size());
  double lowest = model.utilities().front();
  for (double u : model.utilities()) lowest = std::min(lowest, u);
  for (int a = 0; a < attempts; ++a) {
    FeatureVector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = rng.uniform();
    if (model.utility(predict(model, d).label) == lowest) return d;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Agreement statistics

namespace {

Vector average_ranks(const Vector& v) {
  const auto n = static_cast<std::size_t>(v.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  Vector ranks(v.size());
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const Vector& a, const Vector& b) {
  if (a.size() != b.size() || a.size() == 0) throw Error("spearman: length mismatch");
  const Vector ra = average_ranks(a), rb = average_ranks(b);
  const Vector ca = ra.array() - ra.mean(), cb = rb.array() - rb.mean();
  const double na = ca.norm(), nb = cb.norm();
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return ca.dot(cb) / (na * nb);
}

int top_feature(const Vector& v) {
  int best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = static_cast<int>(i);
  return best;
}

json AgreementReport::to_json() const {
  return {{"instances", instances},
          {"compared", compared},
          {"top1Agreement", top1Agreement},
          {"meanRankCorrelation", meanRankCorrelation},
          {"maxImpactEvaluations", maxImpactEvaluations},
          {"linearScanHeld", linearScanHeld}};
}

AgreementReport agreement_report(std::size_t instances, std::uint64_t seed, const RandomForestSpec& spec,
                                 const ImpactConfig& cfg) {
  Rng rng(seed);
  AgreementReport rep;
  std::size_t agree = 0;
  double rankSum = 0.0;
  while (rep.instances < instances) {
    const auto model = random_forest(rng, spec);
    const auto d = random_low_point(rng, model);
    if (!d) continue;
    ++rep.instances;

    const double u0 = model.utility(predict(model, *d).label);
    std::size_t improving = 0;
    for (const auto& t : model.trees())
      for (const auto& p : t.paths)
        if (model.utility(p.vote) > u0) ++improving;

    ScanStats stats;
    const Vector heuristic = feature_responsibility(*d, model, cfg, &stats).raw;
    rep.maxImpactEvaluations = std::max(rep.maxImpactEvaluations, stats.impactEvaluations);
    if (stats.impactEvaluations > improving) rep.linearScanHeld = false;

    const Vector exact = oracle_responsibility(*d, model, cfg);
    if (exact.maxCoeff() <= 0.0) continue;
    ++rep.compared;
    if (top_feature(exact) == top_feature(heuristic)) ++agree;
    rankSum += spearman(exact, heuristic);
  }
  if (rep.compared > 0) {
    rep.top1Agreement = static_cast<double>(agree) / static_cast<double>(rep.compared);
    rep.meanRankCorrelation = rankSum / static_cast<double>(rep.compared);
  }
  return rep;
}

}  // namespace precog
