#include "precog/tcruise.hpp"

#include <cmath>
#include <limits>

namespace precog {

using nlohmann::json;

std::vector<int> Perturbation::features() const {
  std::vector<int> out;
  out.reserve(deltas.size());
  for (const auto& [f, _] : deltas) out.push_back(f);
  return out;
}

Vector Perturbation::dense(std::size_t n) const {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
  for (const auto& [f, delta] : deltas) v[f] = delta;
  return v;
}

double discount(const Perturbation& p, const ImpactConfig& cfg) {
  double sq = 0.0;
  for (const auto& [f, delta] : p.deltas) {
    const double s = cfg.discountScale.size() > 0 ? cfg.discountScale[f] : 1.0;
    sq += (delta * s) * (delta * s);
  }
  return std::sqrt(sq);
}

namespace {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();  // strict lower bound (value > lo)
  double hi = std::numeric_limits<double>::infinity();   // inclusive upper bound (value <= hi)
};

std::map<int, Interval> path_intervals(const DecisionPath& path) {
  std::map<int, Interval> box;
  for (const auto& c : path.conditions) {
    auto& iv = box[c.feature];
    if (c.op == Comparator::le)
      iv.hi = std::min(iv.hi, c.threshold);
    else
      iv.lo = std::max(iv.lo, c.threshold);
  }
  return box;
}

double confidence_at(const FeatureVector& d, const Perturbation& p, const DecisionPath& path,
                     const RandomForest& model, const ImpactConfig& cfg) {
  if (cfg.confidence == ConfidenceSource::pathPurity) return path_confidence(path);
  return predict(model, d + p.dense(static_cast<std::size_t>(d.size()))).confidence;
}

double impact_of(const FeatureVector& d, const DecisionPath& path, const Perturbation& p, double currentUtility,
                 const RandomForest& model, const ImpactConfig& cfg) {
  const double gain = model.utility(path.vote) - currentUtility;
  const double delta = discount(p, cfg);
  if (delta == 0.0) {
    if (gain != 0.0) throw Error("inconsistent model state: zero perturbation changes utility");
    return 0.0;
  }
  return gain / delta * confidence_at(d, p, path, model, cfg);
}

// Keeps the best path per perturbed feature set among `candidates` (ascending path order).
std::vector<ImpactPath> scan_tree(const FeatureVector& d, const Tree& tree, const std::vector<std::size_t>& candidates,
                                  double currentUtility, const RandomForest& model, const ImpactConfig& cfg,
                                  ScanStats* stats) {
  std::map<std::vector<int>, ImpactPath> best;
  for (std::size_t idx : candidates) {
    const auto& path = tree.paths[idx];
    if (stats) ++stats->improvingPaths;
    Perturbation p;
    try {
      p = min_perturbation(d, path, cfg);
    } catch (const Error&) {
      continue;  // infeasible or outside the normalized domain
    }
    if (p.empty()) continue;
    if (stats) ++stats->impactEvaluations;
    const double impact = impact_of(d, path, p, currentUtility, model, cfg);
    auto key = p.features();
    auto it = best.find(key);
    if (it == best.end() || impact > it->second.impact) best[key] = ImpactPath{idx, std::move(p), impact};
  }
  std::vector<ImpactPath> out;
  out.reserve(best.size());
  for (auto& [_, ip] : best) out.push_back(std::move(ip));
  return out;
}

void check_conforms(const FeatureVector& d, const RandomForest& model) {
  if (static_cast<std::size_t>(d.size()) != model.schema().size())
    throw Error("feature vector does not conform to model schema");
}

}  // namespace

Perturbation min_perturbation(const FeatureVector& d, const DecisionPath& path, const ImpactConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw Error("epsilon must be positive");
  Perturbation p;
  for (const auto& [f, iv] : path_intervals(path)) {
    if (std::isfinite(iv.lo) && !(iv.lo + cfg.epsilon <= iv.hi)) throw Error("infeasible path: empty interval");
    const double v = d[f];
    if (v > iv.lo && v <= iv.hi) continue;
    const double target = v <= iv.lo ? iv.lo + cfg.epsilon : iv.hi;
    if (target < 0.0 || target > 1.0) throw Error("unreachable path: target outside [0,1]");
    // d + delta must land inside the interval despite rounding.
    double delta = target - v;
    if (v <= iv.lo) {
      while (!(v + delta > iv.lo)) delta = std::nextafter(delta, std::numeric_limits<double>::infinity());
    } else {
      while (v + delta > iv.hi) delta = std::nextafter(delta, -std::numeric_limits<double>::infinity());
    }
    p.deltas[f] = delta;
  }
  return p;
}

double path_impact(const FeatureVector& d, const DecisionPath& path, const RandomForest& model,
                   const ImpactConfig& cfg) {
  check_conforms(d, model);
  const double u0 = model.utility(predict(model, d).label);
  return impact_of(d, path, min_perturbation(d, path, cfg), u0, model, cfg);
}

std::vector<ImpactPath> maximal_impact_paths(const FeatureVector& d, std::size_t tree, const RandomForest& model,
                                             const ImpactConfig& cfg, ScanStats* stats) {
  check_conforms(d, model);
  if (tree >= model.trees().size()) throw Error("tree index out of range");
  const double u0 = model.utility(predict(model, d).label);
  const auto& t = model.trees()[tree];
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < t.paths.size(); ++i)
    if (model.utility(t.paths[i].vote) > u0) candidates.push_back(i);
  return scan_tree(d, t, candidates, u0, model, cfg, stats);
}

ResponsibilityVector feature_responsibility(const FeatureVector& d, const RandomForest& model,
                                            const ImpactConfig& cfg, ScanStats* stats) {
  return feature_responsibility(d, model, PathIndex(model), cfg, stats);
}

ResponsibilityVector feature_responsibility(const FeatureVector& d, const RandomForest& model,
                                            const PathIndex& index, const ImpactConfig& cfg, ScanStats* stats) {
  check_conforms(d, model);
  ResponsibilityVector r;
  r.raw = Vector::Zero(d.size());
  const double u0 = model.utility(predict(model, d).label);
  if (u0 >= model.max_utility()) return r;

  const auto refs = index.above(u0);
  std::size_t i = 0;
  while (i < refs.size()) {
    const std::size_t tree = refs[i].tree;
    std::vector<std::size_t> candidates;
    for (; i < refs.size() && refs[i].tree == tree; ++i) candidates.push_back(refs[i].path);
    for (const auto& ip : scan_tree(d, model.trees()[tree], candidates, u0, model, cfg, stats))
      for (const auto& [f, _] : ip.perturbation.deltas) r.raw[f] += ip.impact;
  }
  return r;
}

BaselineStats baseline_stats(const std::vector<FeatureVector>& baseline, const RandomForest& model,
                             const ImpactConfig& cfg) {
  if (baseline.size() < 2) throw Error("baseline sample must contain at least 2 points");
  const PathIndex index(model);
  const auto n = static_cast<Eigen::Index>(model.schema().size());
  Matrix scores(static_cast<Eigen::Index>(baseline.size()), n);
  for (std::size_t i = 0; i < baseline.size(); ++i)
    scores.row(static_cast<Eigen::Index>(i)) = feature_responsibility(baseline[i], model, index, cfg).raw.transpose();
  BaselineStats s;
  s.mean = scores.colwise().mean().transpose();
  s.std = ((scores.rowwise() - s.mean.transpose()).array().square().colwise().sum() /
           static_cast<double>(baseline.size()))
              .sqrt()
              .transpose();
  return s;
}

ResponsibilityVector normalize_responsibility(const ResponsibilityVector& raw, const BaselineStats& stats) {
  if (raw.raw.size() != stats.mean.size() || raw.raw.size() != stats.std.size())
    throw Error("baseline statistics do not match responsibility length");
  ResponsibilityVector out = raw;
  out.baselineMean = stats.mean;
  out.baselineStd = stats.std;
  out.normalized = Vector::Zero(raw.raw.size());
  for (Eigen::Index i = 0; i < raw.raw.size(); ++i)
    if (stats.std[i] > 0.0) out.normalized[i] = (raw.raw[i] - stats.mean[i]) / stats.std[i];
  return out;
}

ResponsibilityVector normalize_responsibility(const ResponsibilityVector& raw,
                                              const std::vector<FeatureVector>& baseline,
                                              const RandomForest& model, const ImpactConfig& cfg) {
  return normalize_responsibility(raw, baseline_stats(baseline, model, cfg));
}

json to_json(const BaselineStats& s) {
  return {{"mean", std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size())},
          {"std", std::vector<double>(s.std.data(), s.std.data() + s.std.size())}};
}

BaselineStats baseline_from_json(const json& j) {
  const auto m = j.at("mean").get<std::vector<double>>();
  const auto s = j.at("std").get<std::vector<double>>();
  BaselineStats b;
  b.mean = Eigen::Map<const Vector>(m.data(), static_cast<Eigen::Index>(m.size()));
  b.std = Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size()));
  return b;
}

}  // namespace precog
