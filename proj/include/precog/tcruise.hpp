#pragma once

#include <map>
#include <vector>

#include "precog/forest.hpp"

namespace precog {

/// Sparse change to a feature vector. Only nonzero deltas are stored, so the keys are
/// exactly the perturbed feature set.
struct Perturbation {
  std::map<int, double> deltas;

  bool empty() const { return deltas.empty(); }
  std::vector<int> features() const;
  Vector dense(std::size_t n) const;
  bool touches(int feature) const { return deltas.count(feature) != 0; }
  bool operator==(const Perturbation&) const = default;
};

enum class ConfidenceSource {
  pathPurity,      // C = fraction of the path's training samples matching its vote
  forestMajority,  // C = fraction of trees voting for the forest's label at d+p
};

struct ImpactConfig {
  double epsilon = 1e-6;  // margin past strict (>) thresholds, in normalized units
  ConfidenceSource confidence = ConfidenceSource::pathPurity;
  /// Optional per-feature multipliers applied before taking the L2 norm. Empty means the
  /// norm is taken in normalized space; FeatureSchema::spans() measures it in raw units.
  Vector discountScale;
};

/// Delta(p): L2 norm of p, optionally scaled per feature.
double discount(const Perturbation& p, const ImpactConfig& cfg);

/// Smallest-L2 perturbation that makes d match `path`. Throws for infeasible paths and
/// for paths whose region lies outside [0,1]^n ("unreachable path").
Perturbation min_perturbation(const FeatureVector& d, const DecisionPath& path, const ImpactConfig& cfg);

/// Utility gain of moving d onto `path`, divided by Delta(minp), times the confidence.
double path_impact(const FeatureVector& d, const DecisionPath& path, const RandomForest& model,
                   const ImpactConfig& cfg);

struct ImpactPath {
  std::size_t pathIndex = 0;
  Perturbation perturbation;
  double impact = 0.0;
};

/// Instrumentation for the scan: impact evaluations vs. improving paths seen.
struct ScanStats {
  std::size_t improvingPaths = 0;
  std::size_t impactEvaluations = 0;
};

/// For one tree: the max-impact improving path per perturbed feature set, ordered by
/// feature set. Paths d already matches contribute no perturbed features and are skipped.
std::vector<ImpactPath> maximal_impact_paths(const FeatureVector& d, std::size_t tree, const RandomForest& model,
                                             const ImpactConfig& cfg, ScanStats* stats = nullptr);

struct ResponsibilityVector {
  Vector raw;
  Vector normalized;
  Vector baselineMean;
  Vector baselineStd;
};

/// Per-feature sum of retained maximal-impact path impacts. All zeros when d already has
/// the model's maximum utility.
ResponsibilityVector feature_responsibility(const FeatureVector& d, const RandomForest& model,
                                            const ImpactConfig& cfg, ScanStats* stats = nullptr);

/// Same as above but reuses a prebuilt utility index.
ResponsibilityVector feature_responsibility(const FeatureVector& d, const RandomForest& model,
                                            const PathIndex& index, const ImpactConfig& cfg,
                                            ScanStats* stats = nullptr);

struct BaselineStats {
  Vector mean;
  Vector std;  // population standard deviation
};

/// Mean and standard deviation of raw responsibilities over a low-quality sample (size >= 2).
BaselineStats baseline_stats(const std::vector<FeatureVector>& baseline, const RandomForest& model,
                             const ImpactConfig& cfg);

/// z-score raw responsibilities; coordinates with zero spread normalize to 0.
ResponsibilityVector normalize_responsibility(const ResponsibilityVector& raw, const BaselineStats& stats);

ResponsibilityVector normalize_responsibility(const ResponsibilityVector& raw,
                                              const std::vector<FeatureVector>& baseline,
                                              const RandomForest& model, const ImpactConfig& cfg);

nlohmann::json to_json(const BaselineStats& s);
BaselineStats baseline_from_json(const nlohmann::json& j);

}  // namespace precog
