#pragma once

#include <vector>

#include "precog/tcruise.hpp"

namespace precog {

struct OracleLimits {
  std::size_t maxSubset = 4;
  std::size_t maxBreakpoints = 16;  // per feature
  std::size_t maxFeatures = 6;      // for the power-set enumeration
};

/// Sorted distinct thresholds per feature, collected from every split in the forest.
/// Inside one cell of the product grid every tree matches a fixed path.
struct CellGrid {
  std::vector<std::vector<double>> breakpoints;

  explicit CellGrid(const RandomForest& model);

  /// Candidate coordinates for feature f: the point of each interval closest to `value`
  /// (the value itself for the interval containing it). Empty intervals are skipped.
  std::vector<double> closest_points(int f, double value, double epsilon) const;
};

struct InfluenceResult {
  Perturbation perturbation;
  double impact = 0.0;
};

/// Exhaustive maximum-influence perturbation that only moves features in `subset`,
/// scored with forest-majority confidence at d+p.
InfluenceResult exact_max_influence(const FeatureVector& d, const std::vector<int>& subset, const RandomForest& model,
                                    const ImpactConfig& cfg, const OracleLimits& limits = {});

/// Responsibility over the union of max-influence perturbations for every feature subset,
/// with identical perturbations counted once.
Vector oracle_responsibility(const FeatureVector& d, const RandomForest& model, const ImpactConfig& cfg,
                             const OracleLimits& limits = {});

/// Random tree over n features whose splits always leave a nonempty interval, with random
/// leaf label counts for a binary {high, low} labeling (high = id 0, utility 1).
struct RandomForestSpec {
  std::size_t features = 4;
  std::size_t trees = 2;
  int maxDepth = 3;
  double leafProbability = 0.25;  // chance of stopping early below the root
};

RandomForest random_forest(Rng& rng, const RandomForestSpec& spec);

/// Uniform point in [0,1]^n predicted at the model's lowest utility, or nullopt after
/// `attempts` draws.
std::optional<FeatureVector> random_low_point(Rng& rng, const RandomForest& model, int attempts = 200);

struct AgreementReport {
  std::size_t instances = 0;
  std::size_t compared = 0;  // instances where the oracle produced a nonzero vector
  double top1Agreement = 0.0;
  double meanRankCorrelation = 0.0;
  std::size_t maxImpactEvaluations = 0;
  bool linearScanHeld = true;

  nlohmann::json to_json() const;
};

/// Spearman rank correlation with average ranks for ties; 1 when both inputs are constant
/// and equal in ordering, 0 when exactly one of them is constant.
double spearman(const Vector& a, const Vector& b);

/// Index of the largest coordinate, smallest index on ties.
int top_feature(const Vector& v);

/// Runs TCruise and the oracle on `instances` random forests and summarizes their agreement.
AgreementReport agreement_report(std::size_t instances, std::uint64_t seed, const RandomForestSpec& spec,
                                 const ImpactConfig& cfg);

}  // namespace precog
