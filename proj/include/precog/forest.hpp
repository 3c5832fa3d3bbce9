#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "precog/common.hpp"

namespace precog {

enum class FeatureCategory { informativeness, topic, subjectivity, readability, similarity, custom };

std::string to_string(FeatureCategory c);
FeatureCategory category_from_string(const std::string& s);

struct FeatureSpec {
  std::string name;
  FeatureCategory category = FeatureCategory::custom;
  double rawMin = 0.0;
  double rawMax = 1.0;

  bool operator==(const FeatureSpec&) const = default;
};

/// Ordered feature set. Position i in the schema is coordinate i of every FeatureVector.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureSpec> features);

  std::size_t size() const { return features_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return features_[i]; }
  const std::vector<FeatureSpec>& features() const { return features_; }

  std::optional<std::size_t> index_of(const std::string& name) const;
  std::vector<std::size_t> indices_in(FeatureCategory c) const;

  /// Min-max scale raw values into [0,1], clamping out-of-range values.
  Vector normalize(const Vector& raw) const;

  /// Inverse of normalize for an in-range point.
  Vector denormalize(const Vector& normalized) const;

  /// Per-feature raw span (rawMax - rawMin); used to measure perturbations in raw units.
  Vector spans() const;

  /// Schema whose bounds are the per-column min/max of `rawRows` (rows = samples).
  /// Constant columns get rawMax = rawMin + 1 so the bounds stay ordered.
  static FeatureSchema fit(std::vector<std::pair<std::string, FeatureCategory>> names,
                           const Matrix& rawRows);

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<FeatureSpec> features_;
};

/// Normalized point in [0,1]^n.
using FeatureVector = Vector;

using LabelId = int;

enum class Comparator { le, gt };

struct Condition {
  int feature = 0;
  Comparator op = Comparator::le;
  double threshold = 0.0;

  bool matches(double value) const {
    return op == Comparator::le ? value <= threshold : value > threshold;
  }
  bool operator==(const Condition&) const = default;
};

/// Root-to-leaf decision path with the label statistics of the training samples it matched.
struct DecisionPath {
  std::vector<Condition> conditions;
  LabelId vote = 0;
  std::vector<int> labelCounts;  // indexed by LabelId

  bool matches(const FeatureVector& d) const;
  int total() const;
  bool operator==(const DecisionPath&) const = default;
};

struct Tree {
  std::vector<DecisionPath> paths;

  /// Index of the unique path matching d.
  std::size_t match(const FeatureVector& d) const;
  bool operator==(const Tree&) const = default;
};

class RandomForest {
 public:
  RandomForest() = default;
  RandomForest(FeatureSchema schema, std::vector<std::string> labels, std::vector<double> utility,
               std::vector<Tree> trees, std::uint64_t seed);

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Tree>& trees() const { return trees_; }
  std::uint64_t seed() const { return seed_; }

  double utility(LabelId l) const { return utility_.at(static_cast<std::size_t>(l)); }
  const std::vector<double>& utilities() const { return utility_; }
  double max_utility() const;
  LabelId label_id(const std::string& name) const;

  /// Vote argmax with the library-wide tie rule: higher utility first, then smaller id.
  LabelId argmax(const std::vector<int>& counts) const;

  std::size_t path_count() const;

  bool operator==(const RandomForest&) const = default;

 private:
  FeatureSchema schema_;
  std::vector<std::string> labels_;
  std::vector<double> utility_;
  std::vector<Tree> trees_;
  std::uint64_t seed_ = 0;
};

struct Prediction {
  LabelId label = 0;
  double confidence = 0.0;
};

struct ForestParams {
  int numTrees = 25;
  int maxDepth = 6;
  int minLeaf = 1;
  int featuresPerSplit = 0;  // 0 selects round(sqrt(n))
  std::uint64_t seed = 1;
  std::vector<int> featureSubset;  // empty means every schema feature is eligible
};

/// Normalized training matrix: rows are samples, columns follow the schema.
struct Dataset {
  Matrix X;
  std::vector<LabelId> y;
  std::vector<std::string> labels;
};

/// Bagged CART with Gini splits. Deterministic given params.seed.
RandomForest train_forest(const Dataset& data, const FeatureSchema& schema,
                          const std::vector<double>& utility, const ForestParams& params);

Prediction predict(const RandomForest& model, const FeatureVector& d);

/// Fraction of the path's training samples whose label matches its vote.
double path_confidence(const DecisionPath& path);

struct PathRef {
  std::size_t tree = 0;
  std::size_t path = 0;
};

/// Every path keyed by the utility of its vote.
class PathIndex {
 public:
  explicit PathIndex(const RandomForest& model);

  const std::map<double, std::vector<PathRef>>& buckets() const { return buckets_; }

  /// All paths whose vote utility is strictly greater than u, ordered by (tree, path).
  std::vector<PathRef> above(double u) const;

 private:
  std::map<double, std::vector<PathRef>> buckets_;
};

inline PathIndex index_paths_by_utility(const RandomForest& model) { return PathIndex(model); }

nlohmann::json to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RandomForest& model);
RandomForest forest_from_json(const nlohmann::json& j);

/// Canonical text form: sorted keys, shortest round-trip doubles.
std::string serialize(const RandomForest& model);
RandomForest deserialize_forest(const std::string& text);

}  // namespace precog
