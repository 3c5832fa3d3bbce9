#include "precog/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace precog {

using nlohmann::json;

std::string to_string(FeatureCategory c) {
  switch (c) {
    case FeatureCategory::informativeness: return "informativeness";
    case FeatureCategory::topic: return "topic";
    case FeatureCategory::subjectivity: return "subjectivity";
    case FeatureCategory::readability: return "readability";
    case FeatureCategory::similarity: return "similarity";
    case FeatureCategory::custom: return "custom";
  }
  return "custom";
}

FeatureCategory category_from_string(const std::string& s) {
  for (auto c : {FeatureCategory::informativeness, FeatureCategory::topic,
                 FeatureCategory::subjectivity, FeatureCategory::readability,
                 FeatureCategory::similarity, FeatureCategory::custom}) {
    if (to_string(c) == s) return c;
  }
  throw Error("unknown feature category: " + s);
}

// ---------------------------------------------------------------------------
// FeatureSchema

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
  std::set<std::string> seen;
  for (const auto& f : features_) {
    if (!seen.insert(f.name).second) throw Error("duplicate feature name: " + f.name);
    if (!(f.rawMin < f.rawMax)) throw Error("feature " + f.name + ": rawMin must be < rawMax");
  }
}

std::optional<std::size_t> FeatureSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].name == name) return i;
  return std::nullopt;
}

std::vector<std::size_t> FeatureSchema::indices_in(FeatureCategory c) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].category == c) out.push_back(i);
  return out;
}

Vector FeatureSchema::normalize(const Vector& raw) const {
  if (static_cast<std::size_t>(raw.size()) != size())
    throw Error("feature vector length " + std::to_string(raw.size()) + " does not match schema size " +
                std::to_string(size()));
  Vector out(raw.size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& f = features_[i];
    out[i] = std::clamp((raw[i] - f.rawMin) / (f.rawMax - f.rawMin), 0.0, 1.0);
  }
  return out;
}

Vector FeatureSchema::denormalize(const Vector& normalized) const {
  Vector out(normalized.size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& f = features_[i];
    out[i] = f.rawMin + normalized[i] * (f.rawMax - f.rawMin);
  }
  return out;
}

Vector FeatureSchema::spans() const {
  Vector out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = features_[i].rawMax - features_[i].rawMin;
  return out;
}

FeatureSchema FeatureSchema::fit(std::vector<std::pair<std::string, FeatureCategory>> names,
                                 const Matrix& rawRows) {
  if (static_cast<std::size_t>(rawRows.cols()) != names.size())
    throw Error("FeatureSchema::fit: column count does not match names");
  if (rawRows.rows() == 0) throw Error("FeatureSchema::fit: no samples");
  std::vector<FeatureSpec> specs;
  specs.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double lo = rawRows.col(static_cast<Eigen::Index>(i)).minCoeff();
    double hi = rawRows.col(static_cast<Eigen::Index>(i)).maxCoeff();
    if (!(hi > lo)) hi = lo + 1.0;
    specs.push_back({names[i].first, names[i].second, lo, hi});
  }
  return FeatureSchema(std::move(specs));
}

// ---------------------------------------------------------------------------
// Paths and trees

bool DecisionPath::matches(const FeatureVector& d) const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [&](const Condition& c) { return c.matches(d[c.feature]); });
}

int DecisionPath::total() const { return std::accumulate(labelCounts.begin(), labelCounts.end(), 0); }

std::size_t Tree::match(const FeatureVector& d) const {
  for (std::size_t i = 0; i < paths.size(); ++i)
    if (paths[i].matches(d)) return i;
  throw Error("tree does not cover point (corrupt model)");
}

RandomForest::RandomForest(FeatureSchema schema, std::vector<std::string> labels,
                           std::vector<double> utility, std::vector<Tree> trees, std::uint64_t seed)
    : schema_(std::move(schema)),
      labels_(std::move(labels)),
      utility_(std::move(utility)),
      trees_(std::move(trees)),
      seed_(seed) {
  if (utility_.size() != labels_.size()) throw Error("utility must be defined for every label");
  const int n = static_cast<int>(schema_.size());
  for (const auto& t : trees_) {
    for (const auto& p : t.paths) {
      if (p.labelCounts.size() != labels_.size()) throw Error("path label counts do not match labels");
      if (p.vote < 0 || p.vote >= static_cast<int>(labels_.size())) throw Error("path vote out of range");
      for (const auto& c : p.conditions)
        if (c.feature < 0 || c.feature >= n) throw Error("path condition feature out of range");
    }
  }
}

double RandomForest::max_utility() const { return *std::max_element(utility_.begin(), utility_.end()); }

LabelId RandomForest::label_id(const std::string& name) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == name) return static_cast<LabelId>(i);
  throw NotFound("unknown label: " + name);
}

LabelId RandomForest::argmax(const std::vector<int>& counts) const {
  LabelId best = 0;
  for (LabelId l = 1; l < static_cast<LabelId>(counts.size()); ++l) {
    const auto i = static_cast<std::size_t>(l);
    const auto b = static_cast<std::size_t>(best);
    if (counts[i] > counts[b] || (counts[i] == counts[b] && utility_[i] > utility_[b])) best = l;
  }
  return best;
}

std::size_t RandomForest::path_count() const {
  std::size_t n = 0;
  for (const auto& t : trees_) n += t.paths.size();
  return n;
}

// ---------------------------------------------------------------------------
// Training

namespace {

LabelId argmax_with(const std::vector<int>& counts, const std::vector<double>& utility) {
  LabelId best = 0;
  for (std::size_t l = 1; l < counts.size(); ++l) {
    const auto b = static_cast<std::size_t>(best);
    if (counts[l] > counts[b] || (counts[l] == counts[b] && utility[l] > utility[b]))
      best = static_cast<LabelId>(l);
  }
  return best;
}

double gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double s = 1.0;
  for (int c : counts) {
    const double p = static_cast<double>(c) / total;
    s -= p * p;
  }
  return s;
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const std::vector<double>& utility, const ForestParams& params,
              const std::vector<int>& eligible, int featuresPerSplit, std::uint64_t seed)
      : data_(data),
        utility_(utility),
        params_(params),
        eligible_(eligible),
        mtry_(featuresPerSplit),
        rng_(seed),
        numLabels_(data.labels.size()) {}

  Tree build(std::vector<int> sample) {
    Tree tree;
    std::vector<Condition> prefix;
    grow(std::move(sample), prefix, 0, tree);
    return tree;
  }

 private:
  std::vector<int> counts_of(const std::vector<int>& idx) const {
    std::vector<int> c(numLabels_, 0);
    for (int i : idx) ++c[static_cast<std::size_t>(data_.y[static_cast<std::size_t>(i)])];
    return c;
  }

  void make_leaf(const std::vector<int>& idx, const std::vector<Condition>& prefix, Tree& tree) {
    DecisionPath p;
    p.conditions = prefix;
    p.labelCounts = counts_of(idx);
    p.vote = argmax_with(p.labelCounts, utility_);
    tree.paths.push_back(std::move(p));
  }

  std::vector<int> pick_features() {
    std::vector<int> pool = eligible_;
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(mtry_), pool.size());
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + rng_.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  void grow(std::vector<int> idx, std::vector<Condition>& prefix, int depth, Tree& tree) {
    const auto counts = counts_of(idx);
    const int n = static_cast<int>(idx.size());
    const double parentGini = gini(counts, n);
    if (depth >= params_.maxDepth || n < 2 * params_.minLeaf || parentGini <= 0.0) {
      make_leaf(idx, prefix, tree);
      return;
    }

    int bestFeature = -1;
    double bestThreshold = 0.0;
    double bestScore = parentGini - 1e-12;
    std::vector<int> order = idx;
    for (int f : pick_features()) {
      const auto col = static_cast<Eigen::Index>(f);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double va = data_.X(a, col), vb = data_.X(b, col);
        return va < vb || (va == vb && a < b);
      });
      std::vector<int> left(numLabels_, 0);
      std::vector<int> right = counts;
      for (int k = 0; k + 1 < n; ++k) {
        const auto lab = static_cast<std::size_t>(data_.y[static_cast<std::size_t>(order[k])]);
        ++left[lab];
        --right[lab];
        const double v = data_.X(order[k], col);
        const double next = data_.X(order[k + 1], col);
        if (!(v < next)) continue;
        const int nl = k + 1, nr = n - nl;
        if (nl < params_.minLeaf || nr < params_.minLeaf) continue;
        const double score = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
        if (score < bestScore) {
          bestScore = score;
          bestFeature = f;
          bestThreshold = 0.5 * (v + next);
        }
      }
    }
    if (bestFeature < 0) {
      make_leaf(idx, prefix, tree);
      return;
    }

    std::vector<int> lo, hi;
    for (int i : idx) (data_.X(i, bestFeature) <= bestThreshold ? lo : hi).push_back(i);
    prefix.push_back({bestFeature, Comparator::le, bestThreshold});
    grow(std::move(lo), prefix, depth + 1, tree);
    prefix.back().op = Comparator::gt;
    grow(std::move(hi), prefix, depth + 1, tree);
    prefix.pop_back();
  }

  const Dataset& data_;
  const std::vector<double>& utility_;
  const ForestParams& params_;
  const std::vector<int>& eligible_;
  int mtry_;
  Rng rng_;
  std::size_t numLabels_;
};

}  // namespace

RandomForest train_forest(const Dataset& data, const FeatureSchema& schema,
                          const std::vector<double>& utility, const ForestParams& params) {
  const auto N = static_cast<std::size_t>(data.X.rows());
  if (N == 0 || data.y.empty()) throw Error("empty corpus");
  if (data.y.size() != N) throw Error("label count does not match sample count");
  if (static_cast<std::size_t>(data.X.cols()) != schema.size()) throw Error("dataset columns do not match schema");
  if (utility.size() != data.labels.size()) throw Error("utility must be defined for every label");
  if (params.numTrees < 1 || params.maxDepth < 0 || params.minLeaf < 1)
    throw Error("invalid forest parameters");
  std::set<LabelId> distinct(data.y.begin(), data.y.end());
  for (LabelId l : distinct)
    if (l < 0 || static_cast<std::size_t>(l) >= data.labels.size()) throw Error("label id out of range");
  if (distinct.size() < 2) throw Error("degenerate labels: training requires at least two distinct labels");
  if (data.X.minCoeff() < 0.0 || data.X.maxCoeff() > 1.0) throw Error("dataset must be normalized to [0,1]");

  std::vector<int> eligible = params.featureSubset;
  if (eligible.empty()) {
    eligible.resize(schema.size());
    std::iota(eligible.begin(), eligible.end(), 0);
  }
  for (int f : eligible)
    if (f < 0 || static_cast<std::size_t>(f) >= schema.size()) throw Error("feature subset index out of range");
  int mtry = params.featuresPerSplit;
  if (mtry <= 0) mtry = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(eligible.size())))));

  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(params.numTrees));
  for (int t = 0; t < params.numTrees; ++t) {
    const std::uint64_t treeSeed = splitmix64(params.seed ^ splitmix64(static_cast<std::uint64_t>(t) + 1));
    Rng bag(treeSeed);
    std::vector<int> sample(N);
    for (auto& s : sample) s = static_cast<int>(bag.below(N));
    TreeBuilder builder(data, utility, params, eligible, mtry, splitmix64(treeSeed));
    trees.push_back(builder.build(std::move(sample)));
  }
  return RandomForest(schema, data.labels, utility, std::move(trees), params.seed);
}

Prediction predict(const RandomForest& model, const FeatureVector& d) {
  if (static_cast<std::size_t>(d.size()) != model.schema().size())
    throw Error("feature vector does not conform to model schema");
  if (model.trees().empty()) throw Error("model has no trees");
  std::vector<int> votes(model.labels().size(), 0);
  for (const auto& t : model.trees()) ++votes[static_cast<std::size_t>(t.paths[t.match(d)].vote)];
  Prediction p;
  p.label = model.argmax(votes);
  p.confidence = static_cast<double>(votes[static_cast<std::size_t>(p.label)]) /
                 static_cast<double>(model.trees().size());
  return p;
}

double path_confidence(const DecisionPath& path) {
  const int total = path.total();
  if (total <= 0) throw Error("empty leaf: path has no training samples");
  return static_cast<double>(path.labelCounts.at(static_cast<std::size_t>(path.vote))) / total;
}

PathIndex::PathIndex(const RandomForest& model) {
  for (std::size_t t = 0; t < model.trees().size(); ++t) {
    const auto& paths = model.trees()[t].paths;
    for (std::size_t p = 0; p < paths.size(); ++p) buckets_[model.utility(paths[p].vote)].push_back({t, p});
  }
}

std::vector<PathRef> PathIndex::above(double u) const {
  std::vector<PathRef> out;
  for (auto it = buckets_.upper_bound(u); it != buckets_.end(); ++it)
    out.insert(out.end(), it->second.begin(), it->second.end());
  std::sort(out.begin(), out.end(),
            [](const PathRef& a, const PathRef& b) { return a.tree < b.tree || (a.tree == b.tree && a.path < b.path); });
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

json to_json(const FeatureSchema& schema) {
  json feats = json::array();
  for (const auto& f : schema.features())
    feats.push_back({{"name", f.name}, {"category", to_string(f.category)}, {"rawMin", f.rawMin}, {"rawMax", f.rawMax}});
  return {{"features", feats}};
}

FeatureSchema schema_from_json(const json& j) {
  std::vector<FeatureSpec> specs;
  for (const auto& f : j.at("features"))
    specs.push_back({f.at("name").get<std::string>(), category_from_string(f.at("category").get<std::string>()),
                     f.at("rawMin").get<double>(), f.at("rawMax").get<double>()});
  return FeatureSchema(std::move(specs));
}

json to_json(const RandomForest& model) {
  json trees = json::array();
  for (const auto& t : model.trees()) {
    json paths = json::array();
    for (const auto& p : t.paths) {
      json conds = json::array();
      for (const auto& c : p.conditions)
        conds.push_back(json::array({c.feature, c.op == Comparator::le ? "le" : "gt", c.threshold}));
      paths.push_back({{"conds", conds}, {"vote", p.vote}, {"counts", p.labelCounts}});
    }
    trees.push_back({{"paths", paths}});
  }
  json utility = json::object();
  for (std::size_t i = 0; i < model.labels().size(); ++i) utility[model.labels()[i]] = model.utilities()[i];
  return {{"schema", to_json(model.schema())},
          {"trees", trees},
          {"labels", model.labels()},
          {"utility", utility},
          {"seed", model.seed()}};
}

RandomForest forest_from_json(const json& j) {
  auto labels = j.at("labels").get<std::vector<std::string>>();
  std::vector<double> utility;
  for (const auto& l : labels) utility.push_back(j.at("utility").at(l).get<double>());
  std::vector<Tree> trees;
  for (const auto& t : j.at("trees")) {
    Tree tree;
    for (const auto& p : t.at("paths")) {
      DecisionPath path;
      for (const auto& c : p.at("conds")) {
        const auto op = c.at(1).get<std::string>();
        if (op != "le" && op != "gt") throw Error("unknown comparator: " + op);
        path.conditions.push_back({c.at(0).get<int>(), op == "le" ? Comparator::le : Comparator::gt, c.at(2).get<double>()});
      }
      path.vote = p.at("vote").get<int>();
      path.labelCounts = p.at("counts").get<std::vector<int>>();
      tree.paths.push_back(std::move(path));
    }
    trees.push_back(std::move(tree));
  }
  return RandomForest(schema_from_json(j.at("schema")), std::move(labels), std::move(utility), std::move(trees),
                      j.at("seed").get<std::uint64_t>());
}

std::string serialize(const RandomForest& model) { return to_json(model).dump(); }

RandomForest deserialize_forest(const std::string& text) { return forest_from_json(json::parse(text)); }

}  // namespace precog
