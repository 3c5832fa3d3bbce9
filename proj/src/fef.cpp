#include "precog/fef.hpp"

#include <algorithm>
#include <numeric>

namespace precog {

FefRegistry::FefRegistry(std::string name, std::vector<Fef> fefs, std::size_t numFeatures)
    : name_(std::move(name)), fefs_(std::move(fefs)) {
  binding_.A = Matrix::Zero(static_cast<Eigen::Index>(fefs_.size()), static_cast<Eigen::Index>(numFeatures));
  for (std::size_t j = 0; j < fefs_.size(); ++j) {
    auto& f = fefs_[j];
    if (f.boundFeatures.empty()) throw Error("FEF " + f.name + " binds no features");
    std::sort(f.boundFeatures.begin(), f.boundFeatures.end());
    f.boundFeatures.erase(std::unique(f.boundFeatures.begin(), f.boundFeatures.end()), f.boundFeatures.end());
    for (auto i : f.boundFeatures) {
      if (i >= numFeatures) throw Error("FEF " + f.name + " binds a feature outside the schema");
      binding_.A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
    }
    if (!f.generator) throw Error("FEF " + f.name + " has no generator");
    for (std::size_t o = 0; o < j; ++o)
      if (fefs_[o].id == f.id) throw Error("duplicate FEF id " + std::to_string(f.id));
    binding_.ids.push_back(f.id);
  }
}

const Fef& FefRegistry::by_id(int id) const {
  for (const auto& f : fefs_)
    if (f.id == id) return f;
  throw NotFound("unknown FEF id " + std::to_string(id));
}

std::vector<FefScore> score_fefs(const Vector& snorm, const FefBindingMatrix& binding, std::size_t k, double t) {
  if (k < 1) throw Error("score_fefs: k must be at least 1");
  const auto m = binding.A.rows();
  if (m == 0) return {};
  if (snorm.size() != binding.A.cols()) throw Error("score_fefs: responsibility length does not match the binding matrix");
  const Vector e = binding.A * snorm;
  const Vector counts = binding.A.rowwise().sum();
  std::vector<FefScore> out;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double s = e[j] / counts[j];
    if (s > t) out.push_back({binding.ids[static_cast<std::size_t>(j)], s});
  }
  std::sort(out.begin(), out.end(), [](const FefScore& a, const FefScore& b) {
    return a.score != b.score ? a.score > b.score : a.fefId < b.fefId;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

FeedbackResult generate_feedback(const std::vector<ScopeInput>& scopes, const FefRegistry& registry,
                                 const FeatureResources& resources, const FeedbackParams& params) {
  FeedbackResult result;
  for (const auto& scope : scopes) {
    if (!scope.lowQuality) continue;
    for (const auto& [id, score] : score_fefs(scope.snorm, registry.binding(), params.k, params.t)) {
      const auto& fef = registry.by_id(id);
      Vector bound(static_cast<Eigen::Index>(fef.boundFeatures.size()));
      for (std::size_t i = 0; i < fef.boundFeatures.size(); ++i)
        bound[static_cast<Eigen::Index>(i)] = scope.features[static_cast<Eigen::Index>(fef.boundFeatures[i])];
      try {
        auto text = fef.generator({bound, scope.features, scope.text, resources});
        if (text && !text->empty()) result.items.push_back({id, fef.name, score, std::move(*text), scope.scope});
      } catch (const std::exception& e) {
        result.diagnostics.push_back("scope " + std::to_string(scope.scope) + ": FEF " + fef.name + " failed: " + e.what());
      }
    }
  }
  return result;
}

Domain domain_from_string(const std::string& s) {
  if (s == "reviews") return Domain::reviews;
  if (s == "profiles") return Domain::profiles;
  throw Error("unknown domain: " + s);
}

std::string to_string(Domain d) { return d == Domain::reviews ? "reviews" : "profiles"; }

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::optional<std::string> not_enough_detail(const FefInput& in) {
  const auto toks = tokenize(in.text);
  const std::set<std::string> present(toks.begin(), toks.end());
  std::set<std::string> used;
  std::vector<std::string> picks;
  for (const auto& set : in.resources.jargon) {
    if (picks.size() == 5) break;
    if (std::any_of(set.terms.begin(), set.terms.end(),
                    [&](const std::string& t) { return present.count(t) || used.count(t); }))
      continue;
    used.insert(set.terms.begin(), set.terms.end());
    picks.push_back(join(set.terms, " "));
  }
  if (picks.empty()) return std::nullopt;
  return "Try adding information about: " + join(picks, ", ");
}

std::optional<std::string> off_topic(const FefInput& in) {
  if (!in.resources.lda) return std::nullopt;
  const auto& lda = *in.resources.lda;
  const auto toks = tokenize(in.text);
  const std::set<std::string> present(toks.begin(), toks.end());
  std::vector<int> order(static_cast<std::size_t>(lda.K));
  std::iota(order.begin(), order.end(), 0);
  const auto& mean = in.resources.highTopicMean;
  if (mean.size() == lda.K)
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return mean[a] > mean[b]; });
  std::vector<std::string> picks;
  for (int k : order) {
    if (picks.size() == 5) break;
    const auto terms = lda.top_terms(k, 3);
    if (std::any_of(terms.begin(), terms.end(), [&](const std::string& t) { return present.count(t) != 0; })) continue;
    picks.push_back(join(terms, "/"));
  }
  if (picks.empty()) return std::nullopt;
  return "Try discussing some of these topics: " + join(picks, ", ");
}

FefGenerator fixed(std::string message) {
  return [message = std::move(message)](const FefInput&) -> std::optional<std::string> { return message; };
}

struct Builtin {
  int id;
  const char* name;
  std::vector<FeatureCategory> categories;
};

const std::vector<Builtin>& builtins() {
  using C = FeatureCategory;
  static const std::vector<Builtin> kBuiltins{
      {fef_ids::notEnoughDetail, "notEnoughDetail", {C::informativeness}},
      {fef_ids::offTopic, "offTopic", {C::topic, C::similarity}},
      {fef_ids::readability, "readability", {C::readability}},
      {fef_ids::subjectivity, "subjectivity", {C::subjectivity}},
      {fef_ids::friendliness, "friendliness", {C::custom}},
  };
  return kBuiltins;
}

const Builtin& find_builtin(const std::string& name) {
  for (const auto& b : builtins())
    if (name == b.name) return b;
  throw NotFound("unknown explanation function: " + name);
}

}  // namespace

std::vector<FeatureCategory> builtin_categories(const std::string& fefName) { return find_builtin(fefName).categories; }

FefGenerator builtin_generator(const std::string& fefName) {
  switch (find_builtin(fefName).id) {
    case fef_ids::notEnoughDetail: return not_enough_detail;
    case fef_ids::offTopic: return off_topic;
    case fef_ids::readability: return fixed("Try using shorter sentences and simpler words");
    case fef_ids::subjectivity: return fixed("Please make your writing more balanced and neutral");
    default: return fixed("Try writing in a friendlier, more inclusive tone");
  }
}

int builtin_id(const std::string& fefName) {
  for (const auto& b : builtins())
    if (fefName == b.name) return b.id;
  return 0;
}

FefRegistry builtin_registry(Domain domain, const FeatureSchema& schema) {
  const std::vector<std::string> names =
      domain == Domain::reviews ? std::vector<std::string>{"notEnoughDetail", "offTopic", "subjectivity", "readability"}
                                : std::vector<std::string>{"notEnoughDetail", "offTopic", "friendliness", "readability"};
  std::vector<Fef> fefs;
  for (const auto& n : names) {
    Fef f{builtin_id(n), n, {}, builtin_generator(n)};
    for (auto c : builtin_categories(n)) {
      const auto idx = schema.indices_in(c);
      f.boundFeatures.insert(f.boundFeatures.end(), idx.begin(), idx.end());
    }
    fefs.push_back(std::move(f));
  }
  return FefRegistry(to_string(domain), std::move(fefs), schema.size());
}

}  // namespace precog
