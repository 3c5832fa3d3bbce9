#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "precog/features.hpp"
#include "precog/forest.hpp"

namespace precog {

struct FefInput {
  const Vector& bound;        // values of the bound features, in boundFeatures order
  const FeatureVector& full;  // normalized feature vector of the scope
  std::string_view text;
  const FeatureResources& resources;
};

using FefGenerator = std::function<std::optional<std::string>(const FefInput&)>;

struct Fef {
  int id = 0;
  std::string name;
  std::vector<std::size_t> boundFeatures;  // sorted, distinct, nonempty
  FefGenerator generator;
};

struct FefBindingMatrix {
  Matrix A;  // m x n, A(j, i) = 1 iff feature i is bound to FEF j
  std::vector<int> ids;
};

class FefRegistry {
 public:
  FefRegistry() = default;
  FefRegistry(std::string name, std::vector<Fef> fefs, std::size_t numFeatures);

  const std::string& name() const { return name_; }
  const std::vector<Fef>& fefs() const { return fefs_; }
  std::size_t size() const { return fefs_.size(); }
  const Fef& by_id(int id) const;
  const FefBindingMatrix& binding() const { return binding_; }

 private:
  std::string name_;
  std::vector<Fef> fefs_;
  FefBindingMatrix binding_;
};

struct FefScore {
  int fefId = 0;
  double score = 0.0;
};

/// Mean responsibility of each FEF's bound features; the top k strictly above t,
/// descending, ties to the smaller id.
std::vector<FefScore> score_fefs(const Vector& snorm, const FefBindingMatrix& binding, std::size_t k, double t);

struct FeedbackParams {
  std::size_t k = 2;
  double t = 0.0;
};

/// Scope -1 is the whole document; otherwise a segment index.
struct FeedbackItem {
  int fefId = 0;
  std::string fef;
  double score = 0.0;
  std::string text;
  int scope = -1;
};

struct ScopeInput {
  int scope = -1;
  std::string_view text;
  FeatureVector features;
  bool lowQuality = false;
  Vector snorm;  // required when lowQuality
};

struct FeedbackResult {
  std::vector<FeedbackItem> items;
  std::vector<std::string> diagnostics;
};

FeedbackResult generate_feedback(const std::vector<ScopeInput>& scopes, const FefRegistry& registry,
                                 const FeatureResources& resources, const FeedbackParams& params = {});

enum class Domain { reviews, profiles };

Domain domain_from_string(const std::string& s);
std::string to_string(Domain d);

namespace fef_ids {
inline constexpr int notEnoughDetail = 1;
inline constexpr int offTopic = 2;
inline constexpr int readability = 3;
inline constexpr int subjectivity = 4;
inline constexpr int friendliness = 5;
}  // namespace fef_ids

/// Feature categories bound to each built-in FEF.
std::vector<FeatureCategory> builtin_categories(const std::string& fefName);

/// Built-in generator by FEF name; throws NotFound for an unknown name.
FefGenerator builtin_generator(const std::string& fefName);

/// Built-in id for a generator name, or 0.
int builtin_id(const std::string& fefName);

FefRegistry builtin_registry(Domain domain, const FeatureSchema& schema);

}  // namespace precog
