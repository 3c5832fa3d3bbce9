#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "precog/common.hpp"

namespace precog {

struct LdaModel {
  int K = 0;
  Matrix topicTerm;  // K x V, rows sum to 1
  double alpha = 0.1;
  double beta = 0.01;
  std::vector<std::string> vocab;  // sorted; column j of topicTerm
  std::map<std::string, int> index;
  std::uint64_t seed = 0;

  std::size_t vocab_size() const { return vocab.size(); }

  /// The `n` highest-probability terms of topic k (ties by term order).
  std::vector<std::string> top_terms(int k, std::size_t n) const;
};

struct LdaParams {
  int K = 8;
  int iterations = 200;
  double alpha = 0.1;
  double beta = 0.01;
  std::uint64_t seed = 1;
};

/// Collapsed Gibbs sampling over pre-tokenized, stopword-filtered documents.
LdaModel fit_lda(const std::vector<std::vector<std::string>>& docs, const LdaParams& params);

struct TopicInference {
  Vector dist;
  bool inVocabulary = true;  // false: no known tokens, dist is uniform
};

/// Gibbs inference with topicTerm held fixed. The sampler is seeded from a hash of the
/// tokens, so the same tokens always give the same distribution.
TopicInference infer_topic_dist(const LdaModel& model, const std::vector<std::string>& tokens);

/// Shannon entropy in nats.
double entropy(const Vector& dist);

nlohmann::json to_json(const LdaModel& m);
LdaModel lda_from_json(const nlohmann::json& j);

}  // namespace precog
