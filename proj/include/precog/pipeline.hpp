#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "precog/ddl.hpp"
#include "precog/features.hpp"
#include "precog/fef.hpp"
#include "precog/forest.hpp"
#include "precog/lda.hpp"
#include "precog/segment.hpp"
#include "precog/tcruise.hpp"

namespace precog {

struct TrainConfig {
  Domain domain = Domain::reviews;
  std::uint64_t seed = 1;
  int topics = 8;
  int ldaIterations = 150;
  int trees = 25;
  int maxDepth = 6;
  int window = 3;
  std::size_t baselineSize = 60;
  std::map<std::string, double> utility;  // empty: "high" scores 1, every other label 0
  std::string ddl;                         // optional DDL source declaring FEF bindings
  std::string featureTable;                // FEATURE table to bind; defaults to the first one
  FeedbackParams feedback;

  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct Bundle {
  std::string corpus;
  int version = 0;
  TrainConfig config;
  std::shared_ptr<const LdaModel> lda;
  FeatureResources resources;
  RandomForest docModel;
  RandomForest segModel;
  BaselineStats docBaseline;
  BaselineStats segBaseline;
  FefRegistry registry;
  nlohmann::json metadata;

  std::shared_ptr<const PathIndex> docIndex;
  std::shared_ptr<const PathIndex> segIndex;

  /// Rebuilds derived state (path indexes, FEF registry) after loading or training.
  void finalize();
};

/// Fits LDA, resources, the document and segment models and both baselines.
/// Throws when the training split has fewer than two labels.
Bundle train_bundle(const std::string& corpusName, const LabeledCorpus& corpus, const TrainConfig& config);

/// FEFs declared by CREATE EXPLANATION statements on a FEATURE table.
FefRegistry registry_from_ddl(const ddl::Program& program, const std::string& featureTable, const FeatureSchema& schema);


/// Segment, predict, explain. Offsets are Unicode scalar-value indices.
nlohmann::json get_feedback(const Bundle& bundle, const std::string& text);

/// Segment-level accuracy on held-out documents, each segment labeled with its document's label.
double segment_accuracy(const Bundle& bundle, const std::vector<const Document*>& docs);
double document_accuracy(const Bundle& bundle, const std::vector<const Document*>& docs);

/// Versioned bundles under <root>/<corpus>/v<N>/. Publishing writes a temporary directory
/// and renames it into place; published versions are never modified.
class ModelStore {
 public:
  explicit ModelStore(std::string root);

  const std::string& root() const { return root_; }

  /// Publishes as the next version (or the given one, which must not exist yet).
  int publish(Bundle bundle, std::optional<int> version = std::nullopt);

  /// Latest version of a corpus; throws NotFound.
  std::shared_ptr<const Bundle> get(const std::string& corpus) const;
  std::shared_ptr<const Bundle> get(const std::string& corpus, int version) const;

  std::vector<int> versions(const std::string& corpus) const;
  std::vector<std::string> corpora() const;
  nlohmann::json describe() const;

 private:
  std::shared_ptr<const Bundle> load(const std::string& corpus, int version) const;

  std::string root_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::pair<std::string, int>, std::shared_ptr<const Bundle>> cache_;
};

/// $PRECOG_STORE, or "precog_store".
std::string default_store_path();

void save_bundle(const Bundle& bundle, const std::string& dir);
Bundle load_bundle(const std::string& dir);

}  // namespace precog
