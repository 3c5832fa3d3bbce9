#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "precog/forest.hpp"
#include "precog/lda.hpp"
#include "precog/text.hpp"

namespace precog {

// ---------------------------------------------------------------------------
// Readability

struct TextCounts {
  std::size_t letters = 0;  // alphanumeric code points inside words
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t syllables = 0;
  std::size_t complexWords = 0;  // three or more syllables
};

/// Vowel-group syllable count with a silent trailing 'e' rule; at least 1 per word.
std::size_t count_syllables(std::string_view word);

TextCounts text_counts(std::string_view text);

struct ReadabilityScores {
  double ari = 0.0;
  double colemanLiau = 0.0;
  double fleschReadingEase = 0.0;
  double gunningFog = 0.0;
  double smog = 0.0;
  bool degenerate = false;  // no words or no sentences; every index is 0
};

ReadabilityScores readability_scores(std::string_view text);

// ---------------------------------------------------------------------------
// Lexicon

struct LexiconEntry {
  double valence = 0.0;  // [-1, 1]
  std::set<std::string> tags;
};

using Lexicon = std::map<std::string, LexiconEntry>;

/// TSV: term<TAB>valence<TAB>comma-separated tags. '#' starts a comment line.
Lexicon parse_lexicon(std::string_view tsv);
Lexicon load_lexicon(const std::string& path);

std::string default_data_dir();

// ---------------------------------------------------------------------------
// Jargon mining (Apriori)

struct Itemset {
  std::vector<std::string> terms;  // sorted
  double support = 0.0;

  bool operator==(const Itemset&) const = default;
};

/// Every term set with document-frequency support >= minSupport and size <= maxSetSize,
/// ordered by size then terms.
std::vector<Itemset> mine_jargon(const std::vector<std::set<std::string>>& transactions, double minSupport,
                                 std::size_t maxSetSize);

// ---------------------------------------------------------------------------
// TF-IDF

using SparseVector = std::map<std::string, double>;

struct Idf {
  std::size_t documents = 0;
  std::map<std::string, double> weights;

  /// ln((1 + N) / (1 + df)) + 1; unseen terms use df = 0.
  double weight(const std::string& term) const;
};

Idf build_idf(const std::vector<std::vector<std::string>>& docs);

/// L2-normalized TF-IDF vector (raw term counts times idf).
SparseVector tfidf_vector(const std::vector<std::string>& tokens, const Idf& idf);

/// Mean of the documents' normalized TF-IDF vectors.
SparseVector tfidf_profile(const std::vector<std::vector<std::string>>& docs, const Idf& idf);

double cosine(const SparseVector& a, const SparseVector& b);

/// Cosine between the text's TF-IDF vector and a profile centroid; 0 without overlap.
double tfidf_similarity(const std::vector<std::string>& tokens, const SparseVector& profile, const Idf& idf);

// ---------------------------------------------------------------------------
// Subjectivity

struct SubjectivityScores {
  double meanValence = 0.0;     // over lexicon hits; 0 when there are none
  double polaritySpread = 0.0;  // std of per-sentence mean valence
  double upperCaseRatio = 0.0;  // uppercase letters / letters
  double firstPersonRatio = 0.0;
  double adjectiveSurrogateRatio = 0.0;  // lexicon-tagged opinion words / tokens
  double coverage = 0.0;                 // lexicon hits / tokens
  std::size_t firstPersonCount = 0;
  std::size_t lexiconHits = 0;
};

bool is_first_person(const std::string& token);

SubjectivityScores subjectivity_scores(std::string_view text, const Lexicon& lexicon);

// ---------------------------------------------------------------------------
// Resources and extraction

struct ResourceParams {
  double jargonMinSupport = 0.15;
  std::size_t jargonMaxSetSize = 2;
  std::size_t sampleSize = 200;  // documents per quality profile
  std::size_t topTerms = 25;
};

struct FeatureResources {
  Lexicon lexicon;
  std::set<std::string> stopwords;
  Idf idf;
  SparseVector highProfile;
  SparseVector lowProfile;
  std::vector<Itemset> jargon;  // mined from high-quality documents, by descending support
  std::shared_ptr<const LdaModel> lda;
  Vector highTopicMean;  // mean topic distribution of the high-quality sample
  std::vector<std::string> highTopTerms;
  std::vector<std::string> lowTopTerms;
};

/// Builds resources from tokenized (stopword-filtered) training documents split by quality.
FeatureResources build_resources(const std::vector<std::vector<std::string>>& highDocs,
                                 const std::vector<std::vector<std::string>>& lowDocs,
                                 std::shared_ptr<const LdaModel> lda, Lexicon lexicon, std::set<std::string> stopwords,
                                 const ResourceParams& params = {});

nlohmann::json to_json(const FeatureResources& r);
/// The LDA model is stored separately; pass it back in.
FeatureResources resources_from_json(const nlohmann::json& j, std::shared_ptr<const LdaModel> lda);

/// Names and categories of the extracted features, in vector order.
const std::vector<std::pair<std::string, FeatureCategory>>& text_feature_names();

Vector extract_raw_features(std::string_view text, const FeatureResources& resources);

/// Raw features normalized by the schema.
FeatureVector extract_features(std::string_view text, const FeatureResources& resources, const FeatureSchema& schema);

/// Extractor ids usable in FEATURE table definitions: every feature name, plus
/// "<category>_extractor" for each category.
std::vector<std::size_t> resolve_extractor(const std::string& extractorId, const FeatureSchema& schema);

}  // namespace precog
