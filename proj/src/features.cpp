#include "precog/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace precog {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Lexicon

Lexicon parse_lexicon(std::string_view tsv) {
  Lexicon lex;
  std::istringstream in{std::string(tsv)};
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1)
      cols.push_back(line.substr(start, tab - start));
    cols.push_back(line.substr(start));
    if (cols.size() < 2) throw Error("lexicon line " + std::to_string(lineNo) + ": expected term<TAB>valence[<TAB>tags]");
    LexiconEntry e;
    try {
      e.valence = std::stod(cols[1]);
    } catch (const std::exception&) {
      throw Error("lexicon line " + std::to_string(lineNo) + ": bad valence '" + cols[1] + "'");
    }
    if (e.valence < -1.0 || e.valence > 1.0) throw Error("lexicon line " + std::to_string(lineNo) + ": valence outside [-1,1]");
    if (cols.size() > 2) {
      std::istringstream tags(cols[2]);
      for (std::string t; std::getline(tags, t, ',');)
        if (!t.empty()) e.tags.insert(t);
    }
    const auto toks = tokenize(cols[0]);
    if (toks.size() != 1) throw Error("lexicon line " + std::to_string(lineNo) + ": term must be a single word");
    lex[toks[0]] = std::move(e);
  }
  return lex;
}

Lexicon load_lexicon(const std::string& path) { return parse_lexicon(read_file(path)); }

std::string default_data_dir() {
  if (const char* env = std::getenv("PRECOG_DATA")) return env;
#ifdef PRECOG_DATA_DIR
  return PRECOG_DATA_DIR;
#else
  return "data";
#endif
}

// ---------------------------------------------------------------------------
// Apriori

std::vector<Itemset> mine_jargon(const std::vector<std::set<std::string>>& transactions, double minSupport,
                                 std::size_t maxSetSize) {
  if (!(minSupport > 0.0 && minSupport <= 1.0)) throw Error("mine_jargon: minSupport must be in (0,1]");
  std::vector<Itemset> out;
  if (transactions.empty() || maxSetSize == 0) return out;
  const double N = static_cast<double>(transactions.size());
  const auto minCount = static_cast<std::size_t>(std::ceil(minSupport * N - 1e-9));

  using Set = std::vector<std::string>;
  std::map<std::string, std::size_t> single;
  for (const auto& t : transactions)
    for (const auto& term : t) ++single[term];
  std::vector<Set> level;
  for (const auto& [term, count] : single)
    if (count >= minCount) {
      level.push_back({term});
      out.push_back({{term}, static_cast<double>(count) / N});
    }

  for (std::size_t k = 2; k <= maxSetSize && level.size() >= 2; ++k) {
    std::set<Set> frequent(level.begin(), level.end());
    std::vector<Set> candidates;
    for (std::size_t a = 0; a < level.size(); ++a)
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        if (!std::equal(level[a].begin(), level[a].end() - 1, level[b].begin())) break;
        Set c = level[a];
        c.push_back(level[b].back());
        bool ok = true;
        for (std::size_t drop = 0; drop + 2 < c.size() && ok; ++drop) {  // the last two drops are a and b
          Set sub;
          for (std::size_t i = 0; i < c.size(); ++i)
            if (i != drop) sub.push_back(c[i]);
          ok = frequent.count(sub) != 0;
        }
        if (ok) candidates.push_back(std::move(c));
      }
    level.clear();
    for (auto& c : candidates) {
      std::size_t count = 0;
      for (const auto& t : transactions)
        if (std::all_of(c.begin(), c.end(), [&](const std::string& s) { return t.count(s) != 0; })) ++count;
      if (count >= minCount) {
        out.push_back({c, static_cast<double>(count) / N});
        level.push_back(std::move(c));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// TF-IDF

double Idf::weight(const std::string& term) const {
  auto it = weights.find(term);
  if (it != weights.end()) return it->second;
  return std::log(1.0 + static_cast<double>(documents)) + 1.0;
}

Idf build_idf(const std::vector<std::vector<std::string>>& docs) {
  Idf idf;
  idf.documents = docs.size();
  std::map<std::string, std::size_t> df;
  for (const auto& d : docs)
    for (const auto& t : std::set<std::string>(d.begin(), d.end())) ++df[t];
  for (const auto& [t, n] : df)
    idf.weights[t] = std::log((1.0 + static_cast<double>(docs.size())) / (1.0 + static_cast<double>(n))) + 1.0;
  return idf;
}

SparseVector tfidf_vector(const std::vector<std::string>& tokens, const Idf& idf) {
  SparseVector v;
  for (const auto& t : tokens) v[t] += 1.0;
  double sq = 0.0;
  for (auto& [t, w] : v) {
    w *= idf.weight(t);
    sq += w * w;
  }
  if (sq > 0.0)
    for (auto& [_, w] : v) w /= std::sqrt(sq);
  return v;
}

SparseVector tfidf_profile(const std::vector<std::vector<std::string>>& docs, const Idf& idf) {
  SparseVector centroid;
  if (docs.empty()) return centroid;
  for (const auto& d : docs)
    for (const auto& [t, w] : tfidf_vector(d, idf)) centroid[t] += w;
  for (auto& [_, w] : centroid) w /= static_cast<double>(docs.size());
  return centroid;
}

double cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, w] : a) {
    na += w * w;
    auto it = b.find(t);
    if (it != b.end()) dot += w * it->second;
  }
  for (const auto& [_, w] : b) nb += w * w;
  if (dot == 0.0 || na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double tfidf_similarity(const std::vector<std::string>& tokens, const SparseVector& profile, const Idf& idf) {
  return cosine(tfidf_vector(tokens, idf), profile);
}

// ---------------------------------------------------------------------------
// Subjectivity

bool is_first_person(const std::string& token) {
  static const std::set<std::string> kFirstPerson{"i", "me", "my", "mine", "we", "our", "ours", "us"};
  return kFirstPerson.count(token) != 0;
}

SubjectivityScores subjectivity_scores(std::string_view text, const Lexicon& lexicon) {
  SubjectivityScores s;
  std::size_t letters = 0, upper = 0;
  for (const auto& span : word_spans(text))
    for (std::size_t i = span.begin; i < span.end; ++i) {
      const auto c = static_cast<unsigned char>(text[i]);
      if ((c & 0xC0) == 0x80) continue;
      if (c >= '0' && c <= '9') continue;
      ++letters;
      if (c >= 'A' && c <= 'Z') ++upper;
    }
  s.upperCaseRatio = letters ? static_cast<double>(upper) / static_cast<double>(letters) : 0.0;

  std::size_t tokens = 0, strong = 0;
  double valenceSum = 0.0;
  std::vector<double> sentenceValence;
  for (const auto& sent : split_sentences(text)) {
    double sum = 0.0;
    std::size_t hits = 0;
    for (const auto& t : tokenize(text.substr(sent.begin, sent.size()))) {
      ++tokens;
      if (is_first_person(t)) ++s.firstPersonCount;
      auto it = lexicon.find(t);
      if (it == lexicon.end()) continue;
      ++hits;
      sum += it->second.valence;
      if (std::abs(it->second.valence) >= 0.5) ++strong;
    }
    s.lexiconHits += hits;
    valenceSum += sum;
    sentenceValence.push_back(hits ? sum / static_cast<double>(hits) : 0.0);
  }
  if (tokens == 0) return s;
  const double T = static_cast<double>(tokens);
  s.firstPersonRatio = static_cast<double>(s.firstPersonCount) / T;
  s.coverage = static_cast<double>(s.lexiconHits) / T;
  s.adjectiveSurrogateRatio = static_cast<double>(strong) / T;
  s.meanValence = s.lexiconHits ? valenceSum / static_cast<double>(s.lexiconHits) : 0.0;
  const double mean = std::accumulate(sentenceValence.begin(), sentenceValence.end(), 0.0) /
                      static_cast<double>(sentenceValence.size());
  double var = 0.0;
  for (double v : sentenceValence) var += (v - mean) * (v - mean);
  s.polaritySpread = std::sqrt(var / static_cast<double>(sentenceValence.size()));
  return s;
}

// ---------------------------------------------------------------------------
// Resources

namespace {

std::vector<std::string> top_terms(const SparseVector& profile, std::size_t n) {
  std::vector<std::pair<std::string, double>> items(profile.begin(), profile.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n && i < items.size(); ++i) out.push_back(items[i].first);
  return out;
}

const std::set<std::string>& function_words() {
  static const std::set<std::string> kWords{
      "a",     "an",    "the",   "and",   "or",    "but",   "nor",   "so",    "yet",   "of",    "in",    "on",
      "at",    "by",    "for",   "with",  "about", "to",    "from",  "into",  "onto",  "over",  "under", "than",
      "then",  "as",    "if",    "because", "while", "though", "although", "this", "that", "these", "those",
      "it",    "its",   "he",    "she",   "they",  "them",  "his",   "her",   "their", "you",   "your",  "is",
      "are",   "was",   "were",  "be",    "been",  "being", "am",    "do",    "does",  "did",   "have",  "has",
      "had",   "will",  "would", "shall", "should", "can",  "could", "may",   "might", "must",  "not",   "no",
      "there", "here",  "which", "who",   "whom",  "whose", "what",  "when",  "where", "why",   "how"};
  return kWords;
}

Vector mean_topics(const LdaModel& lda, const std::vector<std::vector<std::string>>& docs) {
  Vector acc = Vector::Zero(lda.K);
  if (docs.empty()) return Vector::Constant(lda.K, 1.0 / lda.K);
  for (const auto& d : docs) acc += infer_topic_dist(lda, d).dist;
  return acc / static_cast<double>(docs.size());
}

json sparse_to_json(const SparseVector& v) {
  json j = json::object();
  for (const auto& [t, w] : v) j[t] = w;
  return j;
}

SparseVector sparse_from_json(const json& j) {
  SparseVector v;
  for (auto it = j.begin(); it != j.end(); ++it) v[it.key()] = it.value().get<double>();
  return v;
}

}  // namespace

FeatureResources build_resources(const std::vector<std::vector<std::string>>& highDocs,
                                 const std::vector<std::vector<std::string>>& lowDocs,
                                 std::shared_ptr<const LdaModel> lda, Lexicon lexicon, std::set<std::string> stopwords,
                                 const ResourceParams& params) {
  if (!lda) throw Error("build_resources: LDA model required");
  FeatureResources r;
  r.lexicon = std::move(lexicon);
  r.stopwords = std::move(stopwords);
  r.lda = std::move(lda);

  std::vector<std::vector<std::string>> all = highDocs;
  all.insert(all.end(), lowDocs.begin(), lowDocs.end());
  r.idf = build_idf(all);

  const auto sample = [&](const std::vector<std::vector<std::string>>& docs) {
    return std::vector<std::vector<std::string>>(docs.begin(),
                                                 docs.begin() + static_cast<std::ptrdiff_t>(std::min(docs.size(), params.sampleSize)));
  };
  const auto high = sample(highDocs);
  const auto low = sample(lowDocs);
  r.highProfile = tfidf_profile(high, r.idf);
  r.lowProfile = tfidf_profile(low, r.idf);
  r.highTopTerms = top_terms(r.highProfile, params.topTerms);
  r.lowTopTerms = top_terms(r.lowProfile, params.topTerms);
  r.highTopicMean = mean_topics(*r.lda, high);

  std::vector<std::set<std::string>> transactions;
  for (const auto& d : high) transactions.emplace_back(d.begin(), d.end());
  r.jargon = mine_jargon(transactions, params.jargonMinSupport, params.jargonMaxSetSize);
  std::stable_sort(r.jargon.begin(), r.jargon.end(), [](const Itemset& a, const Itemset& b) {
    if (a.support != b.support) return a.support > b.support;
    return a.terms.size() > b.terms.size();
  });
  return r;
}

json to_json(const FeatureResources& r) {
  json lex = json::object();
  for (const auto& [t, e] : r.lexicon) lex[t] = {{"valence", e.valence}, {"tags", e.tags}};
  json jargon = json::array();
  for (const auto& s : r.jargon) jargon.push_back({{"terms", s.terms}, {"support", s.support}});
  return {{"lexicon", lex},
          {"stopwords", r.stopwords},
          {"idf", {{"documents", r.idf.documents}, {"weights", sparse_to_json(r.idf.weights)}}},
          {"highProfile", sparse_to_json(r.highProfile)},
          {"lowProfile", sparse_to_json(r.lowProfile)},
          {"jargon", jargon},
          {"highTopicMean", std::vector<double>(r.highTopicMean.data(), r.highTopicMean.data() + r.highTopicMean.size())},
          {"highTopTerms", r.highTopTerms},
          {"lowTopTerms", r.lowTopTerms}};
}

FeatureResources resources_from_json(const json& j, std::shared_ptr<const LdaModel> lda) {
  FeatureResources r;
  for (auto it = j.at("lexicon").begin(); it != j.at("lexicon").end(); ++it)
    r.lexicon[it.key()] = {it.value().at("valence").get<double>(), it.value().at("tags").get<std::set<std::string>>()};
  r.stopwords = j.at("stopwords").get<std::set<std::string>>();
  r.idf.documents = j.at("idf").at("documents").get<std::size_t>();
  r.idf.weights = sparse_from_json(j.at("idf").at("weights"));
  r.highProfile = sparse_from_json(j.at("highProfile"));
  r.lowProfile = sparse_from_json(j.at("lowProfile"));
  for (const auto& s : j.at("jargon"))
    r.jargon.push_back({s.at("terms").get<std::vector<std::string>>(), s.at("support").get<double>()});
  const auto mean = j.at("highTopicMean").get<std::vector<double>>();
  r.highTopicMean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  r.highTopTerms = j.at("highTopTerms").get<std::vector<std::string>>();
  r.lowTopTerms = j.at("lowTopTerms").get<std::vector<std::string>>();
  r.lda = std::move(lda);
  return r;
}

// ---------------------------------------------------------------------------
// Extraction

const std::vector<std::pair<std::string, FeatureCategory>>& text_feature_names() {
  using C = FeatureCategory;
  static const std::vector<std::pair<std::string, FeatureCategory>> kNames{
      {"word_count", C::informativeness},
      {"sentence_count", C::informativeness},
      {"char_count", C::informativeness},
      {"mean_word_length", C::informativeness},
      {"mean_sentence_length", C::informativeness},
      {"type_token_ratio", C::informativeness},
      {"jargon_hits", C::informativeness},
      {"content_word_ratio", C::informativeness},
      {"topic_entropy", C::topic},
      {"top_topic_prob", C::topic},
      {"high_topic_similarity", C::topic},
      {"topic_vocab_ratio", C::topic},
      {"mean_valence", C::subjectivity},
      {"polarity_spread", C::subjectivity},
      {"upper_case_ratio", C::subjectivity},
      {"first_person_ratio", C::subjectivity},
      {"opinion_word_ratio", C::subjectivity},
      {"lexicon_coverage", C::subjectivity},
      {"exclamation_ratio", C::subjectivity},
      {"ari", C::readability},
      {"coleman_liau", C::readability},
      {"flesch_reading_ease", C::readability},
      {"gunning_fog", C::readability},
      {"smog", C::readability},
      {"function_word_ratio", C::readability},
      {"capitalized_run_ratio", C::readability},
      {"tfidf_sim_high", C::similarity},
      {"tfidf_sim_low", C::similarity},
      {"top_term_overlap_high", C::similarity},
      {"top_term_overlap_low", C::similarity},
      {"social_ratio", C::custom},
      {"inclusive_ratio", C::custom},
  };
  return kNames;
}

Vector extract_raw_features(std::string_view text, const FeatureResources& r) {
  if (!r.lda) throw Error("extract_features: resources have no topic model");
  const auto& names = text_feature_names();
  Vector v = Vector::Zero(static_cast<Eigen::Index>(names.size()));
  const auto tokens = tokenize(text);
  const auto content = remove_stopwords(tokens, r.stopwords);
  const auto counts = text_counts(text);
  const std::set<std::string> vocab(tokens.begin(), tokens.end());
  const double T = static_cast<double>(tokens.size());
  auto ratio = [&](double x) { return tokens.empty() ? 0.0 : x / T; };

  v[0] = static_cast<double>(counts.words);
  v[1] = static_cast<double>(counts.sentences);
  v[2] = static_cast<double>(codepoint_length(text));
  v[3] = counts.words ? static_cast<double>(counts.letters) / static_cast<double>(counts.words) : 0.0;
  v[4] = counts.sentences ? static_cast<double>(counts.words) / static_cast<double>(counts.sentences) : 0.0;
  v[5] = ratio(static_cast<double>(vocab.size()));
  v[6] = static_cast<double>(std::count_if(r.jargon.begin(), r.jargon.end(), [&](const Itemset& s) {
    return std::all_of(s.terms.begin(), s.terms.end(), [&](const std::string& t) { return vocab.count(t) != 0; });
  }));
  v[7] = ratio(static_cast<double>(content.size()));

  const auto topics = infer_topic_dist(*r.lda, content);
  v[8] = entropy(topics.dist);
  v[9] = topics.dist.maxCoeff();
  if (r.highTopicMean.size() == topics.dist.size() && r.highTopicMean.norm() > 0)
    v[10] = topics.dist.dot(r.highTopicMean) / (topics.dist.norm() * r.highTopicMean.norm());
  v[11] = content.empty() ? 0.0
                          : static_cast<double>(std::count_if(content.begin(), content.end(),
                                                              [&](const std::string& t) { return r.lda->index.count(t) != 0; })) /
                                static_cast<double>(content.size());

  const auto subj = subjectivity_scores(text, r.lexicon);
  v[12] = subj.meanValence;
  v[13] = subj.polaritySpread;
  v[14] = subj.upperCaseRatio;
  v[15] = subj.firstPersonRatio;
  v[16] = subj.adjectiveSurrogateRatio;
  v[17] = subj.coverage;
  v[18] = counts.sentences ? static_cast<double>(std::count(text.begin(), text.end(), '!')) /
                                 static_cast<double>(counts.sentences)
                           : 0.0;

  const auto read = readability_scores(text);
  v[19] = read.ari;
  v[20] = read.colemanLiau;
  v[21] = read.fleschReadingEase;
  v[22] = read.gunningFog;
  v[23] = read.smog;
  v[24] = ratio(static_cast<double>(
      std::count_if(tokens.begin(), tokens.end(), [](const std::string& t) { return function_words().count(t) != 0; })));
  {
    // runs of capitalized words that do not start a sentence
    std::size_t runs = 0;
    for (const auto& sent : split_sentences(text)) {
      const auto words = word_spans(text.substr(sent.begin, sent.size()));
      bool inRun = false;
      for (std::size_t i = 1; i < words.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[sent.begin + words[i].begin]);
        const bool cap = c >= 'A' && c <= 'Z';
        if (cap && !inRun) ++runs;
        inRun = cap;
      }
    }
    v[25] = counts.words ? static_cast<double>(runs) / static_cast<double>(counts.words) : 0.0;
  }

  v[26] = tfidf_similarity(tokens, r.highProfile, r.idf);
  v[27] = tfidf_similarity(tokens, r.lowProfile, r.idf);
  auto overlap = [&](const std::vector<std::string>& top) {
    if (top.empty()) return 0.0;
    return static_cast<double>(std::count_if(top.begin(), top.end(), [&](const std::string& t) { return vocab.count(t) != 0; })) /
           static_cast<double>(top.size());
  };
  v[28] = overlap(r.highTopTerms);
  v[29] = overlap(r.lowTopTerms);

  std::size_t social = 0, inclusive = 0;
  for (const auto& t : tokens) {
    auto it = r.lexicon.find(t);
    if (it == r.lexicon.end()) continue;
    social += it->second.tags.count("social");
    inclusive += it->second.tags.count("inclusive");
  }
  v[30] = ratio(static_cast<double>(social));
  v[31] = ratio(static_cast<double>(inclusive));
  return v;
}

FeatureVector extract_features(std::string_view text, const FeatureResources& resources, const FeatureSchema& schema) {
  const auto& names = text_feature_names();
  if (schema.size() != names.size()) throw Error("extract_features: schema was not built for the text feature library");
  for (std::size_t i = 0; i < names.size(); ++i)
    if (schema[i].name != names[i].first) throw Error("extract_features: schema feature mismatch at " + schema[i].name);
  return schema.normalize(extract_raw_features(text, resources));
}

std::vector<std::size_t> resolve_extractor(const std::string& extractorId, const FeatureSchema& schema) {
  if (auto i = schema.index_of(extractorId)) return {*i};
  const std::string suffix = "_extractor";
  if (extractorId.size() > suffix.size() && extractorId.ends_with(suffix)) {
    const auto prefix = extractorId.substr(0, extractorId.size() - suffix.size());
    if (auto i = schema.index_of(prefix)) return {*i};
    try {
      auto idx = schema.indices_in(category_from_string(prefix));
      if (!idx.empty()) return idx;
    } catch (const Error&) {
    }
  }
  throw NotFound("unknown feature extractor: " + extractorId);
}

}  // namespace precog
