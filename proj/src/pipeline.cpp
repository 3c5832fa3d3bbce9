#include "precog/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <unistd.h>

namespace precog {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

json TrainConfig::to_json() const {
  return {{"domain", precog::to_string(domain)},
          {"seed", seed},
          {"topics", topics},
          {"ldaIterations", ldaIterations},
          {"trees", trees},
          {"maxDepth", maxDepth},
          {"window", window},
          {"baselineSize", baselineSize},
          {"utility", utility},
          {"ddl", ddl},
          {"featureTable", featureTable},
          {"k", feedback.k},
          {"t", feedback.t}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  static const std::set<std::string> kKeys{"domain", "seed",    "topics", "ldaIterations", "trees", "maxDepth", "window",
                                           "baselineSize", "utility", "ddl", "featureTable", "k", "t"};
  if (!j.is_object()) throw Error("training parameters must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!kKeys.count(it.key())) throw Error("unknown training parameter: " + it.key());
  TrainConfig c;
  try {
    if (j.contains("domain")) c.domain = domain_from_string(j["domain"].get<std::string>());
    c.seed = j.value("seed", c.seed);
    c.topics = j.value("topics", c.topics);
    c.ldaIterations = j.value("ldaIterations", c.ldaIterations);
    c.trees = j.value("trees", c.trees);
    c.maxDepth = j.value("maxDepth", c.maxDepth);
    c.window = j.value("window", c.window);
    c.baselineSize = j.value("baselineSize", c.baselineSize);
    c.utility = j.value("utility", c.utility);
    c.ddl = j.value("ddl", c.ddl);
    c.featureTable = j.value("featureTable", c.featureTable);
    c.feedback.k = j.value("k", c.feedback.k);
    c.feedback.t = j.value("t", c.feedback.t);
  } catch (const json::exception& e) {
    throw Error(std::string("bad training parameter: ") + e.what());
  }
  if (c.trees < 1 || c.maxDepth < 1 || c.topics < 2 || c.ldaIterations < 1 || c.window < 1 || c.feedback.k < 1)
    throw Error("training parameters out of range");
  return c;
}

// ---------------------------------------------------------------------------
// Training

namespace {

std::vector<std::string> content_tokens(std::string_view text, const std::set<std::string>& stopwords) {
  return remove_stopwords(tokenize(text), stopwords);
}

Matrix stack(const std::vector<Vector>& rows, Eigen::Index cols) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return m;
}

Dataset dataset(const FeatureSchema& schema, const std::vector<Vector>& raw, const std::vector<LabelId>& y,
                const std::vector<std::string>& labels) {
  Dataset d;
  d.labels = labels;
  d.y = y;
  d.X.resize(static_cast<Eigen::Index>(raw.size()), static_cast<Eigen::Index>(schema.size()));
  for (std::size_t r = 0; r < raw.size(); ++r) d.X.row(static_cast<Eigen::Index>(r)) = schema.normalize(raw[r]).transpose();
  return d;
}

BaselineStats baseline_for(const RandomForest& model, const Dataset& data, std::size_t size) {
  std::vector<FeatureVector> low, all;
  for (Eigen::Index r = 0; r < data.X.rows(); ++r) {
    all.push_back(data.X.row(r).transpose());
    if (model.utility(data.y[static_cast<std::size_t>(r)]) < model.max_utility() && low.size() < size)
      low.push_back(all.back());
  }
  if (low.size() < 2) {
    all.resize(std::min(all.size(), std::max<std::size_t>(size, 2)));
    low = all;
  }
  return baseline_stats(low, model, ImpactConfig{});
}

TilingParams tiling(const TrainConfig& c) {
  TilingParams p;
  p.window = c.window;
  return p;
}

}  // namespace

void Bundle::finalize() {
  docIndex = std::make_shared<const PathIndex>(docModel);
  segIndex = std::make_shared<const PathIndex>(segModel);
  if (config.ddl.empty()) {
    registry = builtin_registry(config.domain, docModel.schema());
  } else {
    const auto program = ddl::parse_ddl(config.ddl);
    std::string table = config.featureTable;
    if (table.empty()) {
      for (const auto& s : program.statements)
        if (auto f = std::get_if<ddl::FeatureTableDef>(&s)) {
          table = f->name;
          break;
        }
    }
    registry = registry_from_ddl(program, table, docModel.schema());
  }
}

FefRegistry registry_from_ddl(const ddl::Program& program, const std::string& featureTable, const FeatureSchema& schema) {
  const auto* table = program.feature_table(featureTable);
  if (!table) throw ddl::ResolutionError("no FEATURE table named '" + featureTable + "'");
  std::vector<Fef> fefs;
  int nextId = 100;
  for (const auto* e : program.explanations()) {
    if (e->table != featureTable) continue;
    Fef f;
    f.id = builtin_id(e->explainer);
    if (f.id == 0) f.id = nextId++;
    f.name = e->explainer;
    f.generator = builtin_generator(e->explainer);
    for (const auto& att : e->attributes)
      for (const auto& fc : table->features)
        if (fc.name == att) {
          const auto idx = resolve_extractor(fc.extractor, schema);
          f.boundFeatures.insert(f.boundFeatures.end(), idx.begin(), idx.end());
        }
    fefs.push_back(std::move(f));
  }
  return FefRegistry(featureTable, std::move(fefs), schema.size());
}

Bundle train_bundle(const std::string& corpusName, const LabeledCorpus& corpus, const TrainConfig& config) {
  const auto train = corpus.in(Split::train);
  std::set<std::string> labelSet;
  for (const auto* d : train) labelSet.insert(d->label);
  if (labelSet.size() < 2) throw Error("degenerate corpus: training split needs at least two labels");
  const std::vector<std::string> labels(labelSet.begin(), labelSet.end());

  std::vector<double> utility;
  for (const auto& l : labels) {
    if (config.utility.empty()) {
      utility.push_back(l == "high" ? 1.0 : 0.0);
    } else {
      auto it = config.utility.find(l);
      if (it == config.utility.end()) throw Error("no utility given for label " + l);
      utility.push_back(it->second);
    }
  }
  const double maxU = *std::max_element(utility.begin(), utility.end());
  if (std::all_of(utility.begin(), utility.end(), [&](double u) { return u == maxU; }))
    throw Error("degenerate corpus: every label has the same utility");
  auto label_of = [&](const std::string& l) {
    return static_cast<LabelId>(std::lower_bound(labels.begin(), labels.end(), l) - labels.begin());
  };

  Bundle b;
  b.corpus = corpusName;
  b.config = config;
  const auto stopwords = load_stopwords(default_data_dir() + "/stopwords.txt");
  auto lexicon = load_lexicon(default_data_dir() + "/lexicon.tsv");

  std::vector<std::vector<std::string>> tokens, high, low;
  for (const auto* d : train) {
    tokens.push_back(content_tokens(d->text, stopwords));
    (utility[static_cast<std::size_t>(label_of(d->label))] == maxU ? high : low).push_back(tokens.back());
  }
  LdaParams lp;
  lp.K = config.topics;
  lp.iterations = config.ldaIterations;
  lp.seed = config.seed;
  b.lda = std::make_shared<const LdaModel>(fit_lda(tokens, lp));
  b.resources = build_resources(high, low, b.lda, std::move(lexicon), stopwords);

  const auto n = static_cast<Eigen::Index>(text_feature_names().size());
  std::vector<Vector> docRaw, segRaw;
  std::vector<LabelId> docY, segY;
  for (const auto* d : train) {
    docRaw.push_back(extract_raw_features(d->text, b.resources));
    docY.push_back(label_of(d->label));
    for (const auto& s : topictiling_segment(d->text, *b.lda, tiling(config))) {
      segRaw.push_back(extract_raw_features(s.text, b.resources));
      segY.push_back(docY.back());
    }
  }
  const auto docSchema = FeatureSchema::fit(text_feature_names(), stack(docRaw, n));
  const auto segSchema = FeatureSchema::fit(text_feature_names(), stack(segRaw, n));
  const auto docData = dataset(docSchema, docRaw, docY, labels);
  const auto segData = dataset(segSchema, segRaw, segY, labels);

  ForestParams fp;
  fp.numTrees = config.trees;
  fp.maxDepth = config.maxDepth;
  fp.seed = config.seed;
  b.docModel = train_forest(docData, docSchema, utility, fp);
  fp.seed = splitmix64(config.seed + 1);
  b.segModel = train_forest(segData, segSchema, utility, fp);
  b.docBaseline = baseline_for(b.docModel, docData, config.baselineSize);
  b.segBaseline = baseline_for(b.segModel, segData, config.baselineSize);
  b.finalize();

  const auto test = corpus.in(Split::test);
  b.metadata = {{"labels", labels},
                {"features", static_cast<std::size_t>(n)},
                {"trainDocuments", train.size()},
                {"trainSegments", segRaw.size()},
                {"testDocuments", test.size()},
                {"registry", b.registry.name()}};
  if (!test.empty()) {
    b.metadata["docAccuracy"] = document_accuracy(b, test);
    b.metadata["segAccuracy"] = segment_accuracy(b, test);
  }
  return b;
}

double document_accuracy(const Bundle& b, const std::vector<const Document*>& docs) {
  if (docs.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto* d : docs) {
    const auto x = b.docModel.schema().normalize(extract_raw_features(d->text, b.resources));
    ok += b.docModel.labels()[static_cast<std::size_t>(predict(b.docModel, x).label)] == d->label;
  }
  return static_cast<double>(ok) / static_cast<double>(docs.size());
}

double segment_accuracy(const Bundle& b, const std::vector<const Document*>& docs) {
  std::size_t ok = 0, total = 0;
  for (const auto* d : docs)
    for (const auto& s : topictiling_segment(d->text, *b.lda, tiling(b.config))) {
      const auto x = b.segModel.schema().normalize(extract_raw_features(s.text, b.resources));
      ok += b.segModel.labels()[static_cast<std::size_t>(predict(b.segModel, x).label)] == d->label;
      ++total;
    }
  return total ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;
}

// ---------------------------------------------------------------------------
// Feedback

json get_feedback(const Bundle& b, const std::string& text) {
  const bool degenerate = word_spans(text).empty();
  const auto docX = b.docModel.schema().normalize(extract_raw_features(text, b.resources));
  const auto docPred = predict(b.docModel, docX);
  const bool docLow = b.docModel.utility(docPred.label) < b.docModel.max_utility();

  std::vector<Segment> segments;
  if (!degenerate) segments = topictiling_segment(text, *b.lda, tiling(b.config));

  std::vector<ScopeInput> scopes;
  const ImpactConfig cfg;
  if (docLow && !degenerate) {
    const auto r = feature_responsibility(docX, b.docModel, *b.docIndex, cfg);
    scopes.push_back({-1, text, docX, true, normalize_responsibility(r, b.docBaseline).normalized});
  }
  std::vector<Prediction> segPreds;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto x = b.segModel.schema().normalize(extract_raw_features(segments[i].text, b.resources));
    segPreds.push_back(predict(b.segModel, x));
    if (b.segModel.utility(segPreds.back().label) < b.segModel.max_utility()) {
      const auto r = feature_responsibility(x, b.segModel, *b.segIndex, cfg);
      scopes.push_back({static_cast<int>(i), segments[i].text, x, true, normalize_responsibility(r, b.segBaseline).normalized});
    }
  }
  const auto fb = generate_feedback(scopes, b.registry, b.resources, b.config.feedback);

  auto items_for = [&](int scope) {
    json arr = json::array();
    for (const auto& it : fb.items)
      if (it.scope == scope) arr.push_back({{"fef", it.fef}, {"fefId", it.fefId}, {"score", it.score}, {"text", it.text}});
    return arr;
  };
  json segs = json::array();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& p = segPreds[i];
    segs.push_back({{"startChar", codepoint_index(text, segments[i].startByte)},
                    {"endChar", codepoint_index(text, segments[i].endByte)},
                    {"label", b.segModel.labels()[static_cast<std::size_t>(p.label)]},
                    {"confidence", p.confidence},
                    {"feedback", items_for(static_cast<int>(i))}});
  }
  return {{"corpus", b.corpus},
          {"version", b.version},
          {"degenerate", degenerate},
          {"docQuality",
           {{"label", b.docModel.labels()[static_cast<std::size_t>(docPred.label)]}, {"confidence", docPred.confidence}}},
          {"docFeedback", items_for(-1)},
          {"segments", segs},
          {"diagnostics", fb.diagnostics}};
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
  if (!out) throw Error("failed to write " + p.string());
}

json read_json(const fs::path& p) {
  try {
    return json::parse(read_file(p.string()));
  } catch (const json::exception& e) {
    throw Error(p.string() + ": " + e.what());
  }
}

void check_corpus_name(const std::string& name) {
  static const std::regex kName("[A-Za-z0-9_-]{1,64}");
  if (!std::regex_match(name, kName)) throw Error("invalid corpus name '" + name + "'");
}

}  // namespace

void save_bundle(const Bundle& b, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path d(dir);
  write_file(d / "manifest.json", json{{"corpus", b.corpus}, {"version", b.version}, {"metadata", b.metadata}}.dump() + "\n");
  write_file(d / "config.json", b.config.to_json().dump() + "\n");
  write_file(d / "lda.json", to_json(*b.lda).dump() + "\n");
  write_file(d / "resources.json", to_json(b.resources).dump() + "\n");
  write_file(d / "doc_model.json", serialize(b.docModel) + "\n");
  write_file(d / "seg_model.json", serialize(b.segModel) + "\n");
  write_file(d / "baselines.json", json{{"doc", to_json(b.docBaseline)}, {"seg", to_json(b.segBaseline)}}.dump() + "\n");
}

Bundle load_bundle(const std::string& dir) {
  const fs::path d(dir);
  Bundle b;
  const auto manifest = read_json(d / "manifest.json");
  b.corpus = manifest.at("corpus").get<std::string>();
  b.version = manifest.at("version").get<int>();
  b.metadata = manifest.at("metadata");
  b.config = TrainConfig::from_json(read_json(d / "config.json"));
  b.lda = std::make_shared<const LdaModel>(lda_from_json(read_json(d / "lda.json")));
  b.resources = resources_from_json(read_json(d / "resources.json"), b.lda);
  b.docModel = deserialize_forest(read_file((d / "doc_model.json").string()));
  b.segModel = deserialize_forest(read_file((d / "seg_model.json").string()));
  const auto baselines = read_json(d / "baselines.json");
  b.docBaseline = baseline_from_json(baselines.at("doc"));
  b.segBaseline = baseline_from_json(baselines.at("seg"));
  b.finalize();
  return b;
}

std::string default_store_path() {
  if (const char* env = std::getenv("PRECOG_STORE"); env && *env) return env;
  return "precog_store";
}

ModelStore::ModelStore(std::string root) : root_(std::move(root)) { fs::create_directories(root_); }

std::vector<int> ModelStore::versions(const std::string& corpus) const {
  check_corpus_name(corpus);
  std::vector<int> out;
  const fs::path dir = fs::path(root_) / corpus;
  if (!fs::is_directory(dir)) return out;
  static const std::regex kVersion("v([0-9]+)");
  for (const auto& e : fs::directory_iterator(dir)) {
    std::smatch m;
    const auto name = e.path().filename().string();
    if (e.is_directory() && std::regex_match(name, m, kVersion)) out.push_back(std::stoi(m[1]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> ModelStore::corpora() const {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(root_)) {
    const auto name = e.path().filename().string();
    if (e.is_directory() && name[0] != '.' && !versions(name).empty()) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int ModelStore::publish(Bundle bundle, std::optional<int> version) {
  check_corpus_name(bundle.corpus);
  std::unique_lock lock(mutex_);
  const auto existing = versions(bundle.corpus);
  const int v = version ? *version : (existing.empty() ? 1 : existing.back() + 1);
  if (v < 1) throw Error("bundle versions start at 1");
  const fs::path finalDir = fs::path(root_) / bundle.corpus / ("v" + std::to_string(v));
  if (fs::exists(finalDir)) throw Error("version " + std::to_string(v) + " of " + bundle.corpus + " already exists");
  bundle.version = v;
  const fs::path tmp = fs::path(root_) / bundle.corpus / (".tmp-v" + std::to_string(v) + "-" + std::to_string(::getpid()));
  fs::remove_all(tmp);
  save_bundle(bundle, tmp.string());
  fs::rename(tmp, finalDir);
  cache_[{bundle.corpus, v}] = std::make_shared<const Bundle>(std::move(bundle));
  return v;
}

std::shared_ptr<const Bundle> ModelStore::load(const std::string& corpus, int version) const {
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find({corpus, version});
    if (it != cache_.end()) return it->second;
  }
  const fs::path dir = fs::path(root_) / corpus / ("v" + std::to_string(version));
  if (!fs::is_directory(dir)) throw NotFound("no version " + std::to_string(version) + " of corpus " + corpus);
  auto b = std::make_shared<const Bundle>(load_bundle(dir.string()));
  std::unique_lock lock(mutex_);
  return cache_.try_emplace({corpus, version}, std::move(b)).first->second;
}

std::shared_ptr<const Bundle> ModelStore::get(const std::string& corpus) const {
  const auto v = versions(corpus);
  if (v.empty()) throw NotFound("unknown corpus " + corpus);
  return load(corpus, v.back());
}

std::shared_ptr<const Bundle> ModelStore::get(const std::string& corpus, int version) const {
  check_corpus_name(corpus);
  return load(corpus, version);
}

json ModelStore::describe() const {
  json out = json::array();
  for (const auto& c : corpora()) {
    const auto v = versions(c);
    const auto manifest = read_json(fs::path(root_) / c / ("v" + std::to_string(v.back())) / "manifest.json");
    out.push_back({{"corpus", c}, {"versions", v}, {"latest", v.back()}, {"metadata", manifest.at("metadata")}});
  }
  return out;
}

}  // namespace precog
