#include <csignal>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "precog/http_api.hpp"
#include "precog/oracle.hpp"
#include "precog/synthetic.hpp"

using namespace precog;
using nlohmann::json;

namespace {

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string text_arg(const std::string& file, const std::string& text) {
  if (!file.empty()) return read_file(file);
  if (!text.empty()) return text;
  std::ostringstream in;
  in << std::cin.rdbuf();
  return in.str();
}

Segmentation fixed_blocks(const std::string& text, int every) {
  Segmentation s;
  const int n = static_cast<int>(split_sentences(text).size());
  for (int b = every; b < n; b += every) s.boundaries.push_back(b);
  return s;
}

HttpServer* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pre-hoc data quality feedback: models, explanations and constraint validation"};
  app.require_subcommand(1);
  std::string store = default_store_path();
  app.add_option("--store", store, "Model store directory (default $PRECOG_STORE or ./precog_store)");

  std::string corpusName, dataFile, paramsFile, ddlFile, file, text, table, record, catalogDir, goldFile, outFile;
  std::string host = "127.0.0.1", staticDir, label = "high";
  std::uint64_t seed = 1;
  bool seedSet = false;
  int port = 8080, window = 3;
  std::size_t instances = 100, docs = 200, maxSize = 2;
  double minSupport = 0.15;

  auto* train = app.add_subcommand("train", "Train and publish a bundle from a JSONL corpus");
  train->add_option("--corpus", corpusName, "Corpus name")->required();
  train->add_option("--data", dataFile, "JSONL with text, label and optional split")->required()->check(CLI::ExistingFile);
  train->add_option("--params", paramsFile, "JSON file with training parameters")->check(CLI::ExistingFile);
  train->add_option("--ddl", ddlFile, "DDL declaring FEF bindings on a FEATURE table")->check(CLI::ExistingFile);
  train->add_option("--seed", seed, "Random seed")->each([&](const std::string&) { seedSet = true; });

  auto* explain = app.add_subcommand("explain", "Print the feedback report for one document");
  explain->add_option("--corpus", corpusName, "Corpus name")->required();
  explain->add_option("--file", file, "Document file (default: stdin)");
  explain->add_option("--text", text, "Document text");

  auto* segment = app.add_subcommand("segment", "Print the topic segmentation of one document");
  segment->add_option("--corpus", corpusName, "Corpus whose topic model to use")->required();
  segment->add_option("--file", file, "Document file (default: stdin)");
  segment->add_option("--text", text, "Document text");
  segment->add_option("--window", window, "Sentences per side of each gap");

  auto* validate = app.add_subcommand("validate", "Validate one record against DDL constraints");
  validate->add_option("--ddl", ddlFile, "DDL file")->required()->check(CLI::ExistingFile);
  validate->add_option("--table", table, "Crowd table")->required();
  validate->add_option("--record", record, "Record as a JSON object")->required();
  validate->add_option("--catalog", catalogDir, "Directory of <table>.jsonl rows")->check(CLI::ExistingDirectory);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--ddl", ddlFile, "DDL file for /validate")->check(CLI::ExistingFile);
  serve->add_option("--catalog", catalogDir, "Catalog directory for /validate")->check(CLI::ExistingDirectory);
  serve->add_option("--static", staticDir, "Directory of static UI assets")->check(CLI::ExistingDirectory);

  auto* bench = app.add_subcommand("bench-segment", "Rank segmenters by mean WindowDiff on a gold set");
  bench->add_option("--corpus", corpusName, "Corpus whose topic model to use")->required();
  bench->add_option("--gold", goldFile, "JSONL with text and boundaries")->required()->check(CLI::ExistingFile);

  auto* jargon = app.add_subcommand("mine-jargon", "Frequent term sets in one label of a corpus");
  jargon->add_option("--data", dataFile, "JSONL corpus")->required()->check(CLI::ExistingFile);
  jargon->add_option("--label", label, "Label whose documents are mined");
  jargon->add_option("--min-support", minSupport, "Minimum document support in (0,1]");
  jargon->add_option("--max-size", maxSize, "Largest term set");

  auto* oracle = app.add_subcommand("oracle-report", "Compare heuristic and exact responsibilities on random forests");
  oracle->add_option("--instances", instances, "Random instances");
  oracle->add_option("--seed", seed, "Random seed");

  auto* synth = app.add_subcommand("synth-corpus", "Write a synthetic planted-feature corpus as JSONL");
  synth->add_option("--out", outFile, "Output file")->required();
  synth->add_option("--docs", docs, "Number of documents");
  synth->add_option("--seed", seed, "Random seed");
  synth->add_option("--gold", goldFile, "Also write two-topic documents with known boundaries here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      TrainConfig cfg;
      if (!paramsFile.empty()) cfg = TrainConfig::from_json(json::parse(read_file(paramsFile)));
      if (seedSet) cfg.seed = seed;
      if (!ddlFile.empty()) cfg.ddl = read_file(ddlFile);
      ModelStore s(store);
      const int version = s.publish(train_bundle(corpusName, load_corpus_jsonl(dataFile), cfg));
      print({{"corpus", corpusName}, {"version", version}, {"metadata", s.get(corpusName)->metadata}});
    } else if (*explain) {
      print(get_feedback(*ModelStore(store).get(corpusName), text_arg(file, text)));
    } else if (*segment) {
      const auto doc = text_arg(file, text);
      const auto bundle = ModelStore(store).get(corpusName);
      TilingParams p;
      p.window = window;
      json out = json::array();
      for (const auto& s : topictiling_segment(doc, *bundle->lda, p))
        out.push_back({{"startChar", codepoint_index(doc, s.startByte)},
                       {"endChar", codepoint_index(doc, s.endByte)},
                       {"sentences", {s.firstSentence, s.endSentence}},
                       {"text", s.text}});
      print(out);
    } else if (*validate) {
      const ddl::Validator v(ddl::parse_ddl(read_file(ddlFile)));
      const auto cat = catalogDir.empty() ? ddl::Catalog{} : ddl::Catalog::load(catalogDir);
      json out = json::array();
      for (const auto& viol : v.validate(table, json::parse(record), cat)) out.push_back(viol.to_json());
      print({{"violations", out}});
    } else if (*serve) {
      ModelStore s(store);
      std::optional<ddl::Validator> validator;
      if (!ddlFile.empty()) validator.emplace(ddl::parse_ddl(read_file(ddlFile)));
      Service svc(s, std::move(validator), catalogDir.empty() ? ddl::Catalog{} : ddl::Catalog::load(catalogDir));
      HttpServer server(svc, staticDir);
      const int bound = server.bind(host, port);
      std::cout << bound << std::endl;
      g_server = &server;
      std::signal(SIGINT, [](int) { g_server->stop(); });
      std::signal(SIGTERM, [](int) { g_server->stop(); });
      server.listen();
    } else if (*bench) {
      const auto bundle = ModelStore(store).get(corpusName);
      const auto& lda = *bundle->lda;
      std::vector<NamedSegmenter> segs;
      for (int w : {2, 3, 5}) {
        TilingParams p;
        p.window = w;
        segs.push_back({"topictiling_w" + std::to_string(w),
                        [&lda, p](const std::string& t) { return boundaries_of(topictiling_segment(t, lda, p)); }});
      }
      segs.push_back({"fixed_5", [](const std::string& t) { return fixed_blocks(t, 5); }});
      segs.push_back({"single_segment", [](const std::string&) { return Segmentation{}; }});
      print(benchmark_segmenters(segs, parse_gold_jsonl(read_file(goldFile))).to_json());
    } else if (*jargon) {
      const auto corpus = load_corpus_jsonl(dataFile);
      const auto stop = load_stopwords(default_data_dir() + "/stopwords.txt");
      std::vector<std::set<std::string>> tx;
      for (const auto& d : corpus.documents)
        if (d.label == label) {
          const auto toks = remove_stopwords(tokenize(d.text), stop);
          tx.emplace_back(toks.begin(), toks.end());
        }
      json out = json::array();
      for (const auto& s : mine_jargon(tx, minSupport, maxSize)) out.push_back({{"terms", s.terms}, {"support", s.support}});
      print(out);
    } else if (*oracle) {
      ImpactConfig cfg;
      cfg.confidence = ConfidenceSource::forestMajority;
      print(agreement_report(instances, seed, RandomForestSpec{}, cfg).to_json());
    } else if (*synth) {
      std::ofstream out(outFile, std::ios::binary);
      for (const auto& d : synthetic::planted_corpus(seed, docs).documents)
        out << json{{"text", d.text}, {"label", d.label}, {"split", d.split == Split::train ? "train" : "test"}}.dump()
            << "\n";
      if (!out) throw Error("failed to write " + outFile);
      if (!goldFile.empty()) {
        std::ofstream g(goldFile, std::ios::binary);
        Rng rng(seed);
        const auto& topics = synthetic::topic_terms();
        for (std::size_t i = 0; i < 20; ++i) {
          const auto a = i % topics.size(), b = (i + 1 + i / topics.size()) % topics.size();
          const auto d = synthetic::two_topic_document(rng, topics[a], topics[b == a ? (a + 1) % topics.size() : b], 8 + 2 * (i % 5));
          g << json{{"text", d.text}, {"boundaries", d.reference.boundaries}}.dump() << "\n";
        }
        if (!g) throw Error("failed to write " + goldFile);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
