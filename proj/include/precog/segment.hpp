#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "precog/lda.hpp"
#include "precog/text.hpp"

namespace precog {

struct Segment {
  std::size_t startByte = 0;
  std::size_t endByte = 0;
  std::size_t firstSentence = 0;
  std::size_t endSentence = 0;  // exclusive
  std::string text;
  Vector topicDist;
};

/// Boundaries as sentence-gap indices: b means a break between sentence b-1 and b.
struct Segmentation {
  std::vector<int> boundaries;
};

struct TilingParams {
  int window = 3;                        // sentences on each side of a gap
  std::optional<double> depthThreshold;  // default: mean + 0.5 * std of the document's depth scores
  double minDepth = 0.1;                 // floor applied to the default threshold
  int minSegmentSentences = 2;
};

struct TilingTrace {
  std::vector<double> similarity;  // per gap 1..m-1, stored at index gap-1
  std::vector<double> depth;
  double threshold = 0.0;
};

/// Sliding-window topic segmentation. Segments tile the document byte-for-byte.
std::vector<Segment> topictiling_segment(const std::string& doc, const LdaModel& model, const TilingParams& params = {},
                                         TilingTrace* trace = nullptr);

Segmentation boundaries_of(const std::vector<Segment>& segments);

/// Fraction of the docLength-k windows where reference and hypothesis disagree on the
/// number of boundaries inside the window.
double window_diff(const Segmentation& reference, const Segmentation& hypothesis, int docLength, int k);

/// Half the mean reference segment length, rounded, at least 1.
int default_window_diff_k(const Segmentation& reference, int docLength);

struct GoldDocument {
  std::string text;
  Segmentation reference;
};

std::vector<GoldDocument> parse_gold_jsonl(std::string_view jsonl);

struct NamedSegmenter {
  std::string name;
  std::function<Segmentation(const std::string&)> segment;
};

struct BenchmarkEntry {
  std::string name;
  double meanWindowDiff = 0.0;
  std::size_t documents = 0;
};

struct BenchmarkReport {
  std::vector<BenchmarkEntry> ranking;  // ascending mean WindowDiff, registration order on ties
  std::size_t skipped = 0;              // gold documents too short for their window
  std::string recommended() const { return ranking.empty() ? std::string() : ranking.front().name; }
  nlohmann::json to_json() const;
};

BenchmarkReport benchmark_segmenters(const std::vector<NamedSegmenter>& segmenters,
                                     const std::vector<GoldDocument>& gold);

}  // namespace precog
