#include "precog/segment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace precog {

using nlohmann::json;

namespace {

double cosine(const Vector& a, const Vector& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

std::vector<std::string> window_tokens(const std::vector<std::vector<std::string>>& sentences, std::size_t from,
                                       std::size_t to) {
  std::vector<std::string> out;
  for (std::size_t s = from; s < to; ++s) out.insert(out.end(), sentences[s].begin(), sentences[s].end());
  return out;
}

void check_segmentation(const Segmentation& s, int docLength) {
  for (std::size_t i = 0; i < s.boundaries.size(); ++i) {
    const int b = s.boundaries[i];
    if (b <= 0 || b >= docLength) throw Error("segmentation boundary outside document: " + std::to_string(b));
    if (i > 0 && b <= s.boundaries[i - 1]) throw Error("segmentation boundaries must be strictly increasing");
  }
}

}  // namespace

std::vector<Segment> topictiling_segment(const std::string& doc, const LdaModel& model, const TilingParams& params,
                                         TilingTrace* trace) {
  if (params.window < 1) throw Error("topictiling: window must be at least 1");
  const auto spans = split_sentences(doc);
  const std::size_t m = spans.size();
  std::vector<std::vector<std::string>> sentTokens;
  sentTokens.reserve(m);
  for (const auto& s : spans) sentTokens.push_back(tokenize(std::string_view(doc).substr(s.begin, s.size())));

  std::vector<int> cuts;  // sentence-gap indices
  if (m > 1) {
    const auto w = static_cast<std::size_t>(params.window);
    std::vector<double> sim(m - 1), depth(m - 1, 0.0);
    for (std::size_t g = 1; g < m; ++g) {
      const auto left = infer_topic_dist(model, window_tokens(sentTokens, g >= w ? g - w : 0, g)).dist;
      const auto right = infer_topic_dist(model, window_tokens(sentTokens, g, std::min(m, g + w))).dist;
      sim[g - 1] = cosine(left, right);
    }
    for (std::size_t i = 0; i < sim.size(); ++i) {
      double hl = sim[i], hr = sim[i];
      for (std::size_t j = i; j > 0 && sim[j - 1] >= hl; --j) hl = sim[j - 1];
      for (std::size_t j = i + 1; j < sim.size() && sim[j] >= hr; ++j) hr = sim[j];
      depth[i] = (hl - sim[i]) + (hr - sim[i]);
    }
    double threshold;
    if (params.depthThreshold) {
      threshold = *params.depthThreshold;
    } else {
      const double mean = std::accumulate(depth.begin(), depth.end(), 0.0) / static_cast<double>(depth.size());
      double var = 0.0;
      for (double d : depth) var += (d - mean) * (d - mean);
      threshold = std::max(mean + 0.5 * std::sqrt(var / static_cast<double>(depth.size())), params.minDepth);
    }
    for (std::size_t i = 0; i < sim.size(); ++i) {
      const bool localMin = (i == 0 || sim[i] <= sim[i - 1]) && (i + 1 == sim.size() || sim[i] <= sim[i + 1]);
      if (localMin && depth[i] > threshold) cuts.push_back(static_cast<int>(i + 1));
    }

    // Merge fragments shorter than the minimum into the more similar neighbour.
    const auto minLen = static_cast<std::size_t>(std::max(1, params.minSegmentSentences));
    while (!cuts.empty()) {
      std::vector<std::size_t> bounds{0};
      for (int c : cuts) bounds.push_back(static_cast<std::size_t>(c));
      bounds.push_back(m);
      std::size_t shortSeg = bounds.size();
      for (std::size_t s = 0; s + 1 < bounds.size(); ++s)
        if (bounds[s + 1] - bounds[s] < minLen) {
          shortSeg = s;
          break;
        }
      if (shortSeg == bounds.size()) break;
      // candidate cuts to drop: the segment's left cut (index shortSeg-1) or right cut (index shortSeg)
      const bool hasLeft = shortSeg > 0;
      const bool hasRight = shortSeg < cuts.size();
      std::size_t drop;
      if (hasLeft && hasRight) {
        const double sl = sim[static_cast<std::size_t>(cuts[shortSeg - 1]) - 1];
        const double sr = sim[static_cast<std::size_t>(cuts[shortSeg]) - 1];
        drop = sl >= sr ? shortSeg - 1 : shortSeg;
      } else {
        drop = hasLeft ? shortSeg - 1 : shortSeg;
      }
      cuts.erase(cuts.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    if (trace) {
      trace->similarity = sim;
      trace->depth = depth;
      trace->threshold = threshold;
    }
  }

  std::vector<Segment> out;
  std::vector<std::size_t> bounds{0};
  for (int c : cuts) bounds.push_back(static_cast<std::size_t>(c));
  bounds.push_back(m);
  for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
    Segment seg;
    seg.firstSentence = bounds[s];
    seg.endSentence = bounds[s + 1];
    seg.startByte = s == 0 ? 0 : spans[bounds[s]].begin;
    seg.endByte = s + 2 == bounds.size() ? doc.size() : spans[bounds[s + 1]].begin;
    seg.text = doc.substr(seg.startByte, seg.endByte - seg.startByte);
    seg.topicDist = infer_topic_dist(model, window_tokens(sentTokens, seg.firstSentence, seg.endSentence)).dist;
    out.push_back(std::move(seg));
  }
  if (out.empty()) {  // whitespace-only or empty document
    Segment seg;
    seg.endByte = doc.size();
    seg.text = doc;
    seg.topicDist = infer_topic_dist(model, {}).dist;
    out.push_back(std::move(seg));
  }
  return out;
}

Segmentation boundaries_of(const std::vector<Segment>& segments) {
  Segmentation s;
  for (std::size_t i = 1; i < segments.size(); ++i) s.boundaries.push_back(static_cast<int>(segments[i].firstSentence));
  return s;
}

double window_diff(const Segmentation& reference, const Segmentation& hypothesis, int docLength, int k) {
  if (k < 1) throw Error("window_diff: k must be at least 1");
  if (docLength <= k) throw Error("window_diff: document length must exceed k");
  check_segmentation(reference, docLength);
  check_segmentation(hypothesis, docLength);
  auto count = [](const Segmentation& s, int from, int to) {
    return std::count_if(s.boundaries.begin(), s.boundaries.end(), [&](int b) { return b > from && b <= to; });
  };
  int errors = 0;
  for (int i = 0; i + k < docLength; ++i)
    if (count(reference, i, i + k) != count(hypothesis, i, i + k)) ++errors;
  return static_cast<double>(errors) / static_cast<double>(docLength - k);
}

int default_window_diff_k(const Segmentation& reference, int docLength) {
  const double meanLen = static_cast<double>(docLength) / static_cast<double>(reference.boundaries.size() + 1);
  return std::max(1, static_cast<int>(std::lround(meanLen / 2.0)));
}

std::vector<GoldDocument> parse_gold_jsonl(std::string_view jsonl) {
  std::vector<GoldDocument> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      out.push_back({j.at("text").get<std::string>(), {j.at("boundaries").get<std::vector<int>>()}});
    } catch (const json::exception& e) {
      throw Error("gold line " + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return out;
}

json BenchmarkReport::to_json() const {
  json rank = json::array();
  for (const auto& e : ranking) rank.push_back({{"name", e.name}, {"meanWindowDiff", e.meanWindowDiff}, {"documents", e.documents}});
  return {{"ranking", rank}, {"recommended", recommended()}, {"skipped", skipped}};
}

BenchmarkReport benchmark_segmenters(const std::vector<NamedSegmenter>& segmenters,
                                     const std::vector<GoldDocument>& gold) {
  BenchmarkReport rep;
  std::vector<double> sums(segmenters.size(), 0.0);
  std::size_t used = 0;
  for (const auto& g : gold) {
    const int n = static_cast<int>(split_sentences(g.text).size());
    const int k = default_window_diff_k(g.reference, n);
    if (n <= k) {
      ++rep.skipped;
      continue;
    }
    ++used;
    for (std::size_t s = 0; s < segmenters.size(); ++s) {
      Segmentation hyp = segmenters[s].segment(g.text);
      std::erase_if(hyp.boundaries, [&](int b) { return b <= 0 || b >= n; });
      sums[s] += window_diff(g.reference, hyp, n, k);
    }
  }
  for (std::size_t s = 0; s < segmenters.size(); ++s)
    rep.ranking.push_back({segmenters[s].name, used ? sums[s] / static_cast<double>(used) : 0.0, used});
  std::stable_sort(rep.ranking.begin(), rep.ranking.end(),
                   [](const BenchmarkEntry& a, const BenchmarkEntry& b) { return a.meanWindowDiff < b.meanWindowDiff; });
  return rep;
}

}  // namespace precog
