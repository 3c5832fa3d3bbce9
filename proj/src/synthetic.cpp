#include "precog/synthetic.hpp"

namespace precog::synthetic {

namespace {

const std::vector<std::string> kConnectors{"the", "and", "with", "after", "during", "for", "while", "its", "about", "really"};
const std::vector<std::string> kDetail{"two", "three", "eight", "hours", "inches", "percent", "days", "weeks"};
const std::vector<std::string> kVague{"good", "nice", "great", "bad", "stuff", "thing", "okay", "it", "is",
                                      "so",   "very", "love", "product", "awesome", "terrible", "whatever"};

std::string pick(Rng& rng, const std::vector<std::string>& v) { return v[rng.below(v.size())]; }

std::string finish(std::vector<std::string> words, const char* end) {
  std::string s;
  for (std::size_t i = 0; i < words.size(); ++i) s += (i ? " " : "") + words[i];
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s + end;
}

std::string specific_sentence(Rng& rng, const std::vector<std::string>& topic) {
  const std::size_t n = 11 + rng.below(6);
  std::vector<std::string> w;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    w.push_back(u < 0.6 ? pick(rng, topic) : u < 0.85 ? pick(rng, kConnectors) : pick(rng, kDetail));
  }
  return finish(std::move(w), ".");
}

std::string vague_sentence(Rng& rng, const std::vector<std::string>& topic) {
  const std::size_t n = 4 + rng.below(3);
  std::vector<std::string> w;
  for (std::size_t i = 0; i < n; ++i) w.push_back(pick(rng, kVague));
  w.insert(w.begin() + static_cast<std::ptrdiff_t>(rng.below(w.size())), pick(rng, topic));
  if (rng.uniform() < 0.3) w[rng.below(w.size())] = "GREAT";
  return finish(std::move(w), rng.uniform() < 0.5 ? "!" : ".");
}

std::vector<std::size_t> distinct_topics(Rng& rng, std::size_t k) {
  std::vector<std::size_t> all(topic_terms().size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + rng.below(all.size() - i)]);
  all.resize(k);
  return all;
}

}  // namespace

const std::vector<std::vector<std::string>>& topic_terms() {
  static const std::vector<std::vector<std::string>> kTopics{
      {"battery", "charge", "charger", "power", "lasts", "runtime", "adapter", "standby"},
      {"screen", "display", "brightness", "resolution", "colors", "panel", "glare", "pixels"},
      {"keyboard", "keys", "typing", "trackpad", "backlight", "travel", "layout", "touchpad"},
      {"processor", "memory", "speed", "benchmark", "ram", "cpu", "multitasking", "thermal"},
      {"chassis", "aluminum", "hinge", "weight", "sturdy", "lid", "ports", "design"},
      {"speakers", "sound", "bass", "volume", "microphone", "headphones", "audio", "loud"},
  };
  return kTopics;
}

LabeledCorpus planted_corpus(std::uint64_t seed, std::size_t documents) {
  Rng rng(seed);
  LabeledCorpus c;
  for (std::size_t d = 0; d < documents; ++d) {
    Document doc;
    doc.split = d % 4 == 3 ? Split::test : Split::train;
    std::vector<std::string> sentences;
    if (d % 2 == 0) {
      doc.label = "high";
      for (auto t : distinct_topics(rng, 3))
        for (int s = 0; s < 4; ++s) sentences.push_back(specific_sentence(rng, topic_terms()[t]));
    } else {
      doc.label = "low";
      const auto& topic = topic_terms()[rng.below(topic_terms().size())];
      const std::size_t n = 2 + rng.below(3);
      for (std::size_t s = 0; s < n; ++s) sentences.push_back(vague_sentence(rng, topic));
    }
    for (std::size_t s = 0; s < sentences.size(); ++s) doc.text += (s ? " " : "") + sentences[s];
    c.documents.push_back(std::move(doc));
  }
  return c;
}

std::string long_review(std::uint64_t seed, std::size_t words) {
  Rng rng(seed);
  std::string text;
  std::size_t count = 0;
  while (count < words) {
    const auto topics = distinct_topics(rng, 2);
    for (auto t : topics) {
      for (int s = 0; s < 3 && count < words; ++s) {
        const auto sentence = rng.uniform() < 0.25 ? vague_sentence(rng, topic_terms()[t])
                                                   : specific_sentence(rng, topic_terms()[t]);
        count += tokenize(sentence).size();
        text += (text.empty() ? "" : " ") + sentence;
      }
    }
  }
  return text;
}

GoldDocument two_topic_document(Rng& rng, const std::vector<std::string>& first, const std::vector<std::string>& second,
                                std::size_t sentences, std::size_t wordsPerSentence) {
  GoldDocument g;
  const std::size_t half = sentences / 2;
  for (std::size_t s = 0; s < sentences; ++s) {
    std::vector<std::string> w;
    for (std::size_t i = 0; i < wordsPerSentence; ++i) w.push_back(pick(rng, s < half ? first : second));
    g.text += (s ? " " : "") + finish(std::move(w), ".");
  }
  g.reference.boundaries = {static_cast<int>(half)};
  return g;
}

}  // namespace precog::synthetic
