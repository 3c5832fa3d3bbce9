#include <cctype>
#include <cmath>

#include "precog/features.hpp"

namespace precog {

namespace {

bool is_vowel(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y': return true;
    default: return false;
  }
}

}  // namespace

std::size_t count_syllables(std::string_view word) {
  std::size_t groups = 0;
  bool prevVowel = false;
  std::size_t alpha = 0;
  for (char c : word) {
    if (!std::isalpha(static_cast<unsigned char>(c))) {
      prevVowel = false;
      continue;
    }
    ++alpha;
    const bool v = is_vowel(c);
    if (v && !prevVowel) ++groups;
    prevVowel = v;
  }
  if (alpha == 0) return 1;
  const auto n = word.size();
  if (groups > 1 && n >= 2 && std::tolower(static_cast<unsigned char>(word[n - 1])) == 'e' &&
      std::tolower(static_cast<unsigned char>(word[n - 2])) != 'l' && !is_vowel(word[n - 2]))
    --groups;
  return groups == 0 ? 1 : groups;
}

TextCounts text_counts(std::string_view text) {
  TextCounts c;
  for (const auto& s : word_spans(text)) {
    const auto w = text.substr(s.begin, s.size());
    ++c.words;
    for (std::size_t i = 0; i < w.size(); ++i)
      if ((static_cast<unsigned char>(w[i]) & 0xC0) != 0x80) ++c.letters;
    const auto syl = count_syllables(w);
    c.syllables += syl;
    if (syl >= 3) ++c.complexWords;
  }
  for (const auto& s : split_sentences(text))
    if (!word_spans(text.substr(s.begin, s.size())).empty()) ++c.sentences;
  return c;
}

ReadabilityScores readability_scores(std::string_view text) {
  const auto c = text_counts(text);
  ReadabilityScores r;
  if (c.words == 0 || c.sentences == 0) {
    r.degenerate = true;
    return r;
  }
  const double W = static_cast<double>(c.words);
  const double S = static_cast<double>(c.sentences);
  const double L = static_cast<double>(c.letters);
  r.ari = 4.71 * (L / W) + 0.5 * (W / S) - 21.43;
  r.colemanLiau = 0.0588 * (100.0 * L / W) - 0.296 * (100.0 * S / W) - 15.8;
  r.fleschReadingEase = 206.835 - 1.015 * (W / S) - 84.6 * (static_cast<double>(c.syllables) / W);
  r.gunningFog = 0.4 * (W / S + 100.0 * static_cast<double>(c.complexWords) / W);
  r.smog = 1.0430 * std::sqrt(static_cast<double>(c.complexWords) * 30.0 / S) + 3.1291;
  return r;
}

}  // namespace precog
