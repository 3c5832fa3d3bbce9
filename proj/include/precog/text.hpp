#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace precog {

/// Half-open byte range [begin, end) into a UTF-8 string.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

/// Maximal runs of alphanumeric code points. Every non-ASCII code point outside the
/// common punctuation blocks counts as alphanumeric.
std::vector<Span> word_spans(std::string_view text);

/// Lowercased words (ASCII and Latin-1 case folding).
std::vector<std::string> tokenize(std::string_view text);

/// Sentences end at '.', '!' or '?' followed by whitespace or end of text. The spans tile
/// the text exactly: leading whitespace joins the first sentence and trailing whitespace
/// joins the sentence it follows. Whitespace-only text has no sentences.
std::vector<Span> split_sentences(std::string_view text);

/// Number of Unicode scalar values in text[0, byteOffset).
std::size_t codepoint_index(std::string_view text, std::size_t byteOffset);

std::size_t codepoint_length(std::string_view text);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const std::set<std::string>& stopwords);

std::set<std::string> parse_stopwords(std::string_view text);
std::set<std::string> load_stopwords(const std::string& path);

std::string read_file(const std::string& path);

enum class Split { train, test };

struct Document {
  std::string text;
  std::string label;
  Split split = Split::train;
};

struct LabeledCorpus {
  std::vector<Document> documents;

  std::vector<const Document*> in(Split s) const;
  std::vector<std::string> labels() const;  // sorted, distinct
};

/// One JSON object per line: {"text": ..., "label": ...} with an optional "split"
/// ("train" or "test"). Blank lines are ignored.
LabeledCorpus parse_corpus_jsonl(std::string_view jsonl);
LabeledCorpus load_corpus_jsonl(const std::string& path);

}  // namespace precog
