#include "precog/text.hpp"

#include <fstream>
#include <sstream>

#include "precog/common.hpp"

namespace precog {

namespace {

struct CodePoint {
  char32_t value = 0;
  std::size_t length = 1;
};

CodePoint decode(std::string_view s, std::size_t i) {
  const auto c = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> char32_t {
    if (i + k >= s.size()) return 0xFFFD;
    const auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? static_cast<char32_t>(b & 0x3F) : 0xFFFD;
  };
  if (c < 0x80) return {c, 1};
  if ((c >> 5) == 0x6 && i + 1 < s.size()) return {(static_cast<char32_t>(c & 0x1F) << 6) | cont(1), 2};
  if ((c >> 4) == 0xE && i + 2 < s.size())
    return {(static_cast<char32_t>(c & 0x0F) << 12) | (cont(1) << 6) | cont(2), 3};
  if ((c >> 3) == 0x1E && i + 3 < s.size())
    return {(static_cast<char32_t>(c & 0x07) << 18) | (cont(1) << 12) | (cont(2) << 6) | cont(3), 4};
  return {0xFFFD, 1};
}

bool is_word_char(char32_t c) {
  if (c < 0x80) return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  if (c <= 0xBF) return false;                    // Latin-1 punctuation and symbols
  if (c == 0xD7 || c == 0xF7) return false;       // multiplication / division signs
  if (c >= 0x2000 && c <= 0x206F) return false;   // general punctuation
  if (c >= 0x3000 && c <= 0x303F) return false;   // CJK punctuation
  if (c == 0xFFFD) return false;
  return true;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

char32_t fold(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  return c;
}

}  // namespace

std::vector<Span> word_spans(std::string_view text) {
  std::vector<Span> out;
  std::size_t i = 0;
  bool inWord = false;
  std::size_t start = 0;
  while (i < text.size()) {
    const auto cp = decode(text, i);
    const bool w = is_word_char(cp.value);
    if (w && !inWord) {
      start = i;
      inWord = true;
    } else if (!w && inWord) {
      out.push_back({start, i});
      inWord = false;
    }
    i += cp.length;
  }
  if (inWord) out.push_back({start, text.size()});
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& s : word_spans(text)) {
    std::string tok;
    for (std::size_t i = s.begin; i < s.end;) {
      const auto cp = decode(text, i);
      append_utf8(tok, fold(cp.value));
      i += cp.length;
    }
    out.push_back(std::move(tok));
  }
  return out;
}

std::vector<Span> split_sentences(std::string_view text) {
  std::vector<Span> out;
  std::size_t start = 0;
  bool content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (!is_space(c)) content = true;
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || is_space(text[i + 1])) && content) {
      std::size_t end = i + 1;
      while (end < text.size() && is_space(text[end])) ++end;
      out.push_back({start, end});
      start = end;
      i = end - 1;
      content = false;
    }
  }
  if (start < text.size()) {
    if (content)
      out.push_back({start, text.size()});
    else if (!out.empty())
      out.back().end = text.size();
  }
  return out;
}

std::size_t codepoint_index(std::string_view text, std::size_t byteOffset) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < byteOffset && i < text.size(); ++i)
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) ++n;
  return n;
}

std::size_t codepoint_length(std::string_view text) { return codepoint_index(text, text.size()); }

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const std::set<std::string>& stopwords) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!stopwords.count(t)) out.push_back(t);
  return out;
}

std::set<std::string> parse_stopwords(std::string_view text) {
  std::set<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && is_space(line.back())) line.pop_back();
    std::size_t b = 0;
    while (b < line.size() && is_space(line[b])) ++b;
    if (b < line.size() && line[b] != '#') out.insert(line.substr(b));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::string> load_stopwords(const std::string& path) { return parse_stopwords(read_file(path)); }

std::vector<const Document*> LabeledCorpus::in(Split s) const {
  std::vector<const Document*> out;
  for (const auto& d : documents)
    if (d.split == s) out.push_back(&d);
  return out;
}

std::vector<std::string> LabeledCorpus::labels() const {
  std::set<std::string> s;
  for (const auto& d : documents) s.insert(d.label);
  return {s.begin(), s.end()};
}

LabeledCorpus parse_corpus_jsonl(std::string_view jsonl) {
  LabeledCorpus corpus;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("corpus line " + std::to_string(lineNo) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("text") || !j.contains("label") || !j["text"].is_string() ||
        !j["label"].is_string())
      throw Error("corpus line " + std::to_string(lineNo) + ": expected {text, label} strings");
    Document d{j["text"].get<std::string>(), j["label"].get<std::string>(), Split::train};
    if (j.contains("split")) {
      const auto s = j["split"].get<std::string>();
      if (s == "test")
        d.split = Split::test;
      else if (s != "train")
        throw Error("corpus line " + std::to_string(lineNo) + ": unknown split " + s);
    }
    corpus.documents.push_back(std::move(d));
  }
  return corpus;
}

LabeledCorpus load_corpus_jsonl(const std::string& path) { return parse_corpus_jsonl(read_file(path)); }

}  // namespace precog
