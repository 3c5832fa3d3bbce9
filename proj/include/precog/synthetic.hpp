#pragma once

#include <string>
#include <vector>

#include "precog/segment.hpp"
#include "precog/text.hpp"

namespace precog::synthetic {

/// Word lists for a made-up laptop review domain; topic t uses topic_terms()[t].
const std::vector<std::vector<std::string>>& topic_terms();

/// Planted rule: "high" documents have 3 topics x 4 long, specific sentences; "low"
/// documents have 2-4 short, vague sentences about a single topic. Every fourth document
/// goes to the test split.
LabeledCorpus planted_corpus(std::uint64_t seed, std::size_t documents);

/// A high-quality style document of roughly `words` words.
std::string long_review(std::uint64_t seed, std::size_t words);

/// Ten sentences: five from one vocabulary, five from a disjoint one; the true boundary is 5.
GoldDocument two_topic_document(Rng& rng, const std::vector<std::string>& first, const std::vector<std::string>& second,
                                std::size_t sentences = 10, std::size_t wordsPerSentence = 8);

}  // namespace precog::synthetic
