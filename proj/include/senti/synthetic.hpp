#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "senti/preprocess.hpp"

namespace senti {

// Keyword-labelled text for experiments without the real corpora. Every class
// owns a set of cue words; a document is filler words plus, with probability
// `signal`, one or two cues of its own class. With signal = 1 the corpus is
// separable by keyword.
struct SyntheticOptions {
  std::size_t size = 2000;
  std::vector<double> class_weights = {1.0, 1.0, 1.0};  // relative class frequencies
  double signal = 1.0;
  std::size_t min_words = 4;
  std::size_t max_words = 10;
  std::uint64_t seed = 1;
};

// {"negative", "positive"} for two classes, {"negative", "neutral",
// "positive"} for three, otherwise "class0", "class1", ...
std::vector<std::string> synthetic_class_names(std::size_t num_classes);

// Exact class counts for n items by largest remainder.
std::vector<std::size_t> allocate_counts(std::size_t n, const std::vector<double>& weights);

// Raw documents, labels named per synthetic_class_names, in shuffled order.
std::vector<RawDocument> synthetic_corpus(const SyntheticOptions& options);

// A CSV with the Twitter US Airline column set and its class proportions
// (62.69% negative, 21.17% neutral, 16.14% positive). Tweets carry mentions,
// hashtags, URLs, digits and punctuation; a few rows have an empty text field.
std::string synthetic_airline_csv(std::size_t rows, std::uint64_t seed, double signal = 0.8);

}  // namespace senti
