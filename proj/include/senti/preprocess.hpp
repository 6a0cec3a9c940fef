#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace senti {

struct RawDocument {
  std::string text;
  std::string label;
};

struct CleanDocument {
  std::vector<std::string> words;
  std::size_t label = 0;

  bool operator==(const CleanDocument&) const = default;
};

struct Dropped {
  std::string reason;
};

// Locale-independent lowercase mapping over UTF-8. Covers ASCII, Latin-1,
// Latin Extended-A, basic Greek and Cyrillic; other code points pass through.
std::string lowercase_fold(std::string_view text);

// Removes URLs, @-mentions, hashtag markers (or whole hashtags when
// keep_hashtag_words is false), punctuation, digits and every other
// non-letter; apostrophes are deleted so contractions stay one word.
// Whitespace runs collapse to a single space. Expects lowercased input.
std::string strip_noise(std::string_view text, bool keep_hashtag_words = true);

std::vector<std::string> split_whitespace(std::string_view text);

using StopwordSet = std::unordered_set<std::string>;

StopwordSet default_stopwords();
StopwordSet load_stopwords(const std::filesystem::path& path);

std::vector<std::string> remove_stopwords(std::vector<std::string> words, const StopwordSet& stopwords);

// Exception table first, then ordered suffix rules (-ies/-ied -> y, -sses,
// -es after sibilants, plural -s, -ing/-ed with undoubling and e-restoration).
// Rules are applied until the word stops changing, so lemmatize is
// idempotent. Non-ASCII words only go through the exception table.
class Lemmatizer {
 public:
  Lemmatizer();

  // Lines of "form<whitespace>lemma"; a line with a single word protects it
  // from the suffix rules. '#' starts a comment.
  void load_exceptions(const std::filesystem::path& path);
  void add_exception(std::string form, std::string lemma);

  std::string lemmatize(std::string_view word) const;

 private:
  std::string step(const std::string& word) const;

  std::unordered_map<std::string, std::string> exceptions_;
};

struct PreprocessOptions {
  StopwordSet stopwords = default_stopwords();
  bool keep_hashtag_words = true;
};

// lowercase_fold -> strip_noise -> whitespace split -> remove_stopwords ->
// lemmatize. Deterministic and safe to share across threads.
class Preprocessor {
 public:
  Preprocessor() = default;
  Preprocessor(PreprocessOptions options, Lemmatizer lemmatizer)
      : options_(std::move(options)), lemmatizer_(std::move(lemmatizer)) {}

  std::vector<std::string> clean_words(std::string_view text) const;

  // class_names must contain doc.label; a document with no surviving words
  // comes back as Dropped.
  std::variant<CleanDocument, Dropped> run(const RawDocument& doc, std::span<const std::string> class_names) const;

  const PreprocessOptions& options() const noexcept { return options_; }
  const Lemmatizer& lemmatizer() const noexcept { return lemmatizer_; }

 private:
  PreprocessOptions options_;
  Lemmatizer lemmatizer_;
};

std::size_t class_index(std::span<const std::string> class_names, std::string_view label);

}  // namespace senti
