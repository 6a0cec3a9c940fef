#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "senti/preprocess.hpp"

namespace senti {

inline constexpr std::size_t kPadId = 0;
inline constexpr std::size_t kUnkId = 1;
inline constexpr std::size_t kBosId = 2;
inline constexpr std::size_t kEosId = 3;
inline constexpr std::size_t kNumSpecialIds = 4;

enum class Split { Train, Validation, Test };

const char* split_name(Split split);

// Documents tagged with the split they came from. Anything derived from
// corpus statistics (vocabulary, augmentation plans) only accepts Train.
struct TaggedSplit {
  Split split = Split::Train;
  std::vector<CleanDocument> docs;
};

class Vocabulary {
 public:
  // Only the special tokens.
  Vocabulary();

  // Frequency-ranked, ties broken lexicographically; tokens seen fewer than
  // min_freq times are left out. max_size caps the total size including the
  // four special tokens (0 = unlimited).
  static Vocabulary build(const TaggedSplit& corpus, std::size_t min_freq = 1, std::size_t max_size = 0);

  // Line-oriented "<token>\t<id>" text, specials first.
  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in);
  std::string to_text() const;
  static Vocabulary from_text(const std::string& text);

  std::size_t id(const std::string& token) const;
  const std::string& token(std::size_t id) const;
  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t min_freq() const noexcept { return min_freq_; }
  std::size_t max_size() const noexcept { return max_size_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void push(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t min_freq_ = 1;
  std::size_t max_size_ = 0;
};

struct EncodedSequence {
  std::vector<std::size_t> input_ids;
  std::vector<int> attention_mask;
  std::size_t true_length = 0;
  std::size_t label = 0;

  bool operator==(const EncodedSequence&) const = default;
};

// [BOS] words [EOS] padded to max_len; long documents are truncated so that
// EOS stays the last real token.
EncodedSequence encode(const CleanDocument& doc, const Vocabulary& vocab, std::size_t max_len);

// Drops PAD/BOS/EOS; UNK decodes to "<unk>".
std::vector<std::string> decode(std::span<const std::size_t> ids, const Vocabulary& vocab);

}  // namespace senti
