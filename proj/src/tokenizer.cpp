#include "senti/tokenizer.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "senti/error.hpp"

namespace senti {

namespace {
const char* const kSpecialTokens[kNumSpecialIds] = {"<pad>", "<unk>", "<s>", "</s>"};
}

const char* split_name(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "unknown";
}

Vocabulary::Vocabulary() {
  for (const char* s : kSpecialTokens) push(s);
}

void Vocabulary::push(std::string token) {
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
}

Vocabulary Vocabulary::build(const TaggedSplit& corpus, std::size_t min_freq, std::size_t max_size) {
  if (corpus.split != Split::Train) {
    throw BuildError(std::string("vocabulary must be built from the train split, got ") + split_name(corpus.split));
  }
  if (corpus.docs.empty()) throw BuildError("cannot build a vocabulary from an empty corpus");
  if (max_size != 0 && max_size < kNumSpecialIds) throw BuildError("max_size smaller than the special token count");

  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus.docs) {
    for (const auto& w : doc.words) ++counts[w];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [token, n] : counts) {
    const bool special = std::find(std::begin(kSpecialTokens), std::end(kSpecialTokens), token) != std::end(kSpecialTokens);
    if (n >= min_freq && !special) ranked.emplace_back(token, n);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary vocab;
  vocab.min_freq_ = min_freq;
  vocab.max_size_ = max_size;
  for (auto& [token, n] : ranked) {
    if (max_size != 0 && vocab.size() >= max_size) break;
    vocab.push(token);
  }
  return vocab;
}

std::size_t Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token(std::size_t id) const {
  if (id >= tokens_.size()) {
    throw LookupError("token id " + std::to_string(id) + " outside vocabulary of size " + std::to_string(tokens_.size()));
  }
  return tokens_[id];
}

void Vocabulary::save(std::ostream& out) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) out << tokens_[i] << '\t' << i << '\n';
}

Vocabulary Vocabulary::load(std::istream& in) {
  Vocabulary vocab;
  std::string line;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw ParseError("vocabulary line without a tab: '" + line + "'");
    std::string token = line.substr(0, tab);
    std::size_t id = 0;
    try {
      id = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError("vocabulary line with a bad id: '" + line + "'");
    }
    if (id != expected) throw ParseError("vocabulary ids must be dense and ordered, expected " + std::to_string(expected));
    if (id < kNumSpecialIds) {
      if (token != kSpecialTokens[id]) throw ParseError("special token " + std::to_string(id) + " is '" + token + "'");
    } else {
      if (vocab.contains(token)) throw ParseError("duplicate vocabulary token '" + token + "'");
      vocab.push(std::move(token));
    }
    ++expected;
  }
  if (expected < kNumSpecialIds) throw ParseError("vocabulary is missing special tokens");
  return vocab;
}

std::string Vocabulary::to_text() const {
  std::ostringstream out;
  save(out);
  return out.str();
}

Vocabulary Vocabulary::from_text(const std::string& text) {
  std::istringstream in(text);
  return load(in);
}

EncodedSequence encode(const CleanDocument& doc, const Vocabulary& vocab, std::size_t max_len) {
  if (max_len < 3) throw ParameterError("max_len must be at least 3, got " + std::to_string(max_len));
  EncodedSequence seq;
  seq.label = doc.label;
  seq.input_ids.assign(max_len, kPadId);
  seq.attention_mask.assign(max_len, 0);

  const std::size_t kept = std::min(doc.words.size(), max_len - 2);
  seq.input_ids[0] = kBosId;
  for (std::size_t i = 0; i < kept; ++i) seq.input_ids[i + 1] = vocab.id(doc.words[i]);
  seq.input_ids[kept + 1] = kEosId;
  seq.true_length = kept + 2;
  std::fill_n(seq.attention_mask.begin(), seq.true_length, 1);
  return seq;
}

std::vector<std::string> decode(std::span<const std::size_t> ids, const Vocabulary& vocab) {
  std::vector<std::string> words;
  for (std::size_t id : ids) {
    const std::string& tok = vocab.token(id);
    if (id == kPadId || id == kBosId || id == kEosId) continue;
    words.push_back(tok);
  }
  return words;
}

}  // namespace senti
