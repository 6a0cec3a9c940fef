#include "senti/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "senti/error.hpp"

namespace senti {

namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point at s[i], advancing i. Malformed sequences yield
// kInvalid and consume a single byte.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || i + len > s.size()) {
    ++i;
    return kInvalid;
  }
  char32_t cp = len == 1 ? b0 : len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kInvalid;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp >= 0x100 && cp <= 0x17F) {
    if (cp == 0x130 || cp == 0x131 || cp == 0x138 || cp == 0x149 || cp == 0x17F) return cp;
    if (cp == 0x178) return 0xFF;
    const bool odd_upper = (cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E);
    if (odd_upper) return (cp % 2 == 1) ? cp + 1 : cp;
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  return cp;
}

bool is_lower_letter(char32_t cp) {
  if (cp >= 'a' && cp <= 'z') return true;
  if (cp >= 0xDF && cp <= 0xFF) return cp != 0xF7;
  if (cp >= 0x100 && cp <= 0x17F) return to_lower(cp) == cp && cp != 0x149;
  if (cp >= 0x3AC && cp <= 0x3CE) return true;
  if (cp >= 0x430 && cp <= 0x45F) return true;
  return false;
}

bool is_space(char32_t cp) { return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v'; }

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }
bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_url(std::string_view token) {
  return starts_with(token, "http://") || starts_with(token, "https://") || starts_with(token, "www.") ||
         token.find("://") != std::string_view::npos;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// --- suffix rule helpers (ASCII words) ---

bool is_vowel_at(std::string_view w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return true;
    case 'y':
      return i > 0 && !is_vowel_at(w, i - 1);
    default:
      return false;
  }
}

bool has_vowel(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (is_vowel_at(w, i)) return true;
  }
  return false;
}

// Number of vowel->consonant transitions ([C](VC)^m[V]).
int measure(std::string_view w) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool v = is_vowel_at(w, i);
    if (!v && prev_vowel) ++m;
    prev_vowel = v;
  }
  return m;
}

// consonant-vowel-consonant ending, last consonant not w, x or y.
bool ends_cvc(std::string_view w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return !is_vowel_at(w, n - 3) && is_vowel_at(w, n - 2) && !is_vowel_at(w, n - 1) && last != 'w' && last != 'x' &&
         last != 'y';
}

bool ascii_lower_word(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

// Repairs a stem left after removing -ing / -ed.
std::string restore_stem(std::string stem) {
  const std::size_t n = stem.size();
  if (ends_with(stem, "bl") || ends_with(stem, "iz")) return stem + "e";
  if (ends_with(stem, "at") && n >= 3 && !is_vowel_at(stem, n - 3)) return stem + "e";
  if (n >= 2 && stem[n - 1] == stem[n - 2] && !is_vowel_at(stem, n - 1)) {
    const char c = stem[n - 1];
    if (c == 's' || c == 'z') return stem;
    if (c == 'l' && measure(stem) <= 1) return stem;
    stem.pop_back();
    return stem;
  }
  if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
  return stem;
}

const std::pair<const char*, const char*> kDefaultExceptions[] = {
    // irregular forms
    {"went", "go"},          {"gone", "go"},           {"goes", "go"},          {"does", "do"},
    {"did", "do"},           {"done", "do"},           {"flew", "fly"},         {"flown", "fly"},
    {"made", "make"},        {"took", "take"},         {"taken", "take"},       {"got", "get"},
    {"gotten", "get"},       {"said", "say"},          {"told", "tell"},        {"gave", "give"},
    {"given", "give"},       {"came", "come"},         {"left", "leave"},       {"lost", "lose"},
    {"paid", "pay"},         {"sat", "sit"},           {"felt", "feel"},        {"kept", "keep"},
    {"bought", "buy"},       {"brought", "bring"},     {"thought", "think"},    {"found", "find"},
    {"children", "child"},   {"men", "man"},           {"women", "woman"},      {"feet", "foot"},
    {"mice", "mouse"},       {"teeth", "tooth"},       {"people", "people"},    {"knew", "know"},
    {"known", "know"},       {"seen", "see"},          {"saw", "see"},          {"wrote", "write"},
    // stems the suffix rules get wrong
    {"amazing", "amaze"},    {"amazed", "amaze"},      {"exciting", "excite"},  {"excited", "excite"},
    {"confusing", "confuse"}, {"confused", "confuse"}, {"created", "create"},   {"creating", "create"},
    {"during", "during"},    {"nothing", "nothing"},   {"something", "something"}, {"anything", "anything"},
    {"everything", "everything"}, {"morning", "morning"}, {"evening", "evening"}, {"ceiling", "ceiling"},
    {"always", "always"},    {"perhaps", "perhaps"},   {"various", "various"},  {"series", "series"},
    {"species", "species"},  {"news", "news"},         {"whereas", "whereas"},  {"this", "this"},
    {"was", "was"},          {"has", "has"},           {"yes", "yes"},          {"bus", "bus"},
    {"united", "united"},    {"lying", "lie"},         {"hundred", "hundred"},
};

}  // namespace

std::string lowercase_fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t start = i;
    const char32_t cp = decode_utf8(text, i);
    if (cp == kInvalid) {
      out.append(text.substr(start, i - start));
    } else {
      append_utf8(out, to_lower(cp));
    }
  }
  return out;
}

std::string strip_noise(std::string_view text, bool keep_hashtag_words) {
  std::string out;
  out.reserve(text.size());
  for (const std::string& token : split_whitespace(text)) {
    std::string_view t = token;
    if (is_url(t) || starts_with(t, "@")) continue;
    if (starts_with(t, "#")) {
      if (!keep_hashtag_words) continue;
      t.remove_prefix(t.find_first_not_of('#') == std::string_view::npos ? t.size() : t.find_first_not_of('#'));
    }
    std::string cleaned;
    for (std::size_t i = 0; i < t.size();) {
      const char32_t cp = decode_utf8(t, i);
      if (cp == '\'' || cp == 0x2019) continue;
      if (is_lower_letter(cp)) {
        append_utf8(cleaned, cp);
      } else {
        cleaned += ' ';
      }
    }
    for (const std::string& piece : split_whitespace(cleaned)) {
      if (!out.empty()) out += ' ';
      out += piece;
    }
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

StopwordSet default_stopwords() { return {"the", "an", "a"}; }

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword file " + path.string());
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = trim(line);
    if (!w.empty() && w[0] != '#') words.insert(lowercase_fold(w));
  }
  return words;
}

std::vector<std::string> remove_stopwords(std::vector<std::string> words, const StopwordSet& stopwords) {
  std::erase_if(words, [&](const std::string& w) { return stopwords.count(w) != 0; });
  return words;
}

Lemmatizer::Lemmatizer() {
  for (const auto& [form, lemma] : kDefaultExceptions) exceptions_.emplace(form, lemma);
}

void Lemmatizer::add_exception(std::string form, std::string lemma) {
  exceptions_.insert_or_assign(std::move(form), std::move(lemma));
}

void Lemmatizer::load_exceptions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lemma exception file " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto parts = split_whitespace(line);
    if (parts.empty()) continue;
    if (parts.size() > 2) throw ParseError("lemma exception line needs 'form lemma': " + line);
    add_exception(lowercase_fold(parts[0]), lowercase_fold(parts.size() == 2 ? parts[1] : parts[0]));
  }
}

std::string Lemmatizer::step(const std::string& w) const {
  if (auto it = exceptions_.find(w); it != exceptions_.end()) return it->second;
  if (w.size() <= 3 || !ascii_lower_word(w)) return w;
  const std::string_view v = w;
  const std::size_t n = w.size();

  if (ends_with(v, "ies") && n > 4) return w.substr(0, n - 3) + "y";
  if (ends_with(v, "ied") && n > 4) return w.substr(0, n - 3) + "y";
  if (ends_with(v, "sses")) return w.substr(0, n - 2);
  if (ends_with(v, "xes") || ends_with(v, "ches") || ends_with(v, "shes") || ends_with(v, "zzes")) {
    return w.substr(0, n - 2);
  }
  if (ends_with(v, "s")) {
    if (ends_with(v, "ss") || ends_with(v, "us") || ends_with(v, "is")) return w;
    return w.substr(0, n - 1);
  }
  if (ends_with(v, "eed")) return w;
  for (std::string_view suffix : {std::string_view("ing"), std::string_view("ed")}) {
    if (!ends_with(v, suffix)) continue;
    std::string stem = w.substr(0, n - suffix.size());
    if (stem.size() < 3 || !has_vowel(stem)) return w;
    return restore_stem(std::move(stem));
  }
  return w;
}

std::string Lemmatizer::lemmatize(std::string_view word) const {
  std::string current(word);
  // Every rule shortens the word, so this settles after a few rounds.
  for (int round = 0; round < 16; ++round) {
    std::string next = step(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::vector<std::string> Preprocessor::clean_words(std::string_view text) const {
  const std::string folded = lowercase_fold(text);
  const std::string stripped = strip_noise(folded, options_.keep_hashtag_words);
  std::vector<std::string> words = remove_stopwords(split_whitespace(stripped), options_.stopwords);
  for (auto& w : words) w = lemmatizer_.lemmatize(w);
  return words;
}

std::variant<CleanDocument, Dropped> Preprocessor::run(const RawDocument& doc,
                                                       std::span<const std::string> class_names) const {
  const std::size_t label = class_index(class_names, doc.label);
  std::vector<std::string> words = clean_words(doc.text);
  if (words.empty()) return Dropped{"empty-after-clean"};
  return CleanDocument{std::move(words), label};
}

std::size_t class_index(std::span<const std::string> class_names, std::string_view label) {
  auto it = std::find(class_names.begin(), class_names.end(), label);
  if (it == class_names.end()) throw ContractError("label '" + std::string(label) + "' is not a declared class");
  return static_cast<std::size_t>(it - class_names.begin());
}

}  // namespace senti
