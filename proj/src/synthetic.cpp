#include "senti/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "senti/dataset.hpp"
#include "senti/error.hpp"
#include "senti/rng.hpp"

namespace senti {

namespace {

const std::vector<std::string> kFiller = {
    "flight", "plane",   "crew",   "gate",    "seat",    "bag",     "ticket", "airport", "morning", "evening",
    "today",  "trip",    "boston", "denver",  "chicago", "phone",   "agent",  "line",    "board",   "cabin",
    "window", "meal",    "drink",  "pilot",   "route",   "weekend", "family", "friend",  "city",    "hotel",
    "car",    "counter", "wifi",   "snack",   "runway",  "check",   "status", "email",   "app",     "group"};

const std::vector<std::vector<std::string>> kCues3 = {
    {"terrible", "awful", "rude", "worst", "horrible", "angry", "lost", "broken", "dirty", "useless"},
    {"question", "wonder", "schedule", "info", "policy", "option", "update", "plan", "tomorrow", "maybe"},
    {"great", "love", "amazing", "thanks", "awesome", "excellent", "friendly", "perfect", "best", "happy"}};

const std::vector<std::vector<std::string>> kCues2 = {kCues3[0], kCues3[2]};

std::vector<std::string> cues_for(std::size_t num_classes, std::size_t cls) {
  if (num_classes == 3) return kCues3[cls];
  if (num_classes == 2) return kCues2[cls];
  std::vector<std::string> out;
  for (std::size_t k = 0; k < 5; ++k) {
    std::string w = "cue";
    for (std::size_t c = cls;; c /= 26) {
      w += static_cast<char>('a' + c % 26);
      if (c < 26) break;
    }
    out.push_back(w + static_cast<char>('a' + k));
  }
  return out;
}

std::vector<std::string> sentence(std::size_t cls, std::size_t num_classes, double signal, std::size_t min_words,
                                  std::size_t max_words, Rng& rng) {
  const std::size_t n = min_words + rng.below(max_words - min_words + 1);
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n; ++i) words.push_back(kFiller[rng.below(kFiller.size())]);
  if (rng.uniform() < signal) {
    const auto cues = cues_for(num_classes, cls);
    const std::size_t k = 1 + rng.below(2);
    for (std::size_t i = 0; i < k; ++i) {
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)), cues[rng.below(cues.size())]);
    }
  }
  return words;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

std::vector<std::string> synthetic_class_names(std::size_t num_classes) {
  if (num_classes == 2) return {"negative", "positive"};
  if (num_classes == 3) return {"negative", "neutral", "positive"};
  std::vector<std::string> out;
  for (std::size_t c = 0; c < num_classes; ++c) out.push_back("class" + std::to_string(c));
  return out;
}

std::vector<std::size_t> allocate_counts(std::size_t n, const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty() || !(total > 0.0)) throw ParameterError("class weights must have a positive sum");
  std::vector<std::size_t> counts(weights.size());
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    const double exact = static_cast<double>(n) * weights[c] / total;
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(counts[c]);
    assigned += counts[c];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[order[k % order.size()]];
  return counts;
}

std::vector<RawDocument> synthetic_corpus(const SyntheticOptions& o) {
  if (o.min_words == 0 || o.max_words < o.min_words) throw ParameterError("invalid synthetic sentence length range");
  const std::size_t m = o.class_weights.size();
  const auto names = synthetic_class_names(m);
  const auto counts = allocate_counts(o.size, o.class_weights);
  Rng rng(o.seed);
  std::vector<RawDocument> docs;
  docs.reserve(o.size);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      docs.push_back({join(sentence(c, m, o.signal, o.min_words, o.max_words, rng)), names[c]});
    }
  }
  rng.shuffle(docs.begin(), docs.end());
  return docs;
}

std::string synthetic_airline_csv(std::size_t rows, std::uint64_t seed, double signal) {
  static const std::vector<std::string> airlines = {"Virgin America", "United", "Southwest", "Delta", "US Airways",
                                                    "American"};
  static const std::vector<std::string> handles = {"VirginAmerica", "united", "SouthwestAir", "JetBlue", "USAirways",
                                                   "AmericanAir"};
  static const std::vector<std::string> reasons = {"Late Flight", "Customer Service Issue", "Lost Luggage",
                                                   "Cancelled Flight", "Bad Flight"};
  const std::vector<std::string> names = {"negative", "neutral", "positive"};
  const auto counts = allocate_counts(rows, {62.69, 21.17, 16.14});
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < counts.size(); ++c) labels.insert(labels.end(), counts[c], c);
  Rng rng(seed);
  rng.shuffle(labels.begin(), labels.end());

  std::string out =
      "tweet_id,airline_sentiment,airline_sentiment_confidence,negativereason,negativereason_confidence,airline,"
      "airline_sentiment_gold,name,negativereason_gold,retweet_count,text,tweet_coord,tweet_created,tweet_location,"
      "user_timezone\n";
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t cls = labels[r];
    const std::size_t a = rng.below(airlines.size());
    auto words = sentence(cls, 3, signal, 3, 9, rng);
    // Capitalize a word or two and sprinkle in the usual tweet noise.
    if (rng.uniform() < 0.3) std::transform(words[0].begin(), words[0].end(), words[0].begin(), ::toupper);
    std::string text = "@" + handles[a] + " " + join(words);
    if (rng.uniform() < 0.3) text += " " + std::to_string(100 + rng.below(9000));
    if (rng.uniform() < 0.3) text += ", really";
    if (rng.uniform() < 0.25) text += " #" + words[rng.below(words.size())];
    if (rng.uniform() < 0.2) text += " http://t.co/" + std::to_string(rng.below(1000000));
    if (rng.uniform() < 0.2) text += "!!";
    if (rng.uniform() < 0.05) text += "\n\"quoted\" line";
    if (rng.uniform() < 0.004) text.clear();

    const bool negative = cls == 0;
    const std::string confidence = std::to_string(0.6 + 0.4 * rng.uniform()).substr(0, 6);
    out += std::to_string(570000000000000000ULL + r) + ',' + names[cls] + ',' + confidence + ',' +
           (negative ? csv_escape(reasons[rng.below(reasons.size())]) : std::string()) + ',' +
           (negative ? std::string("0.7") : std::string()) + ',' + csv_escape(airlines[a]) + ",,user" +
           std::to_string(rng.below(5000)) + ",,0," + csv_escape(text) + ",,2015-02-24 11:35:52 -0800,,Eastern Time (US & Canada)\n";
  }
  return out;
}

}  // namespace senti
