#include "senti/augment.hpp"

#include <algorithm>
#include <cmath>

#include "senti/error.hpp"
#include "senti/rng.hpp"

namespace senti {

std::string to_string(Technique t) {
  switch (t) {
    case Technique::Duplicate: return "duplicate";
    case Technique::RandomSwap: return "random-swap";
    case Technique::RandomDeletion: return "random-deletion";
  }
  return "unknown";
}

std::vector<std::size_t> AugmentPlan::deltas() const {
  std::vector<std::size_t> out(targets.size(), 0);
  for (std::size_t c = 0; c < targets.size() && c < current.size(); ++c) {
    out[c] = targets[c] > current[c] ? targets[c] - current[c] : 0;
  }
  return out;
}

void AugmentPlan::validate() const {
  if (class_names.size() != current.size() || current.size() != targets.size()) {
    throw PlanError("plan has mismatched class, count and target lists");
  }
  for (std::size_t c = 0; c < targets.size(); ++c) {
    if (targets[c] < current[c]) throw PlanError("target for class '" + class_names[c] + "' is below its current count");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw PlanError("technique weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw PlanError("technique weights must sum to 1");
}

std::vector<std::size_t> class_counts(const std::vector<CleanDocument>& docs, std::size_t num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& d : docs) {
    if (d.label >= num_classes) throw PlanError("label " + std::to_string(d.label) + " outside the plan's classes");
    ++counts[d.label];
  }
  return counts;
}

AugmentPlan make_balance_plan(const std::vector<std::size_t>& counts, std::vector<std::string> class_names,
                              std::uint64_t seed) {
  if (counts.size() != class_names.size()) throw PlanError("class count and name lists differ in length");
  const auto present = std::count_if(counts.begin(), counts.end(), [](std::size_t n) { return n > 0; });
  if (present < 2) throw PlanError("balancing needs at least two classes present");
  AugmentPlan plan;
  plan.class_names = std::move(class_names);
  plan.current = counts;
  // A class with no examples has nothing to augment from and stays empty.
  const std::size_t majority = *std::max_element(counts.begin(), counts.end());
  for (std::size_t n : counts) plan.targets.push_back(n == 0 ? 0 : majority);
  plan.seed = seed;
  return plan;
}

AugmentPlan make_balance_plan(const TaggedSplit& train, std::vector<std::string> class_names, std::uint64_t seed) {
  if (train.split != Split::Train) {
    throw ContractError(std::string("augmentation plans come from the train split only, got ") + split_name(train.split));
  }
  const auto counts = class_counts(train.docs, class_names.size());
  return make_balance_plan(counts, std::move(class_names), seed);
}

CleanDocument augment_example(const CleanDocument& doc, Technique technique, std::uint64_t seed) {
  if (doc.words.empty()) throw ContractError("cannot augment an empty document");
  CleanDocument out = doc;
  const std::size_t n = out.words.size();
  Rng rng(seed);
  switch (technique) {
    case Technique::Duplicate:
      break;
    case Technique::RandomSwap:
      if (n >= 2) {
        const std::size_t i = rng.below(n);
        std::size_t j = rng.below(n - 1);
        if (j >= i) ++j;
        std::swap(out.words[i], out.words[j]);
      }
      break;
    case Technique::RandomDeletion:
      if (n >= 2) out.words.erase(out.words.begin() + static_cast<std::ptrdiff_t>(rng.below(n)));
      break;
  }
  return out;
}

Technique pick_technique(const std::array<double, 3>& weights, std::uint64_t seed) {
  const double u = Rng(seed).uniform();
  double acc = 0.0;
  for (std::size_t t = 0; t < weights.size(); ++t) {
    acc += weights[t];
    if (u < acc) return static_cast<Technique>(t);
  }
  return Technique::RandomDeletion;
}

TaggedSplit apply_plan(const TaggedSplit& train, const AugmentPlan& plan) {
  if (train.split != Split::Train) {
    throw ContractError(std::string("augmentation applies to the train split only, got ") + split_name(train.split));
  }
  plan.validate();
  const std::size_t m = plan.class_names.size();
  if (class_counts(train.docs, m) != plan.current) throw PlanError("split class counts do not match the plan");

  std::vector<std::vector<std::size_t>> members(m);
  for (std::size_t i = 0; i < train.docs.size(); ++i) members[train.docs[i].label].push_back(i);

  TaggedSplit out{Split::Train, train.docs};
  const auto deltas = plan.deltas();
  for (std::size_t c = 0; c < m; ++c) {
    if (deltas[c] == 0) continue;
    if (members[c].empty()) throw PlanError("class '" + plan.class_names[c] + "' has no examples to augment from");
    for (std::size_t k = 0; k < deltas[c]; ++k) {
      const CleanDocument& source = train.docs[members[c][k % members[c].size()]];
      const std::uint64_t item_seed = mix_seed(plan.seed, mix_seed(c, k));
      out.docs.push_back(augment_example(source, pick_technique(plan.weights, mix_seed(item_seed, 1)), item_seed));
    }
  }
  Rng(plan.seed).shuffle(out.docs.begin(), out.docs.end());
  return out;
}

void to_json(nlohmann::json& j, const AugmentPlan& plan) {
  j = nlohmann::json{{"class_names", plan.class_names},
                     {"current", plan.current},
                     {"targets", plan.targets},
                     {"weights",
                      {{"duplicate", plan.weights[0]}, {"random-swap", plan.weights[1]}, {"random-deletion", plan.weights[2]}}},
                     {"seed", plan.seed}};
}

void from_json(const nlohmann::json& j, AugmentPlan& plan) {
  plan.class_names = j.at("class_names").get<std::vector<std::string>>();
  plan.current = j.at("current").get<std::vector<std::size_t>>();
  plan.targets = j.at("targets").get<std::vector<std::size_t>>();
  const auto& w = j.at("weights");
  plan.weights = {w.at("duplicate").get<double>(), w.at("random-swap").get<double>(),
                  w.at("random-deletion").get<double>()};
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.validate();
}

}  // namespace senti
