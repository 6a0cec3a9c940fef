#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "senti/preprocess.hpp"
#include "senti/tokenizer.hpp"

namespace senti {

enum class Technique { Duplicate, RandomSwap, RandomDeletion };

std::string to_string(Technique t);

struct AugmentPlan {
  std::vector<std::string> class_names;
  std::vector<std::size_t> current;  // class counts the plan was made from
  std::vector<std::size_t> targets;
  std::array<double, 3> weights{0.34, 0.33, 0.33};  // indexed by Technique
  std::uint64_t seed = 0;

  std::vector<std::size_t> deltas() const;
  // Throws PlanError unless targets >= current and the weights sum to 1.
  void validate() const;
  bool operator==(const AugmentPlan&) const = default;
};

// Raises every present class to the majority count; absent classes keep a
// target of 0. Throws PlanError when fewer than two classes are present.
AugmentPlan make_balance_plan(const std::vector<std::size_t>& counts, std::vector<std::string> class_names,
                              std::uint64_t seed);
// Only accepts the train split.
AugmentPlan make_balance_plan(const TaggedSplit& train, std::vector<std::string> class_names, std::uint64_t seed);

// One synthetic variant of doc; the label is kept. Throws ContractError on an
// empty document.
CleanDocument augment_example(const CleanDocument& doc, Technique technique, std::uint64_t seed);

// Weighted draw of a technique from a seed.
Technique pick_technique(const std::array<double, 3>& weights, std::uint64_t seed);

// Appends synthetic examples until each class reaches its target, cycling
// through the class's documents in order, then shuffles with the plan seed.
// Throws ContractError for a non-train split and PlanError when the split's
// class counts differ from the plan's.
TaggedSplit apply_plan(const TaggedSplit& train, const AugmentPlan& plan);

std::vector<std::size_t> class_counts(const std::vector<CleanDocument>& docs, std::size_t num_classes);

void to_json(nlohmann::json& j, const AugmentPlan& plan);
void from_json(const nlohmann::json& j, AugmentPlan& plan);

}  // namespace senti
