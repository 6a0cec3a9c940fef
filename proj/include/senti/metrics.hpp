#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace senti {

// Counts indexed [true][predicted].
class ConfusionMatrix {
 public:
  using Counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

  explicit ConfusionMatrix(std::size_t num_classes);
  explicit ConfusionMatrix(std::vector<std::string> class_names);
  ConfusionMatrix(std::vector<std::string> class_names, Counts counts);

  void accumulate(std::size_t truth, std::size_t predicted);
  // Cell-wise sum; associative and commutative, for sharded evaluation.
  void merge(const ConfusionMatrix& other);

  std::int64_t count(std::size_t truth, std::size_t predicted) const;
  std::int64_t total() const noexcept { return total_; }
  std::int64_t correct() const { return counts_.trace(); }
  std::int64_t support(std::size_t cls) const { return counts_.row(static_cast<Eigen::Index>(cls)).sum(); }
  std::int64_t predicted_count(std::size_t cls) const { return counts_.col(static_cast<Eigen::Index>(cls)).sum(); }
  std::size_t num_classes() const noexcept { return class_names_.size(); }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  const Counts& counts() const noexcept { return counts_; }

  bool operator==(const ConfusionMatrix& other) const {
    return class_names_ == other.class_names_ && counts_ == other.counts_;
  }

 private:
  std::vector<std::string> class_names_;
  Counts counts_;
  std::int64_t total_ = 0;
};

// trace / N. Throws MetricError when N == 0.
double accuracy(const ConfusionMatrix& cm);

struct ClassMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
  bool precision_undefined = false;  // class never predicted
  bool recall_undefined = false;     // class absent from the ground truth

  bool operator==(const ClassMetrics&) const = default;
};

struct WeightedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<ClassMetrics> per_class;
};

// Per-class P, R, F1 averaged with weights support_i / N. Undefined per-class
// ratios count as 0 and are flagged. F1_w is the weighted mean of per-class
// F1, not the harmonic mean of P_w and R_w.
WeightedMetrics weighted_metrics(const ConfusionMatrix& cm);

struct MetricsReport {
  ConfusionMatrix confusion{2};
  std::int64_t n = 0;
  double accuracy = 0.0;
  double precision_w = 0.0;
  double recall_w = 0.0;
  double f1_w = 0.0;
  std::vector<ClassMetrics> per_class;
  bool zero_denominator = false;

  bool operator==(const MetricsReport&) const = default;
};

MetricsReport make_report(const ConfusionMatrix& cm);

void to_json(nlohmann::json& j, const MetricsReport& r);
void from_json(const nlohmann::json& j, MetricsReport& r);

}  // namespace senti
