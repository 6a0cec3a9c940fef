#include "senti/metrics.hpp"

#include "senti/error.hpp"

namespace senti {

namespace {

std::vector<std::string> numbered_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("class" + std::to_string(i));
  return names;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes) : ConfusionMatrix(numbered_names(num_classes)) {}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_names) : class_names_(std::move(class_names)) {
  if (class_names_.empty()) throw ContractError("a confusion matrix needs at least one class");
  const auto m = static_cast<Eigen::Index>(class_names_.size());
  counts_ = Counts::Zero(m, m);
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_names, Counts counts)
    : ConfusionMatrix(std::move(class_names)) {
  if (counts.rows() != counts_.rows() || counts.cols() != counts_.cols()) {
    throw DimensionError("confusion counts do not match the class count");
  }
  if ((counts.array() < 0).any()) throw ContractError("confusion counts must be non-negative");
  counts_ = std::move(counts);
  total_ = counts_.sum();
}

void ConfusionMatrix::accumulate(std::size_t truth, std::size_t predicted) {
  if (truth >= num_classes() || predicted >= num_classes()) {
    throw LookupError("label pair (" + std::to_string(truth) + ", " + std::to_string(predicted) +
                      ") outside " + std::to_string(num_classes()) + " classes");
  }
  ++counts_(static_cast<Eigen::Index>(truth), static_cast<Eigen::Index>(predicted));
  ++total_;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.num_classes() != num_classes()) throw DimensionError("cannot merge confusion matrices of different sizes");
  counts_ += other.counts_;
  total_ += other.total_;
}

std::int64_t ConfusionMatrix::count(std::size_t truth, std::size_t predicted) const {
  if (truth >= num_classes() || predicted >= num_classes()) throw LookupError("confusion cell out of range");
  return counts_(static_cast<Eigen::Index>(truth), static_cast<Eigen::Index>(predicted));
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw MetricError("accuracy of an empty confusion matrix is undefined");
  return static_cast<double>(cm.correct()) / static_cast<double>(cm.total());
}

WeightedMetrics weighted_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw MetricError("weighted metrics of an empty confusion matrix are undefined");
  const double n = static_cast<double>(cm.total());
  WeightedMetrics out;
  double p_sum = 0.0, tp_sum = 0.0, f1_sum = 0.0;
  for (std::size_t i = 0; i < cm.num_classes(); ++i) {
    ClassMetrics c;
    c.name = cm.class_names()[i];
    const std::int64_t tp = cm.count(i, i);
    const std::int64_t predicted = cm.predicted_count(i);  // TP + FP
    c.support = cm.support(i);                             // TP + FN
    c.precision_undefined = predicted == 0;
    c.recall_undefined = c.support == 0;
    c.precision = predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
    c.recall = c.support == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(c.support);
    c.f1 = (c.precision + c.recall) == 0.0 ? 0.0 : 2.0 * c.precision * c.recall / (c.precision + c.recall);
    const double weight = static_cast<double>(c.support);
    p_sum += c.precision * weight;
    // recall_i * support_i is TP_i exactly.
    tp_sum += static_cast<double>(tp);
    f1_sum += c.f1 * weight;
    out.per_class.push_back(std::move(c));
  }
  out.precision = p_sum / n;
  out.recall = tp_sum / n;
  out.f1 = f1_sum / n;
  return out;
}

MetricsReport make_report(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.confusion = cm;
  r.n = cm.total();
  r.accuracy = accuracy(cm);
  WeightedMetrics w = weighted_metrics(cm);
  r.precision_w = w.precision;
  r.recall_w = w.recall;
  r.f1_w = w.f1;
  r.per_class = std::move(w.per_class);
  for (const auto& c : r.per_class) r.zero_denominator = r.zero_denominator || c.precision_undefined || c.recall_undefined;
  return r;
}

void to_json(nlohmann::json& j, const MetricsReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  const auto& counts = r.confusion.counts();
  for (Eigen::Index i = 0; i < counts.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < counts.cols(); ++k) row.push_back(counts(i, k));
    rows.push_back(std::move(row));
  }
  nlohmann::json per_class = nlohmann::json::array();
  for (const auto& c : r.per_class) {
    per_class.push_back({{"name", c.name},
                         {"precision", c.precision},
                         {"recall", c.recall},
                         {"f1", c.f1},
                         {"support", c.support},
                         {"precision_undefined", c.precision_undefined},
                         {"recall_undefined", c.recall_undefined}});
  }
  j = nlohmann::json{{"n", r.n},
                     {"classes", r.confusion.class_names()},
                     {"confusion", rows},
                     {"acc", r.accuracy},
                     {"pw", r.precision_w},
                     {"rw", r.recall_w},
                     {"f1w", r.f1_w},
                     {"per_class", per_class},
                     {"zero_denominator", r.zero_denominator}};
}

void from_json(const nlohmann::json& j, MetricsReport& r) {
  auto names = j.at("classes").get<std::vector<std::string>>();
  const auto& rows = j.at("confusion");
  const auto m = static_cast<Eigen::Index>(names.size());
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != m) throw ParseError("confusion matrix has wrong row count");
  ConfusionMatrix::Counts counts(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != m) throw ParseError("confusion matrix has wrong column count");
    for (Eigen::Index k = 0; k < m; ++k) counts(i, k) = rows[i][k].get<std::int64_t>();
  }
  r.confusion = ConfusionMatrix(std::move(names), std::move(counts));
  r.n = j.at("n").get<std::int64_t>();
  r.accuracy = j.at("acc").get<double>();
  r.precision_w = j.at("pw").get<double>();
  r.recall_w = j.at("rw").get<double>();
  r.f1_w = j.at("f1w").get<double>();
  r.per_class.clear();
  for (const auto& c : j.at("per_class")) {
    r.per_class.push_back(ClassMetrics{c.at("name").get<std::string>(), c.at("precision").get<double>(),
                                       c.at("recall").get<double>(), c.at("f1").get<double>(),
                                       c.at("support").get<std::int64_t>(), c.at("precision_undefined").get<bool>(),
                                       c.at("recall_undefined").get<bool>()});
  }
  r.zero_denominator = j.at("zero_denominator").get<bool>();
}

}  // namespace senti
