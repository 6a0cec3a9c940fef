#include "senti/reports.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "senti/error.hpp"

namespace senti {

using nlohmann::json;

void to_json(json& j, const Hyperparameters& hp) {
  j = json{{"variant", to_string(hp.variant)},   {"lr", hp.learning_rate},     {"hidden", hp.hidden_units},
           {"optimizer", to_string(hp.optimizer)}, {"dropout", hp.dropout},    {"epochs", hp.epochs},
           {"seed", hp.seed},                      {"batch_size", hp.batch_size}};
}

void from_json(const json& j, Hyperparameters& hp) {
  hp.variant = parse_head_variant(j.at("variant").get<std::string>());
  hp.learning_rate = j.at("lr").get<double>();
  hp.hidden_units = j.at("hidden").get<std::size_t>();
  hp.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  hp.dropout = j.at("dropout").get<double>();
  hp.epochs = j.at("epochs").get<std::size_t>();
  hp.seed = j.at("seed").get<std::uint64_t>();
  hp.batch_size = j.at("batch_size").get<std::size_t>();
}

namespace {

json optional_metrics(const std::optional<MetricsReport>& m) { return m ? json(*m) : json(nullptr); }

std::optional<MetricsReport> optional_metrics(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<MetricsReport>();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_or_nan(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  throw ParseError("unknown split '" + s + "'");
}

}  // namespace

json report_json(const TrainReport& report) {
  json j = report.hyperparameters;
  j["epoch_losses"] = report.epoch_losses();
  json history = json::array();
  for (const auto& e : report.history) {
    history.push_back(
        {{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"train", e.train}, {"validation", optional_metrics(e.validation)}});
  }
  j["history"] = std::move(history);
  j["test"] = optional_metrics(report.test);
  return j;
}

TrainReport train_report_from_json(const json& j) {
  TrainReport report;
  report.hyperparameters = j.get<Hyperparameters>();
  for (const auto& e : j.at("history")) {
    EpochRecord rec;
    rec.epoch = e.at("epoch").get<std::size_t>();
    rec.train_loss = e.at("train_loss").get<double>();
    rec.train = e.at("train").get<MetricsReport>();
    rec.validation = optional_metrics(e.at("validation"));
    report.history.push_back(std::move(rec));
  }
  report.test = optional_metrics(j.at("test"));
  return report;
}

json timings_json(const TrainReport& report) {
  json epochs = json::array();
  double total = 0.0;
  for (const auto& e : report.history) {
    epochs.push_back({{"epoch", e.epoch}, {"seconds", e.seconds}});
    total += e.seconds;
  }
  return {{"epochs", epochs}, {"total_seconds", total}};
}

json sweep_json(const SweepReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"variant", to_string(r.variant)},
                    {"lr", r.learning_rate},
                    {"hidden", r.hidden_units},
                    {"optimizer", to_string(r.optimizer)},
                    {"split", split_name(r.split)},
                    {"f1w", number_or_null(r.f1_w)},
                    {"pw", number_or_null(r.precision_w)},
                    {"rw", number_or_null(r.recall_w)},
                    {"acc", number_or_null(r.accuracy)},
                    {"zero_denominator", r.zero_denominator},
                    {"epoch_losses", r.epoch_losses},
                    {"error", r.error.empty() ? json(nullptr) : json(r.error)}});
  }
  json best = json::array();
  for (const auto& b : report.best) {
    best.push_back({{"variant", to_string(b.variant)},
                    {"optimizer", to_string(b.optimizer)},
                    {"lr", b.learning_rate},
                    {"hidden", b.hidden_units},
                    {"acc", b.accuracy},
                    {"f1w", b.f1_w}});
  }
  return {{"rows", rows}, {"best", best}};
}

SweepReport sweep_from_json(const json& j) {
  SweepReport report;
  for (const auto& r : j.at("rows")) {
    SweepRow row;
    row.variant = parse_head_variant(r.at("variant").get<std::string>());
    row.learning_rate = r.at("lr").get<double>();
    row.hidden_units = r.at("hidden").get<std::size_t>();
    row.optimizer = parse_optimizer(r.at("optimizer").get<std::string>());
    row.split = parse_split(r.at("split").get<std::string>());
    row.f1_w = number_or_nan(r.at("f1w"));
    row.precision_w = number_or_nan(r.at("pw"));
    row.recall_w = number_or_nan(r.at("rw"));
    row.accuracy = number_or_nan(r.at("acc"));
    row.zero_denominator = r.value("zero_denominator", false);
    row.epoch_losses = r.at("epoch_losses").get<std::vector<double>>();
    if (!r.at("error").is_null()) row.error = r.at("error").get<std::string>();
    report.rows.push_back(std::move(row));
  }
  for (const auto& b : j.at("best")) {
    report.best.push_back({parse_head_variant(b.at("variant").get<std::string>()),
                           parse_optimizer(b.at("optimizer").get<std::string>()), b.at("lr").get<double>(),
                           b.at("hidden").get<std::size_t>(), b.at("acc").get<double>(), b.at("f1w").get<double>()});
  }
  return report;
}

// --- text tables ---------------------------------------------------------------

namespace {

constexpr const char* kBestTitle = "best test accuracy per variant";

// Shortest representation that parses back to the same double.
std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const char* evaluation_label(Split s) {
  switch (s) {
    case Split::Train: return "Training";
    case Split::Validation: return "Validation";
    case Split::Test: return "Test";
  }
  return "?";
}

Split parse_evaluation_label(const std::string& s) {
  if (s == "Training") return Split::Train;
  if (s == "Validation") return Split::Validation;
  if (s == "Test") return Split::Test;
  throw ParseError("unknown model evaluation '" + s + "'");
}

std::string status_text(const SweepRow& r) {
  if (!r.ok()) {
    std::string e = r.error;
    for (char& c : e) {
      if (c == '|' || c == '\n') c = '/';
    }
    return "failed: " + e;
  }
  return r.zero_denominator ? "ok zero-denominator" : "ok";
}

using Table = std::vector<std::vector<std::string>>;

void write_table(std::ostringstream& out, const Table& table) {
  std::vector<std::size_t> width(table.front().size(), 0);
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& row) {
    out << '|';
    for (std::size_t c = 0; c < row.size(); ++c) out << ' ' << row[c] << std::string(width[c] - row[c].size(), ' ') << " |";
    out << '\n';
  };
  line(table.front());
  out << '|';
  for (std::size_t w : width) out << std::string(w + 2, '-') << '|';
  out << '\n';
  for (std::size_t r = 1; r < table.size(); ++r) line(table[r]);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(' ');
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(' ') - b + 1);
}

std::vector<std::string> cells_of(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t pos = 1;
  while (pos < line.size()) {
    const auto bar = line.find('|', pos);
    if (bar == std::string::npos) break;
    cells.push_back(trim(line.substr(pos, bar - pos)));
    pos = bar + 1;
  }
  return cells;
}

double parse_number(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& s, std::size_t line_no) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

std::string render_sweep_tables(const SweepReport& report) {
  std::ostringstream out;
  std::vector<SweepRow> rows = report.rows;
  std::stable_sort(rows.begin(), rows.end(), sweep_row_before);

  for (std::size_t i = 0; i < rows.size();) {
    const HeadVariant variant = rows[i].variant;
    const OptimizerKind optimizer = rows[i].optimizer;
    Table table{{"Learning Rate", "Model Evaluation", "Hidden Units", "F1_w", "P_w", "R_w", "A", "Status"}};
    for (; i < rows.size() && rows[i].variant == variant && rows[i].optimizer == optimizer; ++i) {
      const SweepRow& r = rows[i];
      auto metric = [&](double v) { return r.ok() ? exact(v) : std::string("-"); };
      table.push_back({exact(r.learning_rate), evaluation_label(r.split), std::to_string(r.hidden_units), metric(r.f1_w),
                       metric(r.precision_w), metric(r.recall_w), metric(r.accuracy), status_text(r)});
    }
    out << "== " << to_string(variant) << " / " << to_string(optimizer) << " ==\n";
    write_table(out, table);
    out << '\n';
  }

  out << "== " << kBestTitle << " ==\n";
  Table best{{"Variant", "Optimizer", "Learning Rate", "Hidden Units", "A", "F1_w"}};
  for (const auto& b : report.best) {
    best.push_back({to_string(b.variant), to_string(b.optimizer), exact(b.learning_rate), std::to_string(b.hidden_units),
                    exact(b.accuracy), exact(b.f1_w)});
  }
  write_table(out, best);
  return out.str();
}

SweepReport parse_sweep_tables(const std::string& text) {
  SweepReport report;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  enum class Section { None, Block, Best } section = Section::None;
  HeadVariant variant = HeadVariant::BiLstm;
  OptimizerKind optimizer = OptimizerKind::AdamW;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (line.starts_with("== ") && line.ends_with(" ==")) {
      const std::string title = line.substr(3, line.size() - 6);
      if (title == kBestTitle) {
        section = Section::Best;
        continue;
      }
      const auto slash = title.find(" / ");
      if (slash == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": bad block title");
      variant = parse_head_variant(title.substr(0, slash));
      optimizer = parse_optimizer(title.substr(slash + 3));
      section = Section::Block;
      continue;
    }
    if (!line.starts_with("|")) throw ParseError("line " + std::to_string(line_no) + ": expected a table row");
    if (line.starts_with("|-")) continue;
    const auto cells = cells_of(line);
    if (section == Section::Block) {
      if (cells.size() != 8) throw ParseError("line " + std::to_string(line_no) + ": expected 8 cells");
      if (cells[0] == "Learning Rate") continue;
      SweepRow row;
      row.variant = variant;
      row.optimizer = optimizer;
      row.learning_rate = parse_number(cells[0], line_no);
      row.split = parse_evaluation_label(cells[1]);
      row.hidden_units = parse_count(cells[2], line_no);
      const std::string& status = cells[7];
      if (status.starts_with("failed: ")) {
        row.error = status.substr(8);
        row.f1_w = row.precision_w = row.recall_w = row.accuracy = std::nan("");
      } else {
        if (status != "ok" && status != "ok zero-denominator") {
          throw ParseError("line " + std::to_string(line_no) + ": bad status '" + status + "'");
        }
        row.zero_denominator = status != "ok";
        row.f1_w = parse_number(cells[3], line_no);
        row.precision_w = parse_number(cells[4], line_no);
        row.recall_w = parse_number(cells[5], line_no);
        row.accuracy = parse_number(cells[6], line_no);
      }
      report.rows.push_back(std::move(row));
    } else if (section == Section::Best) {
      if (cells.size() != 6) throw ParseError("line " + std::to_string(line_no) + ": expected 6 cells");
      if (cells[0] == "Variant") continue;
      report.best.push_back({parse_head_variant(cells[0]), parse_optimizer(cells[1]), parse_number(cells[2], line_no),
                             parse_count(cells[3], line_no), parse_number(cells[4], line_no),
                             parse_number(cells[5], line_no)});
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": table row outside a block");
    }
  }
  return report;
}

}  // namespace senti
