#include "senti/dataset.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "senti/error.hpp"
#include "senti/hash.hpp"

namespace senti {

std::vector<CsvRecord> parse_csv(std::string_view data) {
  std::vector<CsvRecord> records;
  std::size_t i = 0;
  if (data.starts_with("\xEF\xBB\xBF")) i = 3;
  const std::size_t n = data.size();

  while (i < n) {
    CsvRecord rec;
    rec.offset = i;
    bool end_of_record = false;
    while (!end_of_record) {
      std::string field;
      if (i < n && data[i] == '"') {
        const std::size_t open = i++;
        for (;;) {
          if (i >= n) throw ParseError("unterminated quoted field starting at byte " + std::to_string(open));
          if (data[i] == '"') {
            if (i + 1 < n && data[i + 1] == '"') {
              field += '"';
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          field += data[i++];
        }
        if (i < n && data[i] != ',' && data[i] != '\n' && data[i] != '\r') {
          throw ParseError("unexpected character after closing quote at byte " + std::to_string(i));
        }
      } else {
        while (i < n && data[i] != ',' && data[i] != '\n' && data[i] != '\r') field += data[i++];
      }
      rec.fields.push_back(std::move(field));
      if (i >= n) {
        end_of_record = true;
      } else if (data[i] == ',') {
        ++i;
      } else {
        if (data[i] == '\r') ++i;
        if (i < n && data[i] == '\n') ++i;
        end_of_record = true;
      }
    }
    // Blank lines carry no record.
    if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
    records.push_back(std::move(rec));
  }
  return records;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void DatasetSpec::validate() const {
  if (text_column.empty() || label_column.empty()) throw ConfigError("dataset spec '" + name + "' needs text and label columns");
  if (class_names.size() < 2) throw ConfigError("dataset spec '" + name + "' needs at least two classes");
  std::set<std::string> unique(class_names.begin(), class_names.end());
  if (unique.size() != class_names.size()) throw ConfigError("dataset spec '" + name + "' has duplicate class names");
  if (!has_header && columns.empty()) throw ConfigError("dataset spec '" + name + "' has no header and no column list");
  for (const auto& [raw, cls] : label_map) {
    if (!unique.contains(cls)) throw ConfigError("label map of '" + name + "' targets unknown class '" + cls + "'");
  }
}

void to_json(nlohmann::json& j, const DatasetSpec& spec) {
  j = nlohmann::json{{"name", spec.name},
                     {"csv", spec.csv_path.string()},
                     {"text_column", spec.text_column},
                     {"label_column", spec.label_column},
                     {"class_names", spec.class_names},
                     {"has_header", spec.has_header},
                     {"columns", spec.columns},
                     {"label_map", spec.label_map}};
}

void from_json(const nlohmann::json& j, DatasetSpec& spec) {
  // A bare name (or a spec naming a bundled dataset) starts from the bundled
  // definition; explicit keys override it.
  if (j.is_string()) {
    spec = bundled_spec(j.get<std::string>());
    return;
  }
  if (!j.is_object()) throw ConfigError("dataset must be a bundled name or a JSON object");
  for (const auto& [key, value] : j.items()) {
    static const std::set<std::string> known{"name",       "csv",     "text_column", "label_column",
                                             "class_names", "has_header", "columns",  "label_map"};
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in dataset");
  }
  const std::string name = j.value("name", std::string());
  const auto names = bundled_spec_names();
  if (std::find(names.begin(), names.end(), name) != names.end()) {
    spec = bundled_spec(name);
  } else {
    spec = DatasetSpec{};
    spec.name = name;
  }
  if (j.contains("csv")) spec.csv_path = j.at("csv").get<std::string>();
  if (j.contains("text_column")) spec.text_column = j.at("text_column").get<std::string>();
  if (j.contains("label_column")) spec.label_column = j.at("label_column").get<std::string>();
  if (j.contains("class_names")) spec.class_names = j.at("class_names").get<std::vector<std::string>>();
  if (j.contains("has_header")) spec.has_header = j.at("has_header").get<bool>();
  if (j.contains("columns")) spec.columns = j.at("columns").get<std::vector<std::string>>();
  if (j.contains("label_map")) spec.label_map = j.at("label_map").get<std::map<std::string, std::string>>();
}

std::vector<std::string> bundled_spec_names() { return {"twitter_us_airline", "imdb", "sentiment140"}; }

DatasetSpec bundled_spec(const std::string& name) {
  DatasetSpec spec;
  spec.name = name;
  if (name == "twitter_us_airline") {
    spec.text_column = "text";
    spec.label_column = "airline_sentiment";
    spec.class_names = {"negative", "neutral", "positive"};
  } else if (name == "imdb") {
    spec.text_column = "review";
    spec.label_column = "sentiment";
    spec.class_names = {"negative", "positive"};
  } else if (name == "sentiment140") {
    spec.has_header = false;
    spec.columns = {"target", "ids", "date", "flag", "user", "text"};
    spec.text_column = "text";
    spec.label_column = "target";
    spec.class_names = {"negative", "positive"};
    spec.label_map = {{"0", "negative"}, {"4", "positive"}};
  } else {
    throw ConfigError("unknown dataset '" + name + "'");
  }
  return spec;
}

namespace {

std::size_t column_index(const std::vector<std::string>& header, const std::string& column, const std::string& spec) {
  auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) throw IngestError("column '" + column + "' not found in dataset '" + spec + "'");
  return static_cast<std::size_t>(it - header.begin());
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

}  // namespace

LoadResult load_csv_text(const DatasetSpec& spec, std::string_view data) {
  spec.validate();
  auto records = parse_csv(data);
  std::vector<std::string> header = spec.columns;
  std::size_t first = 0;
  if (spec.has_header) {
    if (records.empty()) throw IngestError("dataset '" + spec.name + "' has no header row");
    header = records.front().fields;
    first = 1;
  }
  const std::size_t text_col = column_index(header, spec.text_column, spec.name);
  const std::size_t label_col = column_index(header, spec.label_column, spec.name);

  LoadResult result;
  for (std::size_t r = first; r < records.size(); ++r) {
    ++result.rows_in;
    const auto& f = records[r].fields;
    const std::size_t row_number = r - first + 1;
    if (text_col >= f.size() || label_col >= f.size() || blank(f[text_col]) || blank(f[label_col])) {
      ++result.skipped;
      continue;
    }
    std::string label = f[label_col];
    if (!spec.label_map.empty()) {
      auto it = spec.label_map.find(label);
      if (it == spec.label_map.end()) {
        throw IngestError("row " + std::to_string(row_number) + " (byte " + std::to_string(records[r].offset) +
                          "): unknown label '" + label + "'");
      }
      label = it->second;
    }
    if (std::find(spec.class_names.begin(), spec.class_names.end(), label) == spec.class_names.end()) {
      throw IngestError("row " + std::to_string(row_number) + " (byte " + std::to_string(records[r].offset) +
                        "): unknown label '" + label + "'");
    }
    result.docs.push_back({f[text_col], std::move(label)});
  }
  return result;
}

LoadResult load_csv(const DatasetSpec& spec) {
  if (!std::filesystem::exists(spec.csv_path)) throw IoError("dataset file not found: " + spec.csv_path.string());
  return load_csv_text(spec, read_file(spec.csv_path));
}

std::string to_jsonl(const std::vector<CleanDocument>& docs, const std::vector<std::string>& class_names) {
  std::string out;
  for (const auto& d : docs) {
    if (d.label >= class_names.size()) throw ContractError("document label outside the class list");
    out += nlohmann::json{{"words", d.words}, {"label", class_names[d.label]}}.dump();
    out += '\n';
  }
  return out;
}

std::vector<CleanDocument> from_jsonl(std::string_view text, const std::vector<std::string>& class_names) {
  std::vector<CleanDocument> docs;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      CleanDocument d;
      d.words = j.at("words").get<std::vector<std::string>>();
      d.label = class_index(class_names, j.at("label").get<std::string>());
      docs.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("jsonl line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ContractError& e) {
      throw IngestError("jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<CleanDocument>& docs,
                 const std::vector<std::string>& class_names) {
  write_file(path, to_jsonl(docs, class_names));
}

std::vector<CleanDocument> read_jsonl(const std::filesystem::path& path, const std::vector<std::string>& class_names) {
  return from_jsonl(read_file(path), class_names);
}

}  // namespace senti
