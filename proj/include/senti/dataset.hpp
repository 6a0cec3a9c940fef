#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "senti/preprocess.hpp"

namespace senti {

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t offset = 0;  // byte offset of the record's first character
};

// RFC 4180: comma separated, double-quoted fields may hold commas, newlines
// and doubled quotes; CRLF or LF line ends; a leading UTF-8 BOM is skipped.
// Throws ParseError with the byte offset for an unterminated quoted field or
// stray characters after a closing quote.
std::vector<CsvRecord> parse_csv(std::string_view data);

struct DatasetSpec {
  std::string name;
  std::filesystem::path csv_path;
  std::string text_column;
  std::string label_column;
  std::vector<std::string> class_names;  // order defines class indices
  bool has_header = true;
  std::vector<std::string> columns;              // column names when the file has no header
  std::map<std::string, std::string> label_map;  // raw label -> class name, when labels are codes

  std::size_t num_classes() const noexcept { return class_names.size(); }
  // Throws ConfigError on duplicate or missing class names.
  void validate() const;
  bool operator==(const DatasetSpec&) const = default;
};

void to_json(nlohmann::json& j, const DatasetSpec& spec);
void from_json(const nlohmann::json& j, DatasetSpec& spec);

// Bundled specs: "twitter_us_airline", "imdb", "sentiment140". csv_path is
// left empty. Throws ConfigError for an unknown name.
DatasetSpec bundled_spec(const std::string& name);
std::vector<std::string> bundled_spec_names();

struct LoadResult {
  std::vector<RawDocument> docs;
  std::size_t rows_in = 0;
  std::size_t skipped = 0;  // rows with empty text or label
};

// One RawDocument per data row, labels mapped to class names. Throws IngestError
// naming the row for a label outside the spec's classes, ParseError for
// malformed CSV and IoError when the file cannot be read.
LoadResult load_csv(const DatasetSpec& spec);
LoadResult load_csv_text(const DatasetSpec& spec, std::string_view data);

// Cleaned intermediate format: one {"words": [...], "label": "<class>"} per line.
// Malformed lines throw ParseError and undeclared labels IngestError.
std::string to_jsonl(const std::vector<CleanDocument>& docs, const std::vector<std::string>& class_names);
std::vector<CleanDocument> from_jsonl(std::string_view text, const std::vector<std::string>& class_names);
void write_jsonl(const std::filesystem::path& path, const std::vector<CleanDocument>& docs,
                 const std::vector<std::string>& class_names);
std::vector<CleanDocument> read_jsonl(const std::filesystem::path& path, const std::vector<std::string>& class_names);

// CSV-quotes a field when it contains a comma, quote or line break.
std::string csv_escape(std::string_view field);

}  // namespace senti
