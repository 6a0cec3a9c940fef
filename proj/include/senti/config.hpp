#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "senti/dataset.hpp"
#include "senti/model.hpp"
#include "senti/training.hpp"

namespace senti {

void to_json(nlohmann::json& j, const EncoderConfig& c);
void from_json(const nlohmann::json& j, EncoderConfig& c);
void to_json(nlohmann::json& j, const HeadConfig& c);
void from_json(const nlohmann::json& j, HeadConfig& c);
void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);
void to_json(nlohmann::json& j, const SplitSpec& s);
void from_json(const nlohmann::json& j, SplitSpec& s);

struct PreprocessConfig {
  std::filesystem::path stopwords_file;   // empty: built-in list
  std::filesystem::path lemma_exceptions;  // empty: built-in table only
  bool keep_hashtag_words = true;
  std::size_t max_len = 64;
  std::size_t min_freq = 1;
  std::size_t max_vocab = 0;  // 0: unlimited
};

void to_json(nlohmann::json& j, const PreprocessConfig& c);
void from_json(const nlohmann::json& j, PreprocessConfig& c);

// Architecture knobs not covered by Hyperparameters.
struct ArchitectureConfig {
  std::size_t d_model = 64;
  std::size_t num_layers = 2;
  std::size_t num_heads = 4;
  std::size_t ffn_dim = 128;
  std::size_t dense1_units = 64;
  bool peephole = false;
};

void to_json(nlohmann::json& j, const ArchitectureConfig& c);
void from_json(const nlohmann::json& j, ArchitectureConfig& c);

// Everything a command needs. Defaults are the desk-scale configuration:
// small encoder, h = 32, AdamW at lr = 1e-3, 5 epochs.
struct RunConfig {
  DatasetSpec dataset;
  PreprocessConfig preprocess;
  ArchitectureConfig architecture;
  Hyperparameters hp = desk_hyperparameters();
  SplitSpec split;
  bool augment = false;
  std::size_t limit = 0;  // 0: whole dataset
  std::filesystem::path out_dir = "out";
  GridSpec grid;
  std::size_t jobs = 1;

  static Hyperparameters desk_hyperparameters();

  // Checks value ranges and that every referenced file exists. Throws
  // ConfigError.
  void validate(bool need_dataset = true) const;
  // Model configuration for the given vocabulary size and class count.
  ModelConfig model_config(std::size_t vocab_size) const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, RunConfig& c);

RunConfig load_run_config(const std::filesystem::path& path);

// Command-line overrides; unset fields leave the config alone.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> limit;
  std::optional<std::filesystem::path> out_dir;
  std::optional<HeadVariant> variant;
  std::optional<double> learning_rate;
  std::optional<std::size_t> hidden_units;
  std::optional<OptimizerKind> optimizer;
  std::optional<bool> augment;
  std::optional<std::filesystem::path> csv;
};

void apply_overrides(RunConfig& config, const Overrides& o);

}  // namespace senti
