#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "senti/model.hpp"
#include "senti/tokenizer.hpp"

namespace senti {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout: "SENTCKPT", u32 version, u64 header length, JSON header (model
// config, vocabulary, class names, tensor table, manifest), u64 value count,
// the parameter values as little-endian doubles in tensor-table order, and a
// trailing u64 FNV-1a checksum of everything before it.
struct Checkpoint {
  ModelConfig config;
  Vocabulary vocab;
  std::vector<std::string> class_names;
  ParamStore params;
  nlohmann::json manifest = nlohmann::json::object();
};

std::string encode_checkpoint(const Checkpoint& ckpt);

// Throws CheckpointVersionError for an unknown magic or version,
// CheckpointTruncatedError for a short file or a checksum mismatch, and
// CheckpointShapeError when a stored tensor disagrees with the shape implied
// by the stored config (or by `expected`, when given).
Checkpoint decode_checkpoint(std::string_view bytes, const ModelConfig* expected = nullptr);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig* expected = nullptr);

// Rebuilds a model from a checkpoint's config and parameters.
SentimentModel restore_model(const Checkpoint& ckpt);

}  // namespace senti
