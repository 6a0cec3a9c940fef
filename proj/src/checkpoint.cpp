#include "senti/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "senti/config.hpp"
#include "senti/error.hpp"
#include "senti/hash.hpp"

namespace senti {

namespace {

constexpr std::string_view kMagic = "SENTCKPT";

template <typename T>
void put_le(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, raw, sizeof(T));
    return v;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw CheckpointTruncatedError("checkpoint ends at byte " + std::to_string(bytes_.size()) + ", needed " +
                                     std::to_string(pos_ + n));
    }
  }

  std::size_t pos() const noexcept { return pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

Shape shape_from_json(const nlohmann::json& j) { return j.get<Shape>(); }

void check_shapes(const ParamStore& reference, const ParamStore& stored, const std::string& against) {
  for (const auto& [name, p] : reference.items()) {
    if (!stored.contains(name)) throw CheckpointShapeError("tensor " + name + " missing from checkpoint");
    const Shape& have = stored.at(name).value.shape();
    if (have != p.value.shape()) {
      throw CheckpointShapeError("tensor " + name + " stored as " + shape_string(have) + " but " + against + " implies " +
                                 shape_string(p.value.shape()));
    }
  }
  for (const auto& [name, p] : stored.items()) {
    if (!reference.contains(name)) throw CheckpointShapeError("unexpected tensor " + name + " in checkpoint");
  }
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  nlohmann::json tensors = nlohmann::json::array();
  std::uint64_t count = 0;
  for (const auto& [name, p] : ckpt.params.items()) {
    tensors.push_back({{"name", name}, {"shape", p.value.shape()}});
    count += p.value.size();
  }
  const nlohmann::json header{{"config", ckpt.config},
                              {"vocabulary", ckpt.vocab.to_text()},
                              {"class_names", ckpt.class_names},
                              {"tensors", tensors},
                              {"manifest", ckpt.manifest}};
  const std::string header_text = header.dump();

  std::string out(kMagic);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, header_text.size());
  out += header_text;
  put_le<std::uint64_t>(out, count);
  out.reserve(out.size() + count * sizeof(double) + sizeof(std::uint64_t));
  for (const auto& [name, p] : ckpt.params.items()) {
    for (double v : p.value.data()) put_le<double>(out, v);
  }
  put_le<std::uint64_t>(out, fnv1a64(out));
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes, const ModelConfig* expected) {
  Reader r(bytes);
  if (bytes.size() >= kMagic.size() && bytes.substr(0, kMagic.size()) != kMagic) {
    throw CheckpointVersionError("not a checkpoint file (bad magic)");
  }
  r.take(kMagic.size());
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointVersionError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                                 std::to_string(kCheckpointVersion) + ")");
  }
  if (bytes.size() < r.pos() + 2 * sizeof(std::uint64_t)) r.need(2 * sizeof(std::uint64_t));
  {
    // Integrity first, so a damaged file never reaches the parser.
    const std::size_t body = bytes.size() - sizeof(std::uint64_t);
    Reader tail(bytes.substr(body));
    const auto stored = tail.get<std::uint64_t>();
    if (fnv1a64(bytes.substr(0, body)) != stored) {
      throw CheckpointTruncatedError("checkpoint checksum mismatch: file is truncated or damaged");
    }
  }
  const auto header_len = r.get<std::uint64_t>();
  const auto header_text = r.take(header_len);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointTruncatedError(std::string("checkpoint header unreadable: ") + e.what());
  }

  Checkpoint ckpt;
  ckpt.config = header.at("config").get<ModelConfig>();
  ckpt.vocab = Vocabulary::from_text(header.at("vocabulary").get<std::string>());
  ckpt.class_names = header.at("class_names").get<std::vector<std::string>>();
  ckpt.manifest = header.at("manifest");

  const auto count = r.get<std::uint64_t>();
  std::uint64_t seen = 0;
  for (const auto& t : header.at("tensors")) {
    Tensor value(shape_from_json(t.at("shape")));
    seen += value.size();
    if (seen > count) throw CheckpointTruncatedError("tensor table exceeds stored value count");
    for (double& v : value.data()) v = r.get<double>();
    ckpt.params.add(t.at("name").get<std::string>(), std::move(value));
  }
  if (seen != count) throw CheckpointTruncatedError("stored value count does not match the tensor table");

  ParamStore implied;
  ckpt.config.validate();
  init_encoder_params(ckpt.config.encoder, implied);
  init_head_params(ckpt.config.head, implied);
  check_shapes(implied, ckpt.params, "its config");
  if (expected != nullptr) {
    ParamStore wanted;
    init_encoder_params(expected->encoder, wanted);
    init_head_params(expected->head, wanted);
    check_shapes(wanted, ckpt.params, "the expected config");
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) { write_file(path, encode_checkpoint(ckpt)); }

Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig* expected) {
  return decode_checkpoint(read_file(path), expected);
}

SentimentModel restore_model(const Checkpoint& ckpt) {
  SentimentModel model(ckpt.config);
  for (auto& [name, p] : model.params().items()) p.value = ckpt.params.at(name).value;
  return model;
}

}  // namespace senti
