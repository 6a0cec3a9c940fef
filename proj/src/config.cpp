#include "senti/config.hpp"

#include <set>

#include "senti/error.hpp"
#include "senti/hash.hpp"
#include "senti/reports.hpp"

namespace senti {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const EncoderConfig& c) {
  j = json{{"vocab_size", c.vocab_size}, {"d_model", c.d_model},     {"num_layers", c.num_layers},
           {"num_heads", c.num_heads},   {"ffn_dim", c.ffn_dim},     {"max_len", c.max_len},
           {"dropout", c.dropout_rate},  {"seed", c.seed}};
}

void from_json(const json& j, EncoderConfig& c) {
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.d_model = j.at("d_model").get<std::size_t>();
  c.num_layers = j.at("num_layers").get<std::size_t>();
  c.num_heads = j.at("num_heads").get<std::size_t>();
  c.ffn_dim = j.at("ffn_dim").get<std::size_t>();
  c.max_len = j.at("max_len").get<std::size_t>();
  c.dropout_rate = j.at("dropout").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(json& j, const HeadConfig& c) {
  j = json{{"variant", to_string(c.variant)}, {"input_dim", c.input_dim},     {"hidden_units", c.hidden_units},
           {"dense1_units", c.dense1_units},  {"num_classes", c.num_classes}, {"dropout", c.dropout_rate},
           {"max_len", c.max_len},            {"peephole", c.peephole},       {"seed", c.seed}};
}

void from_json(const json& j, HeadConfig& c) {
  c.variant = parse_head_variant(j.at("variant").get<std::string>());
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.hidden_units = j.at("hidden_units").get<std::size_t>();
  c.dense1_units = j.at("dense1_units").get<std::size_t>();
  c.num_classes = j.at("num_classes").get<std::size_t>();
  c.dropout_rate = j.at("dropout").get<double>();
  c.max_len = j.at("max_len").get<std::size_t>();
  c.peephole = j.at("peephole").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(json& j, const ModelConfig& c) { j = json{{"encoder", c.encoder}, {"head", c.head}}; }

void from_json(const json& j, ModelConfig& c) {
  c.encoder = j.at("encoder").get<EncoderConfig>();
  c.head = j.at("head").get<HeadConfig>();
}

void to_json(json& j, const SplitSpec& s) {
  j = json{{"train", s.train}, {"validation", s.validation}, {"test", s.test}, {"stratified", s.stratified}, {"seed", s.seed}};
}

void from_json(const json& j, SplitSpec& s) {
  reject_unknown(j, {"train", "validation", "test", "stratified", "seed"}, "split");
  read_opt(j, "train", s.train);
  read_opt(j, "validation", s.validation);
  read_opt(j, "test", s.test);
  read_opt(j, "stratified", s.stratified);
  read_opt(j, "seed", s.seed);
}

void to_json(json& j, const PreprocessConfig& c) {
  j = json{{"stopwords_file", c.stopwords_file.string()},
           {"lemma_exceptions", c.lemma_exceptions.string()},
           {"keep_hashtag_words", c.keep_hashtag_words},
           {"max_len", c.max_len},
           {"min_freq", c.min_freq},
           {"max_vocab", c.max_vocab}};
}

void from_json(const json& j, PreprocessConfig& c) {
  reject_unknown(j, {"stopwords_file", "lemma_exceptions", "keep_hashtag_words", "max_len", "min_freq", "max_vocab"},
                 "preprocess");
  if (j.contains("stopwords_file")) c.stopwords_file = j.at("stopwords_file").get<std::string>();
  if (j.contains("lemma_exceptions")) c.lemma_exceptions = j.at("lemma_exceptions").get<std::string>();
  read_opt(j, "keep_hashtag_words", c.keep_hashtag_words);
  read_opt(j, "max_len", c.max_len);
  read_opt(j, "min_freq", c.min_freq);
  read_opt(j, "max_vocab", c.max_vocab);
}

void to_json(json& j, const ArchitectureConfig& c) {
  j = json{{"d_model", c.d_model}, {"num_layers", c.num_layers},     {"num_heads", c.num_heads},
           {"ffn_dim", c.ffn_dim}, {"dense1_units", c.dense1_units}, {"peephole", c.peephole}};
}

void from_json(const json& j, ArchitectureConfig& c) {
  reject_unknown(j, {"d_model", "num_layers", "num_heads", "ffn_dim", "dense1_units", "peephole"}, "architecture");
  read_opt(j, "d_model", c.d_model);
  read_opt(j, "num_layers", c.num_layers);
  read_opt(j, "num_heads", c.num_heads);
  read_opt(j, "ffn_dim", c.ffn_dim);
  read_opt(j, "dense1_units", c.dense1_units);
  read_opt(j, "peephole", c.peephole);
}

Hyperparameters RunConfig::desk_hyperparameters() {
  Hyperparameters hp;
  hp.learning_rate = 1e-3;
  hp.hidden_units = 32;
  hp.epochs = 5;
  hp.dropout = 0.1;
  hp.optimizer = OptimizerKind::AdamW;
  hp.variant = HeadVariant::BiLstm;
  hp.seed = 42;
  hp.batch_size = 32;
  return hp;
}

void RunConfig::validate(bool need_dataset) const {
  try {
    hp.validate();
    split.validate();
    if (need_dataset) {
      dataset.validate();
      if (dataset.csv_path.empty()) throw ConfigError("no dataset csv configured");
      if (!std::filesystem::exists(dataset.csv_path)) {
        throw ConfigError("dataset file not found: " + dataset.csv_path.string());
      }
    }
    if (!preprocess.stopwords_file.empty() && !std::filesystem::exists(preprocess.stopwords_file)) {
      throw ConfigError("stopword file not found: " + preprocess.stopwords_file.string());
    }
    if (!preprocess.lemma_exceptions.empty() && !std::filesystem::exists(preprocess.lemma_exceptions)) {
      throw ConfigError("lemma exception file not found: " + preprocess.lemma_exceptions.string());
    }
    if (preprocess.max_len < 3) throw ConfigError("max_len must be at least 3");
    if (architecture.d_model == 0 || architecture.num_heads == 0 || architecture.d_model % architecture.num_heads != 0) {
      throw ConfigError("d_model must be a positive multiple of num_heads");
    }
    if (jobs == 0) throw ConfigError("jobs must be at least 1");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

ModelConfig RunConfig::model_config(std::size_t vocab_size) const {
  ModelConfig m;
  m.encoder.vocab_size = vocab_size;
  m.encoder.d_model = architecture.d_model;
  m.encoder.num_layers = architecture.num_layers;
  m.encoder.num_heads = architecture.num_heads;
  m.encoder.ffn_dim = architecture.ffn_dim;
  m.encoder.max_len = preprocess.max_len;
  m.head.input_dim = architecture.d_model;
  m.head.dense1_units = architecture.dense1_units;
  m.head.num_classes = dataset.num_classes();
  m.head.max_len = preprocess.max_len;
  m.head.peephole = architecture.peephole;
  return configure_model(m, hp);
}

void to_json(json& j, const RunConfig& c) {
  json variants = json::array(), optimizers = json::array();
  for (auto v : c.grid.variants) variants.push_back(to_string(v));
  for (auto o : c.grid.optimizers) optimizers.push_back(to_string(o));
  j = json{{"dataset", c.dataset},
           {"preprocess", c.preprocess},
           {"architecture", c.architecture},
           {"hyperparameters", c.hp},
           {"split", c.split},
           {"augment", c.augment},
           {"limit", c.limit},
           {"out_dir", c.out_dir.string()},
           {"grid",
            {{"variants", variants},
             {"learning_rates", c.grid.learning_rates},
             {"hidden_units", c.grid.hidden_units},
             {"optimizers", optimizers}}},
           {"jobs", c.jobs}};
}

void from_json(const json& j, RunConfig& c) {
  reject_unknown(j,
                 {"dataset", "preprocess", "architecture", "hyperparameters", "split", "augment", "limit", "out_dir",
                  "grid", "jobs"},
                 "run config");
  if (j.contains("dataset")) c.dataset = j.at("dataset").get<DatasetSpec>();
  if (j.contains("preprocess")) from_json(j.at("preprocess"), c.preprocess);
  if (j.contains("architecture")) from_json(j.at("architecture"), c.architecture);
  if (j.contains("hyperparameters")) {
    const json& h = j.at("hyperparameters");
    reject_unknown(h, {"variant", "lr", "hidden", "optimizer", "dropout", "epochs", "seed", "batch_size"},
                   "hyperparameters");
    json merged = c.hp;
    merged.update(h);
    c.hp = merged.get<Hyperparameters>();
  }
  if (j.contains("split")) from_json(j.at("split"), c.split);
  read_opt(j, "augment", c.augment);
  read_opt(j, "limit", c.limit);
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, {"variants", "learning_rates", "hidden_units", "optimizers"}, "grid");
    if (g.contains("variants")) {
      c.grid.variants.clear();
      for (const auto& v : g.at("variants")) c.grid.variants.push_back(parse_head_variant(v.get<std::string>()));
    }
    read_opt(g, "learning_rates", c.grid.learning_rates);
    read_opt(g, "hidden_units", c.grid.hidden_units);
    if (g.contains("optimizers")) {
      c.grid.optimizers.clear();
      for (const auto& o : g.at("optimizers")) c.grid.optimizers.push_back(parse_optimizer(o.get<std::string>()));
    }
  }
  read_opt(j, "jobs", c.jobs);
  c.grid.base = c.hp;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  RunConfig c;
  try {
    from_json(j, c);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  // Relative paths in a config file resolve against the file's directory.
  const auto base = path.parent_path();
  auto resolve = [&](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  resolve(c.dataset.csv_path);
  resolve(c.preprocess.stopwords_file);
  resolve(c.preprocess.lemma_exceptions);
  return c;
}

void apply_overrides(RunConfig& c, const Overrides& o) {
  if (o.seed) c.hp.seed = *o.seed;
  if (o.limit) c.limit = *o.limit;
  if (o.out_dir) c.out_dir = *o.out_dir;
  if (o.variant) {
    c.hp.variant = *o.variant;
    c.grid.variants = {*o.variant};
  }
  if (o.learning_rate) {
    c.hp.learning_rate = *o.learning_rate;
    c.grid.learning_rates = {*o.learning_rate};
  }
  if (o.hidden_units) {
    c.hp.hidden_units = *o.hidden_units;
    c.grid.hidden_units = {*o.hidden_units};
  }
  if (o.optimizer) {
    c.hp.optimizer = *o.optimizer;
    c.grid.optimizers = {*o.optimizer};
  }
  if (o.augment) c.augment = *o.augment;
  if (o.csv) c.dataset.csv_path = *o.csv;
  c.grid.base = c.hp;
}

}  // namespace senti
