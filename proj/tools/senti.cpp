// Command-line front end: preprocess, train, evaluate, sweep, augment, predict.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "senti/augment.hpp"
#include "senti/checkpoint.hpp"
#include "senti/config.hpp"
#include "senti/dataset.hpp"
#include "senti/error.hpp"
#include "senti/hash.hpp"
#include "senti/pipeline.hpp"
#include "senti/reports.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace senti;

namespace {

struct Options {
  std::string config_path;
  std::string dataset = "twitter_us_airline";
  std::string csv;
  std::string input;
  std::string checkpoint;
  std::uint64_t seed = 0;
  std::size_t limit = 0;
  std::string out;
  std::string variant;
  double lr = 0.0;
  std::size_t hidden = 0;
  std::string optimizer;
  bool augment = false;
  std::size_t epochs = 0;
  std::size_t jobs = 0;
};

struct Context {
  Options opt;
  CLI::App* app = nullptr;
  std::vector<std::string> argv;
};

std::string quote(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += (c == '\n' ? ' ' : c);
  }
  return out;
}

bool given(const CLI::App& sub, const char* name) {
  const CLI::Option* opt = sub.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

RunConfig build_config(const Context& ctx, const CLI::App& sub) {
  const Options& o = ctx.opt;
  RunConfig cfg;
  if (!o.config_path.empty()) {
    cfg = load_run_config(o.config_path);
  } else {
    cfg.dataset = bundled_spec(o.dataset);
    cfg.grid.base = cfg.hp;
  }
  if (given(sub, "--dataset") && !o.config_path.empty()) {
    const auto path = cfg.dataset.csv_path;
    cfg.dataset = bundled_spec(o.dataset);
    cfg.dataset.csv_path = path;
  }
  Overrides ov;
  if (given(sub, "--seed")) ov.seed = o.seed;
  if (given(sub, "--limit")) ov.limit = o.limit;
  if (given(sub, "--out")) ov.out_dir = o.out;
  if (given(sub, "--variant")) ov.variant = parse_head_variant(o.variant);
  if (given(sub, "--lr")) ov.learning_rate = o.lr;
  if (given(sub, "--hidden")) ov.hidden_units = o.hidden;
  if (given(sub, "--optimizer")) ov.optimizer = parse_optimizer(o.optimizer);
  if (given(sub, "--augment")) ov.augment = o.augment;
  if (given(sub, "--csv")) ov.csv = o.csv;
  apply_overrides(cfg, ov);
  if (given(sub, "--epochs")) {
    cfg.hp.epochs = o.epochs;
    cfg.grid.base.epochs = o.epochs;
  }
  if (given(sub, "--jobs")) cfg.jobs = o.jobs;
  return cfg;
}

// Hash of the dataset definition with the file path replaced by the file's
// content hash, so the same data under another path hashes the same.
std::string dataset_hash(const DatasetSpec& spec, const std::string& data_hash) {
  json j = spec;
  j["csv"] = data_hash;
  return hex64(fnv1a64(j.dump()));
}

void write_manifest(const Context& ctx, const std::string& command, const RunConfig& cfg, const json& inputs) {
  json manifest{{"command", command},
                {"argv", ctx.argv},
                {"config", cfg},
                {"seed", cfg.hp.seed},
                {"inputs", inputs}};
  write_file(cfg.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<RawDocument> load_raw(const RunConfig& cfg, LoadResult& stats) {
  stats = load_csv(cfg.dataset);
  if (cfg.limit > 0) {
    return stratified_sample(stats.docs, cfg.limit, mix_seed(cfg.hp.seed, 0x11a1),
                             [](const RawDocument& d) { return d.label; });
  }
  return stats.docs;
}

// Cleaned documents from --input JSONL, or from the configured CSV.
std::vector<CleanDocument> load_clean(const Context& ctx, const RunConfig& cfg, json& inputs) {
  if (!ctx.opt.input.empty()) {
    inputs[ctx.opt.input] = file_hash(ctx.opt.input);
    auto docs = read_jsonl(ctx.opt.input, cfg.dataset.class_names);
    if (cfg.limit > 0) {
      docs = stratified_sample(docs, cfg.limit, mix_seed(cfg.hp.seed, 0x11a1),
                               [](const CleanDocument& d) { return std::to_string(d.label); });
    }
    return docs;
  }
  inputs[cfg.dataset.csv_path.string()] = file_hash(cfg.dataset.csv_path);
  LoadResult stats;
  const auto raw = load_raw(cfg, stats);
  std::fprintf(stderr, "loaded %zu rows (%zu skipped), using %zu\n", stats.rows_in, stats.skipped, raw.size());
  return clean_documents(make_preprocessor(cfg.preprocess), raw, cfg.dataset.class_names);
}

void print_metrics(const char* label, const MetricsReport& m) {
  std::printf("%s: n=%lld acc=%.4f f1w=%.4f pw=%.4f rw=%.4f%s\n", label, static_cast<long long>(m.n), m.accuracy, m.f1_w,
              m.precision_w, m.recall_w, m.zero_denominator ? " zero-denominator" : "");
}

int cmd_preprocess(const Context& ctx, const CLI::App& sub) {
  RunConfig cfg = build_config(ctx, sub);
  cfg.validate();
  LoadResult stats;
  const auto raw = load_raw(cfg, stats);
  CleanStats clean_stats;
  const auto clean = clean_documents(make_preprocessor(cfg.preprocess), raw, cfg.dataset.class_names, &clean_stats);
  write_jsonl(cfg.out_dir / "clean.jsonl", clean, cfg.dataset.class_names);
  const json summary{{"rows_in", stats.rows_in},
                     {"documents_out", stats.docs.size()},
                     {"skipped", stats.skipped},
                     {"sampled", raw.size()},
                     {"dropped_empty", clean_stats.dropped_empty},
                     {"kept", clean_stats.kept}};
  write_file(cfg.out_dir / "preprocess_stats.json", summary.dump(2) + "\n");
  write_manifest(ctx, "preprocess", cfg, {{cfg.dataset.csv_path.string(), file_hash(cfg.dataset.csv_path)}});
  std::printf("%s\n", summary.dump().c_str());
  return 0;
}

int cmd_train(const Context& ctx, const CLI::App& sub) {
  RunConfig cfg = build_config(ctx, sub);
  cfg.validate(ctx.opt.input.empty());
  json inputs = json::object();
  auto docs = load_clean(ctx, cfg, inputs);
  const PreparedData data = prepare(cfg, std::move(docs));
  for (const auto& w : data.splits.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::fprintf(stderr, "splits: train=%zu validation=%zu test=%zu vocab=%zu\n", data.encoded.train.size(),
               data.encoded.validation.size(), data.encoded.test.size(), data.vocab.size());

  const json training_manifest{{"hyperparameters", cfg.hp},
                               {"seed", cfg.hp.seed},
                               {"dataset_hash", dataset_hash(cfg.dataset, inputs.begin().value().get<std::string>())},
                               {"split", cfg.split},
                               {"augment", cfg.augment},
                               {"limit", cfg.limit},
                               {"preprocess", cfg.preprocess}};
  const auto outcome = train_model(cfg, data, training_manifest, [](const EpochRecord& e) {
    std::fprintf(stderr, "epoch %zu loss=%.6f train_acc=%.4f val_acc=%s (%.1fs)\n", e.epoch, e.train_loss,
                 e.train.accuracy, e.validation ? std::to_string(e.validation->accuracy).c_str() : "n/a", e.seconds);
  });

  save_checkpoint(cfg.out_dir / "model.ckpt", outcome.checkpoint);
  write_file(cfg.out_dir / "train_report.json", report_json(outcome.report).dump(2) + "\n");
  write_file(cfg.out_dir / "timings.json", timings_json(outcome.report).dump(2) + "\n");
  if (data.plan) write_file(cfg.out_dir / "augment_plan.json", json(*data.plan).dump(2) + "\n");
  write_manifest(ctx, "train", cfg, inputs);
  if (outcome.report.test) print_metrics("test", *outcome.report.test);
  return 0;
}

int cmd_evaluate(const Context& ctx, const CLI::App& sub) {
  RunConfig cfg = build_config(ctx, sub);
  cfg.validate();
  const Checkpoint ckpt = load_checkpoint(ctx.opt.checkpoint);
  if (ckpt.class_names != cfg.dataset.class_names) {
    throw ConfigError("checkpoint classes do not match the dataset's classes");
  }
  SentimentModel model = restore_model(ckpt);
  LoadResult stats;
  const auto raw = load_raw(cfg, stats);
  const auto clean = clean_documents(make_preprocessor(cfg.preprocess), raw, cfg.dataset.class_names);
  const auto encoded = encode_all(clean, ckpt.vocab, ckpt.config.encoder.max_len);
  if (encoded.empty()) throw ContractError("no documents to evaluate");
  const MetricsReport report = evaluate(model, encoded, ckpt.class_names);
  write_file(cfg.out_dir / "metrics.json", json(report).dump(2) + "\n");
  write_manifest(ctx, "evaluate", cfg,
                 {{ctx.opt.checkpoint, file_hash(ctx.opt.checkpoint)},
                  {cfg.dataset.csv_path.string(), file_hash(cfg.dataset.csv_path)}});
  print_metrics("evaluate", report);
  return 0;
}

int cmd_sweep(const Context& ctx, const CLI::App& sub) {
  RunConfig cfg = build_config(ctx, sub);
  cfg.validate(ctx.opt.input.empty());
  json inputs = json::object();
  auto docs = load_clean(ctx, cfg, inputs);
  const PreparedData data = prepare(cfg, std::move(docs));
  const ModelConfig base = cfg.model_config(data.vocab.size());
  const auto grid = cfg.grid.expand();
  const SweepReport report =
      sweep(data.encoded, base, grid, cfg.jobs, [](const Hyperparameters& hp, const std::string& error) {
        std::fprintf(stderr, "run variant=%s lr=%g hidden=%zu optimizer=%s: %s\n", to_string(hp.variant).c_str(),
                     hp.learning_rate, hp.hidden_units, to_string(hp.optimizer).c_str(),
                     error.empty() ? "ok" : error.c_str());
      });
  const std::string tables = render_sweep_tables(report);
  write_file(cfg.out_dir / "sweep.json", sweep_json(report).dump(2) + "\n");
  write_file(cfg.out_dir / "sweep_tables.txt", tables);
  write_manifest(ctx, "sweep", cfg, inputs);
  std::fputs(tables.c_str(), stdout);
  return 0;
}

int cmd_augment(const Context& ctx, const CLI::App& sub) {
  RunConfig cfg = build_config(ctx, sub);
  cfg.validate(false);
  const TaggedSplit train{Split::Train, read_jsonl(ctx.opt.input, cfg.dataset.class_names)};
  const AugmentPlan plan = make_balance_plan(train, cfg.dataset.class_names, mix_seed(cfg.hp.seed, 0xa06));
  const TaggedSplit out = apply_plan(train, plan);
  write_jsonl(cfg.out_dir / "augmented.jsonl", out.docs, cfg.dataset.class_names);
  write_file(cfg.out_dir / "augment_plan.json", json(plan).dump(2) + "\n");
  write_manifest(ctx, "augment", cfg, {{ctx.opt.input, file_hash(ctx.opt.input)}});
  std::printf("%s\n", json(plan).dump().c_str());
  return 0;
}

int cmd_predict(const Context& ctx, const CLI::App& sub) {
  RunConfig cfg = build_config(ctx, sub);
  cfg.validate(false);
  const Checkpoint ckpt = load_checkpoint(ctx.opt.checkpoint);
  SentimentModel model = restore_model(ckpt);
  const Preprocessor pre = make_preprocessor(cfg.preprocess);
  std::vector<std::string> lines;
  for (std::string line; std::getline(std::cin, line);) lines.push_back(line);
  for (const auto& p : predict(model, ckpt.vocab, pre, lines)) {
    std::string out = ckpt.class_names[p.label];
    for (std::size_t c = 0; c < p.probabilities.size(); ++c) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "\t%s=%.6f", ckpt.class_names[c].c_str(), p.probabilities[c]);
      out += buf;
    }
    std::printf("%s\n", out.c_str());
  }
  write_manifest(ctx, "predict", cfg, {{ctx.opt.checkpoint, file_hash(ctx.opt.checkpoint)}});
  return 0;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
  sub->add_option("--dataset", o.dataset, "Bundled dataset spec: twitter_us_airline, imdb, sentiment140");
  sub->add_option("--csv", o.csv, "Dataset CSV, overriding the config");
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--limit", o.limit, "Stratified sample of N documents");
  sub->add_option("--out", o.out, "Output directory");
}

void add_model_flags(CLI::App* sub, Options& o) {
  sub->add_option("--variant", o.variant, "Head variant: bilstm, lstm, gru, none");
  sub->add_option("--lr", o.lr, "Learning rate");
  sub->add_option("--hidden", o.hidden, "Recurrent hidden units");
  sub->add_option("--optimizer", o.optimizer, "adamw, sgd, rmsprop or rprop");
  sub->add_flag("--augment", o.augment, "Balance the train split before training");
  sub->add_option("--epochs", o.epochs, "Training epochs");
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  ctx.argv.assign(argv, argv + argc);
  CLI::App app{"Transformer encoder with a recurrent head for sentiment classification"};
  app.require_subcommand(1);
  Options& o = ctx.opt;

  auto* preprocess = app.add_subcommand("preprocess", "CSV to cleaned JSONL plus drop statistics");
  add_common(preprocess, o);

  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint and report");
  add_common(train, o);
  add_model_flags(train, o);
  train->add_option("--input", o.input, "Cleaned JSONL instead of the CSV")->check(CLI::ExistingFile);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a checkpoint on a CSV");
  add_common(evaluate_cmd, o);
  evaluate_cmd->add_option("--checkpoint", o.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);

  auto* sweep_cmd = app.add_subcommand("sweep", "Train over a hyperparameter grid and print result tables");
  add_common(sweep_cmd, o);
  add_model_flags(sweep_cmd, o);
  sweep_cmd->add_option("--input", o.input, "Cleaned JSONL instead of the CSV")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--jobs", o.jobs, "Parallel training workers");

  auto* augment = app.add_subcommand("augment", "Balance a cleaned JSONL train split");
  add_common(augment, o);
  augment->add_option("--input", o.input, "Cleaned JSONL")->required()->check(CLI::ExistingFile);

  auto* predict_cmd = app.add_subcommand("predict", "Classify text lines from standard input");
  add_common(predict_cmd, o);
  predict_cmd->add_option("--checkpoint", o.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << "error: kind=usage msg=\"" << quote(e.what()) << "\"\n";
    return 2;
  }

  try {
    if (*preprocess) return cmd_preprocess(ctx, *preprocess);
    if (*train) return cmd_train(ctx, *train);
    if (*evaluate_cmd) return cmd_evaluate(ctx, *evaluate_cmd);
    if (*sweep_cmd) return cmd_sweep(ctx, *sweep_cmd);
    if (*augment) return cmd_augment(ctx, *augment);
    if (*predict_cmd) return cmd_predict(ctx, *predict_cmd);
  } catch (const Error& e) {
    std::cerr << "error: kind=" << e.kind() << " msg=\"" << quote(e.what()) << "\"\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: kind=internal msg=\"" << quote(e.what()) << "\"\n";
    return 1;
  }
  return 2;
}
