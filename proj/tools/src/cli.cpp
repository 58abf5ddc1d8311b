#include "convser/cli/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "convser/audio_io.hpp"
#include "convser/augmentation.hpp"
#include "convser/cli/pipeline_config.hpp"
#include "convser/errors.hpp"
#include "convser/feature_store.hpp"
#include "convser/hashing.hpp"
#include "convser/manifest.hpp"
#include "convser/model_io.hpp"
#include "convser/parallel.hpp"
#include "convser/results_table.hpp"
#include "convser/synth_data.hpp"
#include "convser/training.hpp"

namespace fs = std::filesystem;

namespace convser::cli {

namespace {

// Raised for command-line mistakes CLI11 cannot see (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  int jobs = default_jobs();
  std::string out;
};

struct Context {
  PipelineConfig config;
  std::string config_hash;
  int jobs = 1;
  std::optional<fs::path> out;
  std::ostream* out_stream = nullptr;
  spdlog::logger* log = nullptr;

  std::ostream& print() const { return *out_stream; }
  fs::path out_or(const fs::path& fallback) const { return out ? *out : fallback; }
};

spdlog::level::level_enum log_level_from_env() {
  const char* env = std::getenv("CONVSER_LOG");
  if (env == nullptr) return spdlog::level::info;
  const std::string v = env;
  if (v == "error") return spdlog::level::err;
  if (v == "debug") return spdlog::level::debug;
  return spdlog::level::info;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

// Every output directory carries the config that produced it.
void write_config_snapshot(const Context& ctx, const fs::path& dir) {
  write_json(dir / "pipeline_config.json",
             {{"pipeline_config_hash", ctx.config_hash}, {"seed", ctx.config.seed}, {"config", ctx.config}});
}

DatasetManifest require_manifest(const fs::path& path, std::string_view producer) {
  if (!fs::exists(path))
    throw ConfigError("manifest " + path.string() + " not found; run `convser " + std::string(producer) +
                      "` first");
  return load_manifest(path);
}

fs::path feature_dir(const fs::path& root, int n_mfcc) { return root / ("mfcc" + std::to_string(n_mfcc)); }

Dataset require_dataset(const DatasetManifest& manifest, const fs::path& features_root, int n_mfcc) {
  const fs::path dir = feature_dir(features_root, n_mfcc);
  if (!fs::is_directory(dir))
    throw ConfigError("feature directory " + dir.string() + " not found; run `convser extract` first");
  return load_dataset(manifest, FeatureStore(dir), n_mfcc);
}

SavedModel require_model(const fs::path& path) {
  if (!fs::exists(path))
    throw ConfigError("model file " + path.string() + " not found; run `convser train` first");
  return load_model(path);
}

AudioBuffer load_at_rate(const fs::path& path, int sample_rate) {
  AudioBuffer audio = load_wav(path);
  if (audio.sample_rate != sample_rate) audio = resample_linear(audio, sample_rate);
  return audio;
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * *v);
  return buf;
}

nlohmann::json model_metadata(const Context& ctx, const RunReport& report, std::size_t shuffle,
                              const FeatureConfig& features) {
  const ShuffleResult& s = report.shuffles[shuffle];
  return {{"model_id", report.model_id},
          {"shuffle", shuffle},
          {"seed", s.seed},
          {"base_seed", report.train_config.seed},
          {"selected_epoch", s.selected_epoch},
          {"feature_config", features},
          {"feature_config_hash", to_hex(config_hash(features))},
          {"train_config", report.train_config},
          {"pipeline_config_hash", ctx.config_hash}};
}

void save_run_models(const Context& ctx, const RunReport& report, const FeatureConfig& features,
                     const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t s = 0; s < report.shuffles.size(); ++s) {
    SavedModel model{report.model_config, report.shuffles[s].params, model_metadata(ctx, report, s, features)};
    save_model(model, dir / ("shuffle" + std::to_string(s) + ".model.json"));
  }
}

nlohmann::json stamped_report(const Context& ctx, const RunReport& report) {
  nlohmann::json j = run_report_json(report);
  j["pipeline_config_hash"] = ctx.config_hash;
  j["seed"] = ctx.config.seed;
  return j;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  std::optional<int> n;
  std::optional<double> duration;
  bool null_corpus = false;
};

int cmd_synth(const Context& ctx, const SynthOptions& o) {
  if (!ctx.out) throw UsageError("synth: --out <dir> is required");
  SynthSpec spec = ctx.config.synth;
  if (o.null_corpus) spec.class1 = spec.class0;
  if (o.n) spec.n_originals = *o.n;
  if (o.duration) spec.duration_s = *o.duration;
  spec.seed = ctx.config.seed;
  const DatasetManifest m = generate_corpus(spec, *ctx.out, ctx.jobs);
  write_config_snapshot(ctx, *ctx.out);
  ctx.print() << "wrote " << m.size() << " recordings to " << ctx.out->string() << " (" << m.count_label(1)
              << " label-1, " << m.count_label(0) << " label-0)\n";
  return kExitOk;
}

// ---------------------------------------------------------------- augment

struct AugmentOptions {
  std::string manifest;
  std::optional<int> variants;
};

int cmd_augment(const Context& ctx, const AugmentOptions& o) {
  const fs::path manifest_path =
      o.manifest.empty() ? ctx.config.paths.corpus / "manifest.jsonl" : fs::path(o.manifest);
  const fs::path out = ctx.out_or(ctx.config.paths.augmented);
  const DatasetManifest input = require_manifest(manifest_path, "synth");

  AugmentationPlan plan = ctx.config.augmentation;
  if (o.variants) {
    if (*o.variants < 0 || static_cast<std::size_t>(*o.variants) > plan.variants.size())
      throw UsageError("augment: --variants must lie in [0, " + std::to_string(plan.variants.size()) + "]");
    plan.variants.resize(static_cast<std::size_t>(*o.variants));
  }
  ctx.log->info("augmenting {} records with {} variants each", input.size(), plan.variants.size());
  const DatasetManifest merged = augment_dataset(input, plan, out, ctx.jobs);
  write_manifest(merged, out / "manifest.jsonl");
  write_json(out / "augmentation_plan.json",
             {{"plan", plan}, {"seed", plan.seed}, {"pipeline_config_hash", ctx.config_hash}});
  write_config_snapshot(ctx, out);
  ctx.print() << input.size() << " → " << merged.size() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- extract

struct ExtractOptions {
  std::string manifest;
  std::optional<int> mfcc;
};

struct ExtractTally {
  std::size_t extracted = 0;
  std::size_t cached = 0;
  std::vector<std::string> failures;
};

ExtractTally extract_width(const Context& ctx, const DatasetManifest& manifest, const FeatureConfig& fc,
                           const fs::path& dir) {
  fs::create_directories(dir);
  const FeatureStore store(dir);
  const std::string feature_hash = to_hex(config_hash(fc));
  std::vector<int> state(manifest.size(), 0);  // 1 extracted, 2 cached, 3 failed
  std::vector<std::string> errors(manifest.size());
  parallel_for(manifest.size(), ctx.jobs, [&](std::size_t i) {
    const SampleRecord& r = manifest.records[i];
    try {
      const fs::path wav = manifest.resolve(r);
      const std::string content_hash = to_hex(hash_file(wav));
      if (const auto existing = store.sidecar(r.id);
          existing && existing->feature_config_hash == feature_hash && existing->content_hash == content_hash &&
          fs::exists(store.csv_path(r.id))) {
        state[i] = 2;
        return;
      }
      const FeatureMatrix fm = extract_features(load_at_rate(wav, fc.sample_rate), fc);
      FeatureSidecar sc;
      sc.id = r.id;
      sc.feature_config_hash = feature_hash;
      sc.content_hash = content_hash;
      sc.pipeline_config_hash = ctx.config_hash;
      sc.seed = ctx.config.seed;
      sc.n_valid_frames = fm.n_valid_frames;
      sc.frames = fm.frames();
      sc.width = fm.width();
      sc.feature_mode = fc.feature_mode;
      store.save(sc, fm);
      state[i] = 1;
    } catch (const std::exception& e) {
      errors[i] = r.id + ": " + e.what();
      state[i] = 3;
    }
  });
  ExtractTally tally;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] == 1) ++tally.extracted;
    if (state[i] == 2) ++tally.cached;
    if (state[i] == 3) tally.failures.push_back(errors[i]);
  }
  return tally;
}

int cmd_extract(const Context& ctx, const ExtractOptions& o, std::ostream& err) {
  const fs::path manifest_path =
      o.manifest.empty() ? ctx.config.paths.augmented / "manifest.jsonl" : fs::path(o.manifest);
  const fs::path out = ctx.out_or(ctx.config.paths.features);
  const DatasetManifest manifest = require_manifest(manifest_path, "augment");

  std::vector<int> widths = {13, 40};
  if (o.mfcc) widths = {*o.mfcc};
  std::size_t failed = 0;
  for (int width : widths) {
    const FeatureConfig& fc = ctx.config.features_for(width);
    const ExtractTally t = extract_width(ctx, manifest, fc, feature_dir(out, width));
    ctx.print() << "mfcc" << width << ": " << t.extracted << " extracted, " << t.cached << " cached, "
                << t.failures.size() << " failed\n";
    for (const auto& f : t.failures) err << "  " << f << "\n";
    failed += t.failures.size();
  }
  write_config_snapshot(ctx, out);
  return failed == 0 ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- train / grid

struct TrainOptions {
  std::string manifest;
  std::string features;
  std::optional<int> mfcc;
  std::optional<int> filters;
  std::optional<int> kernel;
  std::optional<int> units;
  std::optional<int> epochs;
  std::optional<int> shuffles;
  std::string split;
  std::string selection;
};

TrainConfig train_config_with(const Context& ctx, const TrainOptions& o) {
  TrainConfig tc = ctx.config.train;
  if (o.epochs) tc.epochs = *o.epochs;
  if (o.shuffles) tc.n_shuffles = *o.shuffles;
  if (!o.split.empty()) tc.split_mode = parse_split_mode(o.split);
  if (!o.selection.empty()) tc.model_selection = parse_model_selection(o.selection);
  tc.seed = ctx.config.seed;
  tc.validate();
  return tc;
}

void print_rows(const Context& ctx, const std::vector<ResultRow>& rows, std::string_view title) {
  ctx.print() << render_text_table(rows, title) << "\n";
}

int cmd_train(const Context& ctx, const TrainOptions& o) {
  const fs::path manifest_path =
      o.manifest.empty() ? ctx.config.paths.augmented / "manifest.jsonl" : fs::path(o.manifest);
  const fs::path features_root = o.features.empty() ? ctx.config.paths.features : fs::path(o.features);
  const fs::path out = ctx.out_or(ctx.config.paths.models);

  ModelConfig mc = ctx.config.model;
  if (o.mfcc) mc.n_mfcc = *o.mfcc;
  if (o.filters) mc.filters = *o.filters;
  if (o.kernel) mc.kernel_size = *o.kernel;
  if (o.units) mc.lstm_units = *o.units;
  const FeatureConfig& fc = ctx.config.features_for(mc.n_mfcc);
  mc.max_frames = fc.max_frames;
  mc.validate();
  const TrainConfig tc = train_config_with(ctx, o);

  const DatasetManifest manifest = require_manifest(manifest_path, "augment");
  const Dataset data = require_dataset(manifest, features_root, mc.n_mfcc);
  ctx.log->info("training {} on {} examples, {} shuffles x {} epochs", model_id_for(mc), data.size(),
                tc.n_shuffles, tc.epochs);
  const RunReport report = cross_validate(mc, tc, data, ctx.jobs);

  const fs::path dir = out / report.model_id;
  save_run_models(ctx, report, fc, dir);
  write_json(dir / "report.json", stamped_report(ctx, report));
  write_config_snapshot(ctx, out);
  print_rows(ctx, {result_row(report)}, report.model_id);
  ctx.print() << "models written to " << dir.string() << "\n";
  return kExitOk;
}

struct GridOptions {
  TrainOptions train;
  bool save_models = false;
};

int cmd_grid(const Context& ctx, const GridOptions& o) {
  const fs::path manifest_path =
      o.train.manifest.empty() ? ctx.config.paths.augmented / "manifest.jsonl" : fs::path(o.train.manifest);
  const fs::path features_root =
      o.train.features.empty() ? ctx.config.paths.features : fs::path(o.train.features);
  const fs::path out = ctx.out_or(ctx.config.paths.reports);
  const TrainConfig tc = train_config_with(ctx, o.train);

  const DatasetManifest manifest = require_manifest(manifest_path, "augment");
  const Dataset d13 = require_dataset(manifest, features_root, 13);
  const Dataset d40 = require_dataset(manifest, features_root, 40);

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto last = start;
  nlohmann::json timings = nlohmann::json::array();
  const GridProgress progress = [&](const RunReport& r) {
    const auto now = clock::now();
    const double seconds = std::chrono::duration<double>(now - last).count();
    last = now;
    timings.push_back({{"model_id", r.model_id}, {"seconds", seconds}, {"failed", r.failed}});
    if (r.failed)
      ctx.log->error("{} failed: {}", r.model_id, r.error);
    else
      ctx.log->info("{} done in {:.1f}s, mean validation accuracy {}", r.model_id, seconds,
                    percent(r.averaged.accuracy));
  };
  const GridResult grid = run_grid(tc, d13, d40, ctx.jobs, progress);
  const double total = std::chrono::duration<double>(clock::now() - start).count();

  const auto rows13 = result_rows(grid.reports13);
  const auto rows40 = result_rows(grid.reports40);
  write_results_csv(rows13, out / "results_13.csv");
  write_results_csv(rows40, out / "results_40.csv");

  nlohmann::json failed = nlohmann::json::array();
  for (const auto* list : {&grid.reports13, &grid.reports40}) {
    for (const auto& r : *list) {
      write_json(out / "runs" / (r.model_id + ".json"), stamped_report(ctx, r));
      if (r.failed) failed.push_back({{"model_id", r.model_id}, {"error", r.error}});
      if (o.save_models && !r.failed)
        save_run_models(ctx, r, ctx.config.features_for(r.model_config.n_mfcc), out / "models" / r.model_id);
    }
  }
  // Wall-clock figures live only here so the other artifacts stay reproducible.
  write_json(out / "run_manifest.json", {{"pipeline_config_hash", ctx.config_hash},
                                         {"seed", ctx.config.seed},
                                         {"train_config", tc},
                                         {"trained_models", grid.trained_models()},
                                         {"failed_cells", failed},
                                         {"cell_timings", timings},
                                         {"total_seconds", total}});
  write_config_snapshot(ctx, out);

  print_rows(ctx, rows13, "13 MFCC features");
  print_rows(ctx, rows40, "40 MFCC features");
  ctx.print() << grid.trained_models() << " models trained";
  if (!failed.empty()) ctx.print() << ", " << failed.size() << " cells failed";
  ctx.print() << "\n";
  return failed.empty() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- evaluate / predict

struct EvaluateOptions {
  std::string model;
  std::string manifest;
  std::string features;
};

int cmd_evaluate(const Context& ctx, const EvaluateOptions& o) {
  const SavedModel model = require_model(o.model);
  const fs::path manifest_path =
      o.manifest.empty() ? ctx.config.paths.augmented / "manifest.jsonl" : fs::path(o.manifest);
  const fs::path features_root = o.features.empty() ? ctx.config.paths.features : fs::path(o.features);
  const DatasetManifest manifest = require_manifest(manifest_path, "augment");
  const Dataset data = require_dataset(manifest, features_root, model.config.n_mfcc);

  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const ConfusionCounts counts = evaluate(model.config, model.params, data, all, ctx.jobs);
  const nlohmann::json result{{"model", o.model},
                              {"manifest", manifest_path.generic_string()},
                              {"records", data.size()},
                              {"counts", counts},
                              {"metrics", metrics(counts)},
                              {"pipeline_config_hash", ctx.config_hash},
                              {"seed", ctx.config.seed}};
  if (ctx.out) write_json(*ctx.out / "evaluation.json", result);
  ctx.print() << result.dump(2) << "\n";
  return kExitOk;
}

struct PredictOptions {
  std::string model;
  std::vector<std::string> files;
};

int cmd_predict(const Context& ctx, const PredictOptions& o, std::ostream& err) {
  const SavedModel model = require_model(o.model);
  const FeatureConfig fc = model.metadata.contains("feature_config")
                               ? model.metadata.at("feature_config").get<FeatureConfig>()
                               : ctx.config.features_for(model.config.n_mfcc);
  if (fc.max_frames != model.config.max_frames || feature_width(fc.feature_mode) != model.config.n_mfcc)
    throw ConfigError("model " + o.model + ": stored feature config does not match the model shape");

  std::vector<std::optional<double>> probs(o.files.size());
  std::vector<std::string> errors(o.files.size());
  parallel_for(o.files.size(), ctx.jobs, [&](std::size_t i) {
    try {
      const FeatureMatrix fm = extract_features(load_at_rate(o.files[i], fc.sample_rate), fc);
      probs[i] = model_predict(model.config, fm.values, model.params);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  bool ok = true;
  char buf[64];
  for (std::size_t i = 0; i < o.files.size(); ++i) {
    if (!probs[i]) {
      err << o.files[i] << ": " << errors[i] << "\n";
      ok = false;
      continue;
    }
    std::snprintf(buf, sizeof buf, "\t%.6f\t%d\n", *probs[i], predict_label(*probs[i]));
    ctx.print() << o.files[i] << buf;
  }
  return ok ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- report

struct ReportOptions {
  std::vector<std::string> csvs;
  std::string results_dir;
  std::string svg_dir;
  std::string csv_out;
};

int cmd_report(const Context& ctx, const ReportOptions& o) {
  std::vector<fs::path> inputs(o.csvs.begin(), o.csvs.end());
  if (inputs.empty()) {
    const fs::path dir = !o.results_dir.empty() ? fs::path(o.results_dir) : ctx.out_or(ctx.config.paths.reports);
    for (const char* name : {"results_13.csv", "results_40.csv"})
      if (fs::exists(dir / name)) inputs.push_back(dir / name);
    if (inputs.empty())
      throw ConfigError("no results CSVs in " + dir.string() + "; run `convser grid` first");
  }
  for (const auto& path : inputs) {
    const auto rows = read_results_csv(path);
    const std::string title = path.stem().string();
    print_rows(ctx, rows, title);
    if (!o.svg_dir.empty()) write_text(fs::path(o.svg_dir) / (title + ".svg"), render_accuracy_svg(rows, title));
    if (!o.csv_out.empty()) write_results_csv(rows, fs::path(o.csv_out) / path.filename());
  }
  return kExitOk;
}

Context make_context(const GlobalOptions& g, std::ostream& out, spdlog::logger& log) {
  Context ctx;
  if (!g.config.empty()) ctx.config = load_pipeline_config(g.config);
  if (g.seed) ctx.config.apply_seed(*g.seed);
  ctx.config.validate();
  ctx.config_hash = pipeline_config_hash(ctx.config);
  ctx.jobs = std::max(1, g.jobs);
  if (!g.out.empty()) ctx.out = fs::path(g.out);
  ctx.out_stream = &out;
  ctx.log = &log;
  log.debug("pipeline config hash {}", ctx.config_hash);
  return ctx;
}

void add_train_flags(CLI::App* cmd, TrainOptions& t) {
  cmd->add_option("--manifest", t.manifest, "Augmented manifest (default <augmented>/manifest.jsonl)");
  cmd->add_option("--features", t.features, "Feature store root (default from config)");
  cmd->add_option("--epochs", t.epochs, "Training epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--shuffles", t.shuffles, "Independent train/validation splits")->check(CLI::PositiveNumber);
  cmd->add_option("--split", t.split, "Split mode")->check(CLI::IsMember({"paper", "grouped"}));
  cmd->add_option("--selection", t.selection, "Which epoch's weights to keep")
      ->check(CLI::IsMember({"final_epoch", "best_val"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  spdlog::logger log("convser", sink);
  log.set_pattern("[%l] %v");
  log.set_level(log_level_from_env());

  CLI::App app{"Conviction detection from speech: synthetic corpora, MFCC features, CNN-LSTM training"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "Pipeline config JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Seed for every random stream");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");

  SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a labeled synthetic corpus");
  c_synth->add_option("--n", synth.n, "Number of recordings")->check(CLI::PositiveNumber);
  c_synth->add_option("--duration", synth.duration, "Clip length in seconds")->check(CLI::PositiveNumber);
  c_synth->add_flag("--null", synth.null_corpus, "Give both classes the same acoustic signature");

  AugmentOptions augment;
  auto* c_augment = app.add_subcommand("augment", "Expand a manifest with augmented variants");
  c_augment->add_option("--manifest", augment.manifest, "Input manifest (default <corpus>/manifest.jsonl)");
  c_augment->add_option("--variants", augment.variants, "Use only the first N plan variants");

  ExtractOptions extract;
  auto* c_extract = app.add_subcommand("extract", "Compute MFCC feature files");
  c_extract->add_option("--manifest", extract.manifest, "Manifest (default <augmented>/manifest.jsonl)");
  c_extract->add_option("--mfcc", extract.mfcc, "Restrict to one width")->check(CLI::IsMember({13, 40}));

  TrainOptions train;
  auto* c_train = app.add_subcommand("train", "Cross-validate one model configuration");
  add_train_flags(c_train, train);
  c_train->add_option("--mfcc", train.mfcc, "Feature width")->check(CLI::IsMember({13, 40}));
  c_train->add_option("--filters", train.filters, "Convolution filters")->check(CLI::PositiveNumber);
  c_train->add_option("--kernel", train.kernel, "Convolution kernel size")->check(CLI::PositiveNumber);
  c_train->add_option("--units", train.units, "LSTM units")->check(CLI::PositiveNumber);

  GridOptions grid;
  auto* c_grid = app.add_subcommand("grid", "Train all 16 grid cells and write the results tables");
  add_train_flags(c_grid, grid.train);
  c_grid->add_flag("--save-models", grid.save_models, "Also write every trained model");

  EvaluateOptions evaluate_opts;
  auto* c_evaluate = app.add_subcommand("evaluate", "Score a saved model on a manifest");
  c_evaluate->add_option("--model", evaluate_opts.model, "Model file")->required();
  c_evaluate->add_option("--manifest", evaluate_opts.manifest, "Manifest (default <augmented>/manifest.jsonl)");
  c_evaluate->add_option("--features", evaluate_opts.features, "Feature store root");

  PredictOptions predict;
  auto* c_predict = app.add_subcommand("predict", "Print probability and label for WAV files");
  c_predict->add_option("--model", predict.model, "Model file")->required();
  c_predict->add_option("files", predict.files, "WAV files")->required();

  ReportOptions report;
  auto* c_report = app.add_subcommand("report", "Render results CSVs as aligned tables");
  c_report->add_option("csvs", report.csvs, "Results CSV files");
  c_report->add_option("--results-dir", report.results_dir, "Directory holding results_13/40.csv");
  c_report->add_option("--svg", report.svg_dir, "Write an accuracy bar chart per table into this directory");
  c_report->add_option("--csv-out", report.csv_out, "Re-serialize each table into this directory");

  std::vector<std::string> argv_store{"convser"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Context ctx = make_context(g, out, log);
    if (c_synth->parsed()) return cmd_synth(ctx, synth);
    if (c_augment->parsed()) return cmd_augment(ctx, augment);
    if (c_extract->parsed()) return cmd_extract(ctx, extract, err);
    if (c_train->parsed()) return cmd_train(ctx, train);
    if (c_grid->parsed()) return cmd_grid(ctx, grid);
    if (c_evaluate->parsed()) return cmd_evaluate(ctx, evaluate_opts);
    if (c_predict->parsed()) return cmd_predict(ctx, predict, err);
    if (c_report->parsed()) return cmd_report(ctx, report);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    log.error("{}", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace convser::cli
