#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "isb/checkpoint.hpp"
#include "isb/corpus.hpp"
#include "isb/data_pipeline.hpp"
#include "isb/evaluation.hpp"
#include "isb/flow_store.hpp"
#include "isb/image_io.hpp"
#include "isb/run_config.hpp"
#include "isb/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace isb::cli {

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnreadableSource:
    case ErrorCode::InconsistentDimensions:
    case ErrorCode::DegenerateOutput:
    case ErrorCode::BadRatios:
    case ErrorCode::EmptyCorpus:
    case ErrorCode::BadIndex:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidConfig:
    case ErrorCode::EmptySequence:
    case ErrorCode::TooSmall:
      return 2;
    case ErrorCode::VersionMismatch:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::ConfigMismatch:
      return 3;
    case ErrorCode::NonFiniteLoss:
      return 4;
    case ErrorCode::IdenticalInputs:
    case ErrorCode::IoError:
      return 1;
  }
  return 1;
}

namespace {

struct Common {
  std::string config_path;
  std::optional<std::string> profile;
  std::vector<std::string> sets;
  bool table = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "JSON run config (flat dotted keys or nested sections)");
  sub->add_option("--profile", c.profile, "Network sizes: tiny or full");
  sub->add_option("--set", c.sets, "Override a config key, e.g. --set train.seed=3");
  sub->add_flag("--table", c.table, "Print a text table instead of JSON");
}

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return text;
  }
}

/// Profile flag, then config file, then --set pairs, then dedicated flags.
RunConfig resolve(const Common& c, const json& flags, std::ostream& err) {
  RunConfig cfg = RunConfig::for_profile(c.profile.value_or("tiny"));
  if (!c.config_path.empty()) cfg = load_run_config(c.config_path, cfg);
  json overrides = json::object();
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(ErrorCode::InvalidConfig, "--set expects key=value, got '" + s + "'");
    overrides[s.substr(0, eq)] = parse_value(s.substr(eq + 1));
  }
  for (const auto& [k, v] : flags.items()) overrides[k] = v;
  cfg = apply_overrides(cfg, overrides);
  err << "effective config: " << to_flat_json(cfg).dump() << '\n';
  return cfg;
}

template <typename T>
void put(json& flags, const char* key, const std::optional<T>& v) {
  if (v) flags[key] = *v;
}

CorpusLayout layout_of(const RunConfig& cfg) { return {cfg.corpus_root, cfg.flow_root}; }

void require_set(const std::string& value, const char* what) {
  if (value.empty()) fail(ErrorCode::InvalidConfig, std::string(what) + " is not set");
}

Generator generator_from(const CheckpointBundle& bundle) {
  GeneratorConfig gc;
  try {
    gc = bundle.configs.at("generator").get<GeneratorConfig>();
  } catch (const json::exception& e) {
    fail(ErrorCode::ShapeMismatch, std::string("checkpoint carries no usable generator config: ") + e.what());
  }
  Generator g(gc, 0);
  import_parameters(g.parameters(), bundle.generator_params, "generator");
  return g;
}

bool encoder_available() { return std::system("command -v ffmpeg >/dev/null 2>&1") == 0; }

std::vector<Frame> read_frame_dir(const fs::path& dir) { return load_clip(dir, dir.filename().string()).frames; }

// ---- subcommands ----------------------------------------------------------

struct ToyArgs {
  std::string out;
  int clips = 4;
  int frames = 7;
  int size = 32;
  std::uint64_t seed = 7;
};

int cmd_toy(const ToyArgs& a, std::ostream& out) {
  const auto clips = make_toy_corpus(a.clips, a.frames, a.size, a.size, a.seed);
  for (const auto& clip : clips) write_clip(clip, fs::path(a.out) / clip.clip_id);
  out << json{{"clips", clips.size()}, {"frames_per_clip", a.frames}, {"out", a.out}}.dump() << '\n';
  return 0;
}

struct PrepareArgs {
  Common common;
  std::optional<std::string> data_root, out, flow_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> neighbors;
  double train_ratio = 0.8, val_ratio = 0.1, test_ratio = 0.1;
};

int cmd_prepare(const PrepareArgs& a, std::ostream& out, std::ostream& err) {
  json flags = json::object();
  put(flags, "paths.data_root", a.data_root);
  put(flags, "paths.corpus_root", a.out);
  put(flags, "paths.flow_root", a.flow_dir);
  put(flags, "train.seed", a.seed);
  put(flags, "generator.n_neighbors", a.neighbors);
  const RunConfig cfg = resolve(a.common, flags, err);
  require_set(cfg.data_root, "paths.data_root (--data-root)");
  require_set(cfg.corpus_root, "paths.corpus_root (--out)");
  PrepareOptions opts;
  opts.scale = cfg.generator.scale;
  opts.n_neighbors = cfg.generator.n_neighbors;
  opts.flow = cfg.flow;
  opts.seed = cfg.train.seed;
  opts.ratios = {a.train_ratio, a.val_ratio, a.test_ratio};
  if (!fs::exists(cfg.data_root)) fail(ErrorCode::UnreadableSource, "data root " + cfg.data_root + " does not exist");
  const PrepareReport report = prepare_corpus(cfg.data_root, layout_of(cfg), opts);
  if (a.common.table) {
    out << "clips " << report.clips << "\nframes " << report.frames << " (" << report.frames_written << " written)\nflows "
        << report.flows << " (" << report.flows_written << " written)\n";
  } else {
    out << json(report).dump() << '\n';
  }
  return 0;
}

struct TrainArgs {
  Common common;
  std::optional<std::string> corpus, checkpoint_dir, ablation, flow_dir;
  std::optional<std::int64_t> max_steps, checkpoint_every;
  std::optional<int> batch_size, patch_size;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
  std::string resume, log;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  json flags = json::object();
  put(flags, "paths.corpus_root", a.corpus);
  put(flags, "paths.flow_root", a.flow_dir);
  put(flags, "paths.checkpoint_dir", a.checkpoint_dir);
  put(flags, "train.ablation_mode", a.ablation);
  put(flags, "train.max_steps", a.max_steps);
  put(flags, "train.checkpoint_every", a.checkpoint_every);
  put(flags, "train.batch_size", a.batch_size);
  put(flags, "train.patch_size", a.patch_size);
  put(flags, "train.learning_rate", a.lr);
  put(flags, "train.seed", a.seed);
  const RunConfig cfg = resolve(a.common, flags, err);
  require_set(cfg.corpus_root, "paths.corpus_root (--corpus)");
  require_set(cfg.checkpoint_dir, "paths.checkpoint_dir (--checkpoint-dir)");

  const CorpusLayout layout = layout_of(cfg);
  const DatasetSplit split = read_split_manifest(layout.split_path());
  if (split.train.empty()) fail(ErrorCode::EmptyCorpus, "split.json lists no training clips");
  const auto samples = load_samples(layout, split.train, cfg.generator.n_neighbors, cfg.generator.scale);

  Trainer trainer(cfg.generator, cfg.discriminator, cfg.features, cfg.train);
  if (!a.resume.empty()) trainer.restore(load_checkpoint(a.resume));

  fs::create_directories(cfg.checkpoint_dir);
  {
    std::ofstream cfg_out(fs::path(cfg.checkpoint_dir) / "run_config.json");
    cfg_out << to_flat_json(cfg).dump(2) << '\n';
  }
  const fs::path log_path = a.log.empty() ? fs::path(cfg.checkpoint_dir) / "train_log.jsonl" : fs::path(a.log);
  std::ofstream log(log_path, a.resume.empty() ? std::ios::trunc : std::ios::app);
  if (!log) fail(ErrorCode::IoError, "cannot write " + log_path.string());

  const std::int64_t start = trainer.step();
  StepRecord last;
  FitOptions options;
  options.checkpoint_dir = cfg.checkpoint_dir;
  options.log = &log;
  options.on_step = [&last](const StepRecord& r) { last = r; };
  fit(trainer, samples, options);

  json summary{{"start_step", start},
               {"final_step", trainer.step()},
               {"windows", samples.size()},
               {"checkpoint", (fs::path(cfg.checkpoint_dir) / "latest.isbc").string()},
               {"log", log_path.string()}};
  if (trainer.step() > start) summary["final"] = last;
  if (a.common.table) {
    out << "steps " << start << " -> " << trainer.step() << "\ncheckpoint " << summary["checkpoint"].get<std::string>() << '\n';
  } else {
    out << summary.dump() << '\n';
  }
  return 0;
}

struct UpscaleArgs {
  Common common;
  std::string input, checkpoint, out, video_out;
  bool no_video = false;
};

int cmd_upscale(const UpscaleArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve(a.common, json::object(), err);
  const CheckpointBundle bundle = load_checkpoint(a.checkpoint);
  const Generator generator = generator_from(bundle);
  const Clip lr = extract_frames(a.input, {});
  const int n = generator.config().n_neighbors;
  fs::create_directories(a.out);
  for (int t = 0; t < lr.size(); ++t) {
    const ClipWindow w = window_clip(lr, t, n, compute_window_flows(lr, t, n, cfg.flow), nullptr, generator.config().scale);
    const Frame sr = clamped(generator.infer(w));
    const Frame& src = lr.frames[static_cast<std::size_t>(t)];
    if (sr.height() != src.height() * generator.config().scale || sr.width() != src.width() * generator.config().scale) {
      fail(ErrorCode::DimensionMismatch, "generator output does not match the scale contract");
    }
    write_png(fs::path(a.out) / frame_file_name(t), sr);
  }
  json report{{"frames", lr.size()},
              {"height", lr.frames.front().height() * generator.config().scale},
              {"width", lr.frames.front().width() * generator.config().scale},
              {"out", a.out},
              {"video", nullptr}};
  if (!a.no_video) {
    if (!encoder_available()) {
      err << "warning: ffmpeg not found; skipping video reassembly\n";
    } else {
      const fs::path video = a.video_out.empty() ? fs::path(a.out) / "sr.mp4" : fs::path(a.video_out);
      const std::string cmd = "ffmpeg -nostdin -loglevel error -y -framerate 25 -i '" + (fs::path(a.out) / "%06d.png").string() +
                              "' -pix_fmt yuv420p '" + video.string() + "'";
      if (std::system(cmd.c_str()) != 0) fail(ErrorCode::IoError, "ffmpeg failed to encode " + video.string());
      report["video"] = video.string();
    }
  }
  if (a.common.table) {
    out << "frames " << lr.size() << " -> " << a.out << '\n';
  } else {
    out << report.dump() << '\n';
  }
  return 0;
}

struct EvaluateArgs {
  Common common;
  std::string sr, hr, checkpoint, split = "test", model = "checkpoint";
  std::optional<std::string> corpus, flow_dir;
  std::vector<std::string> clips;
  std::optional<int> crop_border;
  std::optional<std::string> colorspace;
};

void print_reports(const std::vector<MetricReport>& reports, bool table, std::ostream& out) {
  if (!table) {
    out << (reports.size() == 1 ? json(reports.front()) : json(reports)).dump() << '\n';
    return;
  }
  char line[128];
  std::snprintf(line, sizeof line, "%-20s %10s %8s\n", "clip", "PSNR (dB)", "SSIM");
  out << line;
  for (const auto& r : reports) {
    if (r.mean_psnr_db) {
      std::snprintf(line, sizeof line, "%-20s %10.2f %8.4f\n", r.clip_id.c_str(), *r.mean_psnr_db, r.mean_ssim);
    } else {
      std::snprintf(line, sizeof line, "%-20s %10s %8.4f\n", r.clip_id.c_str(), "perfect", r.mean_ssim);
    }
    out << line;
  }
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  json flags = json::object();
  put(flags, "paths.corpus_root", a.corpus);
  put(flags, "paths.flow_root", a.flow_dir);
  put(flags, "metrics.crop_border", a.crop_border);
  put(flags, "metrics.colorspace", a.colorspace);
  const RunConfig cfg = resolve(a.common, flags, err);

  if (!a.sr.empty() || !a.hr.empty()) {
    if (a.sr.empty() || a.hr.empty()) fail(ErrorCode::InvalidConfig, "--sr and --hr go together");
    const auto sr = read_frame_dir(a.sr);
    const auto hr = read_frame_dir(a.hr);
    print_reports({score_frames(fs::path(a.hr).filename().string(), sr, hr, cfg.metrics)}, a.common.table, out);
    return 0;
  }

  require_set(cfg.corpus_root, "paths.corpus_root (--corpus)");
  const CorpusLayout layout = layout_of(cfg);
  std::vector<std::string> ids = a.clips;
  if (ids.empty()) {
    const DatasetSplit split = read_split_manifest(layout.split_path());
    if (a.split == "train") ids = split.train;
    else if (a.split == "val") ids = split.val;
    else if (a.split == "test") ids = split.test;
    else if (a.split == "all") {
      ids = split.train;
      ids.insert(ids.end(), split.val.begin(), split.val.end());
      ids.insert(ids.end(), split.test.begin(), split.test.end());
    } else {
      fail(ErrorCode::InvalidConfig, "--split must be train, val, test, or all");
    }
    if (ids.empty()) fail(ErrorCode::EmptyCorpus, "split '" + a.split + "' has no clips; pass --clip or another --split");
  }

  std::optional<Generator> generator;
  std::unique_ptr<SuperResolver> model;
  int n = cfg.generator.n_neighbors;
  if (a.model == "checkpoint") {
    if (a.checkpoint.empty()) fail(ErrorCode::InvalidConfig, "--checkpoint is required for the checkpoint model");
    generator.emplace(generator_from(load_checkpoint(a.checkpoint)));
    n = generator->config().n_neighbors;
    model = std::make_unique<GeneratorModel>(*generator);
  } else if (a.model == "bicubic") {
    model = std::make_unique<BicubicModel>(cfg.generator.scale);
  } else if (a.model == "ground_truth") {
    model = std::make_unique<GroundTruthModel>();
  } else {
    fail(ErrorCode::InvalidConfig, "--model must be checkpoint, bicubic, or ground_truth");
  }

  std::vector<MetricReport> reports;
  for (const auto& id : ids) {
    const auto windows = load_samples(layout, {id}, n, cfg.generator.scale);
    reports.push_back(evaluate_clip(*model, windows, cfg.metrics));
  }
  print_reports(reports, a.common.table, out);
  return 0;
}

struct AblateArgs {
  Common common;
  std::optional<std::string> corpus, flow_dir;
  std::string modes = "all", log_dir;
  std::int64_t steps = 50;
  std::optional<std::uint64_t> seed;
};

int cmd_ablate(const AblateArgs& a, std::ostream& out, std::ostream& err) {
  json flags = json::object();
  put(flags, "paths.corpus_root", a.corpus);
  put(flags, "paths.flow_root", a.flow_dir);
  put(flags, "train.seed", a.seed);
  const RunConfig cfg = resolve(a.common, flags, err);

  std::vector<AblationMode> modes;
  if (a.modes == "all") {
    modes.assign(kAllAblationModes.begin(), kAllAblationModes.end());
  } else {
    std::stringstream ss(a.modes);
    for (std::string m; std::getline(ss, m, ',');)
      if (!m.empty()) modes.push_back(parse_ablation_mode(m));
  }
  if (modes.empty()) fail(ErrorCode::InvalidConfig, "--modes selected nothing");

  const int n = cfg.generator.n_neighbors;
  std::vector<TrainingSample> train, held_out;
  if (cfg.corpus_root.empty()) {
    // Built-in toy corpus: the last clip is held out.
    const auto clips = make_toy_corpus(3);
    for (std::size_t i = 0; i < clips.size(); ++i) {
      Clip lr{{}, clips[i].clip_id, {}}, hr{{}, clips[i].clip_id, {}};
      for (const auto& f : clips[i].frames) {
        FramePair p = make_pair(f, cfg.generator.scale);
        lr.frames.push_back(quantized8(p.lr));
        hr.frames.push_back(quantized8(p.hr));
      }
      auto samples = make_samples(lr, &hr, n, cfg.flow, cfg.generator.scale);
      auto& dest = i + 1 == clips.size() ? held_out : train;
      dest.insert(dest.end(), samples.begin(), samples.end());
    }
  } else {
    const CorpusLayout layout = layout_of(cfg);
    DatasetSplit split = read_split_manifest(layout.split_path());
    std::vector<std::string> eval_ids = !split.test.empty() ? split.test : split.val;
    if (eval_ids.empty()) {
      if (split.train.size() < 2) fail(ErrorCode::EmptyCorpus, "ablation needs a held-out clip");
      eval_ids = {split.train.back()};
      split.train.pop_back();
    }
    train = load_samples(layout, split.train, n, cfg.generator.scale);
    held_out = load_samples(layout, eval_ids, n, cfg.generator.scale);
  }

  AblationOptions options;
  options.generator = cfg.generator;
  options.discriminator = cfg.discriminator;
  options.features = cfg.features;
  options.train = cfg.train;
  options.train.log_wall_time = false;
  options.metrics = cfg.metrics;
  options.log_dir = a.log_dir;
  const AblationReport report = ablation_report(modes, train, held_out, a.steps, options);
  if (a.common.table) {
    out << render_table(report);
  } else {
    out << json(report).dump() << '\n';
  }
  return 0;
}

struct ProfileArgs {
  Common common;
  std::string input, out;
  int row = 0;
};

int cmd_profile(const ProfileArgs& a, std::ostream& out, std::ostream& err) {
  resolve(a.common, json::object(), err);
  const Clip clip = extract_frames(a.input, {});
  const Frame profile = temporal_profile(clip.frames, a.row);
  write_png(a.out, profile);
  out << json{{"frames", clip.size()}, {"width", profile.width()}, {"row", a.row}, {"out", a.out}}.dump() << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recurrent back-projection video super-resolution toolkit", "isb"};
  app.require_subcommand(1);

  ToyArgs toy;
  auto* toy_cmd = app.add_subcommand("toy", "Write the procedural toy corpus as frame directories");
  toy_cmd->add_option("--out", toy.out, "Output directory")->required();
  toy_cmd->add_option("--clips", toy.clips, "Number of clips")->check(CLI::PositiveNumber);
  toy_cmd->add_option("--frames", toy.frames, "Frames per clip")->check(CLI::PositiveNumber);
  toy_cmd->add_option("--size", toy.size, "Frame side in pixels")->check(CLI::PositiveNumber);
  toy_cmd->add_option("--seed", toy.seed, "Corpus seed");

  PrepareArgs prep;
  auto* prep_cmd = app.add_subcommand("prepare", "Extract frames, build LR/HR pairs, precompute flows, write split.json");
  add_common(prep_cmd, prep.common);
  prep_cmd->add_option("--flow-dir", prep.flow_dir, "Flow store root (default <corpus>/flows)");
  prep_cmd->add_option("--data-root", prep.data_root, "Directory of frame folders or videos");
  prep_cmd->add_option("--out", prep.out, "Prepared corpus directory");
  prep_cmd->add_option("--seed", prep.seed, "Split seed");
  prep_cmd->add_option("--neighbors", prep.neighbors, "Neighbor frames per window (flows to precompute)");
  prep_cmd->add_option("--train-ratio", prep.train_ratio);
  prep_cmd->add_option("--val-ratio", prep.val_ratio);
  prep_cmd->add_option("--test-ratio", prep.test_ratio);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train generator and discriminator on a prepared corpus");
  add_common(train_cmd, train.common);
  train_cmd->add_option("--flow-dir", train.flow_dir, "Flow store root (default <corpus>/flows)");
  train_cmd->add_option("--corpus", train.corpus, "Prepared corpus directory");
  train_cmd->add_option("--checkpoint-dir", train.checkpoint_dir, "Where checkpoints and the log go");
  train_cmd->add_option("--max-steps", train.max_steps);
  train_cmd->add_option("--checkpoint-every", train.checkpoint_every);
  train_cmd->add_option("--batch-size", train.batch_size);
  train_cmd->add_option("--patch-size", train.patch_size, "Random LR training patch size (0: full frames)");
  train_cmd->add_option("--lr", train.lr, "Adam learning rate");
  train_cmd->add_option("--seed", train.seed);
  train_cmd->add_option("--ablation", train.ablation, "l1_only, mse_only, adv, adv_mse, adv_mse_perc, or full");
  train_cmd->add_option("--resume", train.resume, "Checkpoint to continue from");
  train_cmd->add_option("--log", train.log, "JSON-lines log path (default <checkpoint-dir>/train_log.jsonl)");

  UpscaleArgs up;
  auto* up_cmd = app.add_subcommand("upscale", "Super-resolve a video or a directory of frames");
  add_common(up_cmd, up.common);
  up_cmd->add_option("--input", up.input, "Video file or frame directory")->required();
  up_cmd->add_option("--checkpoint", up.checkpoint)->required();
  up_cmd->add_option("--out", up.out, "Directory for SR frames")->required();
  up_cmd->add_flag("--no-video", up.no_video, "Do not reassemble a video");
  up_cmd->add_option("--video-out", up.video_out, "Video path (default <out>/sr.mp4)");

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "PSNR/SSIM of SR frames or of a checkpoint on corpus clips");
  add_common(ev_cmd, ev.common);
  ev_cmd->add_option("--flow-dir", ev.flow_dir, "Flow store root (default <corpus>/flows)");
  ev_cmd->add_option("--sr", ev.sr, "Directory of SR frames");
  ev_cmd->add_option("--hr", ev.hr, "Directory of ground-truth frames");
  ev_cmd->add_option("--checkpoint", ev.checkpoint);
  ev_cmd->add_option("--corpus", ev.corpus, "Prepared corpus directory");
  ev_cmd->add_option("--clip", ev.clips, "Clip id (repeatable)");
  ev_cmd->add_option("--split", ev.split, "train, val, test, or all");
  ev_cmd->add_option("--model", ev.model, "checkpoint, bicubic, or ground_truth");
  ev_cmd->add_option("--crop-border", ev.crop_border);
  ev_cmd->add_option("--colorspace", ev.colorspace, "luma or rgb");

  AblateArgs ab;
  auto* ab_cmd = app.add_subcommand("ablate", "Train and score each loss configuration");
  add_common(ab_cmd, ab.common);
  ab_cmd->add_option("--flow-dir", ab.flow_dir, "Flow store root (default <corpus>/flows)");
  ab_cmd->add_option("--corpus", ab.corpus, "Prepared corpus (default: built-in toy corpus)");
  ab_cmd->add_option("--modes", ab.modes, "Comma-separated modes or 'all'");
  ab_cmd->add_option("--steps", ab.steps, "Training steps per mode");
  ab_cmd->add_option("--seed", ab.seed);
  ab_cmd->add_option("--log-dir", ab.log_dir, "Write one JSON-lines log per mode here");

  ProfileArgs pr;
  auto* pr_cmd = app.add_subcommand("profile", "Stack one pixel row of every frame into an image");
  add_common(pr_cmd, pr.common);
  pr_cmd->add_option("--input", pr.input, "Video file or frame directory")->required();
  pr_cmd->add_option("--row", pr.row)->required();
  pr_cmd->add_option("--out", pr.out, "Output PNG")->required();

  std::vector<const char*> argv{"isb"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*toy_cmd) return cmd_toy(toy, out);
    if (*prep_cmd) return cmd_prepare(prep, out, err);
    if (*train_cmd) return cmd_train(train, out, err);
    if (*up_cmd) return cmd_upscale(up, out, err);
    if (*ev_cmd) return cmd_evaluate(ev, out, err);
    if (*ab_cmd) return cmd_ablate(ab, out, err);
    if (*pr_cmd) return cmd_profile(pr, out, err);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace isb::cli
