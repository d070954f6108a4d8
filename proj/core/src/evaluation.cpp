#include "isb/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "isb/data_pipeline.hpp"
#include "isb/error.hpp"

namespace isb {

Frame BicubicModel::upscale(const ClipWindow& window) const { return bicubic_resize(window.target_lr, {scale_, 1}); }

Frame GroundTruthModel::upscale(const ClipWindow& window) const {
  if (!window.target_hr) fail(ErrorCode::DimensionMismatch, "ground-truth model needs windows with HR frames");
  return *window.target_hr;
}

void to_json(nlohmann::json& j, const MetricReport& r) {
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : r.per_frame) {
    frames.push_back({{"psnr_db", f.psnr_db ? nlohmann::json(*f.psnr_db) : nlohmann::json(nullptr)}, {"ssim", f.ssim}});
  }
  j = nlohmann::json{{"clip_id", r.clip_id},
                     {"per_frame", frames},
                     {"mean_psnr_db", r.mean_psnr_db ? nlohmann::json(*r.mean_psnr_db) : nlohmann::json(nullptr)},
                     {"mean_ssim", r.mean_ssim}};
}

void from_json(const nlohmann::json& j, MetricReport& r) {
  r = MetricReport{};
  r.clip_id = j.at("clip_id").get<std::string>();
  for (const auto& f : j.at("per_frame")) {
    FrameScore s;
    if (!f.at("psnr_db").is_null()) s.psnr_db = f.at("psnr_db").get<double>();
    s.ssim = f.at("ssim").get<double>();
    r.per_frame.push_back(s);
  }
  if (!j.at("mean_psnr_db").is_null()) r.mean_psnr_db = j.at("mean_psnr_db").get<double>();
  r.mean_ssim = j.at("mean_ssim").get<double>();
}

MetricReport score_frames(const std::string& clip_id, const std::vector<Frame>& sr, const std::vector<Frame>& hr,
                          const MetricOptions& options) {
  if (sr.size() != hr.size()) {
    fail(ErrorCode::InconsistentDimensions, clip_id + ": " + std::to_string(sr.size()) + " SR frames vs " +
                                                std::to_string(hr.size()) + " HR frames");
  }
  if (sr.empty()) fail(ErrorCode::EmptySequence, clip_id + ": no frames to score");
  MetricReport report;
  report.clip_id = clip_id;
  double psnr_sum = 0.0, ssim_sum = 0.0;
  int psnr_count = 0;
  for (std::size_t i = 0; i < sr.size(); ++i) {
    FrameScore s;
    try {
      s.psnr_db = psnr(sr[i], hr[i], options);
      psnr_sum += *s.psnr_db;
      ++psnr_count;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IdenticalInputs) throw;
    }
    s.ssim = ssim(sr[i], hr[i], options);
    ssim_sum += s.ssim;
    report.per_frame.push_back(s);
  }
  if (psnr_count > 0) report.mean_psnr_db = psnr_sum / psnr_count;
  report.mean_ssim = ssim_sum / static_cast<double>(sr.size());
  return report;
}

MetricReport evaluate_clip(const SuperResolver& model, const std::vector<TrainingSample>& windows,
                           const MetricOptions& options, std::vector<Frame>* sr_out) {
  if (windows.empty()) fail(ErrorCode::EmptySequence, "no windows to evaluate");
  std::vector<Frame> sr, hr;
  for (const auto& w : windows) {
    if (!w.window.target_hr) fail(ErrorCode::DimensionMismatch, "window " + w.clip_id + "@" + std::to_string(w.t) + " lacks HR");
    sr.push_back(clamped(model.upscale(w.window)));
    hr.push_back(*w.window.target_hr);
  }
  MetricReport report = score_frames(windows.front().clip_id, sr, hr, options);
  if (sr_out) *sr_out = std::move(sr);
  return report;
}

MetricReport evaluate_clip(const SuperResolver& model, const Clip& lr_clip, const Clip& hr_clip,
                           const std::vector<std::vector<FlowMap>>& flows, int n, const MetricOptions& options) {
  if (lr_clip.size() != hr_clip.size() || static_cast<int>(flows.size()) != lr_clip.size()) {
    fail(ErrorCode::InconsistentDimensions, lr_clip.clip_id + ": LR, HR, and flow lists are not aligned");
  }
  std::vector<TrainingSample> windows;
  for (int t = 0; t < lr_clip.size(); ++t) {
    windows.push_back({lr_clip.clip_id, t, window_clip(lr_clip, t, n, flows[static_cast<std::size_t>(t)], &hr_clip)});
  }
  return evaluate_clip(model, windows, options);
}

void to_json(nlohmann::json& j, const AblationReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"mode", to_string(row.mode)},
                    {"psnr_db", row.psnr_db ? nlohmann::json(*row.psnr_db) : nlohmann::json(nullptr)},
                    {"ssim", row.ssim},
                    {"final_losses", row.final_losses}});
  }
  j = nlohmann::json{{"budget_steps", r.budget_steps}, {"rows", rows}};
}

std::string render_table(const AblationReport& report) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-14s %10s %8s\n", "mode", "PSNR (dB)", "SSIM");
  out << line << std::string(34, '-') << '\n';
  for (const auto& row : report.rows) {
    if (row.psnr_db) {
      std::snprintf(line, sizeof line, "%-14s %10.2f %8.4f\n", std::string(to_string(row.mode)).c_str(), *row.psnr_db, row.ssim);
    } else {
      std::snprintf(line, sizeof line, "%-14s %10s %8.4f\n", std::string(to_string(row.mode)).c_str(), "perfect", row.ssim);
    }
    out << line;
  }
  return out.str();
}

AblationReport ablation_report(const std::vector<AblationMode>& modes, const std::vector<TrainingSample>& train,
                               const std::vector<TrainingSample>& held_out, std::int64_t budget_steps,
                               const AblationOptions& options) {
  AblationReport report;
  report.budget_steps = budget_steps;
  for (AblationMode mode : modes) {
    TrainConfig cfg = options.train;
    cfg.ablation_mode = mode;
    cfg.max_steps = budget_steps;
    cfg.checkpoint_every = 0;
    Trainer trainer(options.generator, options.discriminator, options.features, cfg);
    AblationRow row;
    row.mode = mode;
    FitOptions fit_options;
    fit_options.on_step = [&row](const StepRecord& r) { row.final_losses = r.losses; };
    std::ofstream log;
    if (!options.log_dir.empty()) {
      std::filesystem::create_directories(options.log_dir);
      log.open(options.log_dir / (std::string(to_string(mode)) + ".jsonl"), std::ios::trunc);
      if (!log) fail(ErrorCode::IoError, "cannot write ablation log in " + options.log_dir.string());
      fit_options.log = &log;
    }
    if (budget_steps > 0) fit(trainer, train, fit_options);
    const MetricReport metrics = evaluate_clip(GeneratorModel(trainer.generator()), held_out, options.metrics);
    row.psnr_db = metrics.mean_psnr_db;
    row.ssim = metrics.mean_ssim;
    report.rows.push_back(row);
  }
  return report;
}

Frame temporal_profile(const std::vector<Frame>& frames, int row) {
  if (frames.empty()) fail(ErrorCode::EmptySequence, "temporal profile of zero frames");
  const Frame& first = frames.front();
  if (row < 0 || row >= first.height()) {
    fail(ErrorCode::BadIndex, "row " + std::to_string(row) + " outside [0, " + std::to_string(first.height()) + ")");
  }
  Frame out(static_cast<int>(frames.size()), first.width(), first.channels());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const Frame& f = frames[t];
    if (!f.same_dims(first)) fail(ErrorCode::InconsistentDimensions, "frame " + std::to_string(t) + " differs in size");
    for (int c = 0; c < f.channels(); ++c)
      for (int x = 0; x < f.width(); ++x) out.at(static_cast<int>(t), x, c) = f.at(row, x, c);
  }
  return out;
}

}  // namespace isb
