#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isb/corpus.hpp"
#include "isb/generator.hpp"
#include "isb/metrics.hpp"
#include "isb/trainer.hpp"

namespace isb {

/// Anything that maps a window to an SR frame.
class SuperResolver {
 public:
  virtual ~SuperResolver() = default;
  virtual std::string name() const = 0;
  virtual Frame upscale(const ClipWindow& window) const = 0;
};

class GeneratorModel final : public SuperResolver {
 public:
  explicit GeneratorModel(const Generator& generator) : generator_(generator) {}
  std::string name() const override { return "generator"; }
  Frame upscale(const ClipWindow& window) const override { return generator_.infer(window); }

 private:
  const Generator& generator_;
};

class BicubicModel final : public SuperResolver {
 public:
  explicit BicubicModel(int scale = 4) : scale_(scale) {}
  std::string name() const override { return "bicubic"; }
  Frame upscale(const ClipWindow& window) const override;

 private:
  int scale_;
};

/// Returns the window's ground truth; a perfect-model reference.
class GroundTruthModel final : public SuperResolver {
 public:
  std::string name() const override { return "ground_truth"; }
  Frame upscale(const ClipWindow& window) const override;
};

/// psnr_db is empty for frames identical to the ground truth.
struct FrameScore {
  std::optional<double> psnr_db;
  double ssim = 0.0;
};

/// Means run over the frames that have a value; mean_psnr_db is empty when
/// every frame is a perfect match.
struct MetricReport {
  std::string clip_id;
  std::vector<FrameScore> per_frame;
  std::optional<double> mean_psnr_db;
  double mean_ssim = 0.0;
};

void to_json(nlohmann::json& j, const MetricReport& r);
void from_json(const nlohmann::json& j, MetricReport& r);

/// Scores aligned SR/HR frame lists.
MetricReport score_frames(const std::string& clip_id, const std::vector<Frame>& sr, const std::vector<Frame>& hr,
                          const MetricOptions& options = {});

/// Runs the model on every window, clamps its output, and scores it. When
/// sr_out is given it receives the clamped SR frames in order.
MetricReport evaluate_clip(const SuperResolver& model, const std::vector<TrainingSample>& windows,
                           const MetricOptions& options = {}, std::vector<Frame>* sr_out = nullptr);

/// Same, building the windows from in-memory clips with one flow list per frame.
MetricReport evaluate_clip(const SuperResolver& model, const Clip& lr_clip, const Clip& hr_clip,
                           const std::vector<std::vector<FlowMap>>& flows, int n, const MetricOptions& options = {});

struct AblationRow {
  AblationMode mode = AblationMode::FULL;
  std::optional<double> psnr_db;
  double ssim = 0.0;
  LossBreakdown final_losses;
};

struct AblationReport {
  std::int64_t budget_steps = 0;
  std::vector<AblationRow> rows;
};

void to_json(nlohmann::json& j, const AblationReport& r);
std::string render_table(const AblationReport& report);

struct AblationOptions {
  GeneratorConfig generator = GeneratorConfig::tiny();
  DiscriminatorConfig discriminator = DiscriminatorConfig::tiny();
  FeatureExtractorConfig features = FeatureExtractorConfig::tiny();
  TrainConfig train;  // ablation_mode and max_steps are set per row
  MetricOptions metrics;
  std::filesystem::path log_dir;  // when set, <log_dir>/<MODE>.jsonl per mode
};

/// Trains a fresh model per mode with a shared seed for budget_steps on
/// train, then scores it on held_out.
AblationReport ablation_report(const std::vector<AblationMode>& modes, const std::vector<TrainingSample>& train,
                               const std::vector<TrainingSample>& held_out, std::int64_t budget_steps,
                               const AblationOptions& options = {});

/// Row `row` of every frame stacked top to bottom: a (frames x W) image.
Frame temporal_profile(const std::vector<Frame>& frames, int row);

}  // namespace isb
