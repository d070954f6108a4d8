#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isb/adam.hpp"
#include "isb/checkpoint.hpp"
#include "isb/corpus.hpp"
#include "isb/discriminator.hpp"
#include "isb/feature_extractor.hpp"
#include "isb/generator.hpp"
#include "isb/losses.hpp"

namespace isb {

/// Loss configurations from the L1 baseline up to the full four-term objective.
enum class AblationMode { L1_ONLY, MSE_ONLY, ADV, ADV_MSE, ADV_MSE_PERC, FULL };

inline constexpr std::array<AblationMode, 6> kAllAblationModes{AblationMode::L1_ONLY, AblationMode::MSE_ONLY,
                                                              AblationMode::ADV,     AblationMode::ADV_MSE,
                                                              AblationMode::ADV_MSE_PERC, AblationMode::FULL};

std::string_view to_string(AblationMode mode) noexcept;
// Accepts "FULL", "full", "adv_mse_perc", ...
AblationMode parse_ablation_mode(std::string_view text);
ActiveLosses active_losses(AblationMode mode) noexcept;
// The discriminator only trains when the adversarial term is in play.
bool trains_discriminator(AblationMode mode) noexcept;

struct TrainConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int batch_size = 1;
  std::int64_t max_steps = 1000;
  std::uint64_t seed = 0;
  LossWeights loss_weights;
  AblationMode ablation_mode = AblationMode::FULL;
  std::int64_t checkpoint_every = 100;  // 0: only at the end
  bool log_wall_time = true;            // false writes wall_ms = 0 for byte-stable logs
  int patch_size = 0;                   // square LR training patch; 0 trains on full frames

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

/// One line of the training log.
struct StepRecord {
  std::int64_t step = 0;
  LossBreakdown losses;
  double d_loss = 0.0;
  double wall_ms = 0.0;
};

void to_json(nlohmann::json& j, const StepRecord& r);

class Trainer {
 public:
  Trainer(const GeneratorConfig& gen, const DiscriminatorConfig& disc, const FeatureExtractorConfig& features,
          const TrainConfig& train);

  const TrainConfig& config() const noexcept { return train_; }
  Generator& generator() noexcept { return *generator_; }
  const Generator& generator() const noexcept { return *generator_; }
  Discriminator& discriminator() noexcept { return *discriminator_; }
  const Discriminator& discriminator() const noexcept { return *discriminator_; }
  const FeatureExtractor& feature_extractor() const noexcept { return *features_; }
  std::int64_t step() const noexcept { return step_; }

  /// One alternating update: discriminator on detached SR (when the mode uses
  /// it), then generator with the discriminator frozen. A non-finite loss
  /// throws NonFiniteLoss naming the batch before that update is applied.
  StepRecord train_step(const std::vector<const TrainingSample*>& batch);

  /// Only the discriminator half of train_step; returns the mean D loss.
  double discriminator_step(const std::vector<const TrainingSample*>& batch);
  /// Only the generator half of train_step.
  LossBreakdown generator_step(const std::vector<const TrainingSample*>& batch);

  /// Sample indices for a given step: position p = step * batch + i walks a
  /// fresh seeded permutation of the dataset every epoch, so the stream is a
  /// pure function of (seed, step).
  std::vector<std::size_t> batch_indices(std::int64_t step, std::size_t dataset_size) const;

  CheckpointBundle checkpoint() const;
  /// Loads parameters, optimizer state, and step. ShapeMismatch when the
  /// bundle does not fit the configured networks.
  void restore(const CheckpointBundle& bundle);

 private:
  void check_finite(const std::vector<const TrainingSample*>& batch, double value, const char* what) const;

  GeneratorConfig gen_config_;
  DiscriminatorConfig disc_config_;
  FeatureExtractorConfig feature_config_;
  TrainConfig train_;
  std::unique_ptr<Generator> generator_;
  std::unique_ptr<Discriminator> discriminator_;
  std::unique_ptr<FeatureExtractor> features_;
  std::unique_ptr<Adam> g_opt_;
  std::unique_ptr<Adam> d_opt_;
  std::int64_t step_ = 0;
  mutable std::map<std::uint64_t, std::vector<std::size_t>> permutations_;
};

struct FitOptions {
  std::filesystem::path checkpoint_dir;  // empty: no checkpoint files
  std::ostream* log = nullptr;           // JSON lines, one per step
  std::function<void(const StepRecord&)> on_step;
};

/// Trains until config().max_steps, resuming from the trainer's current step.
/// Writes checkpoint_%08d.isbc every checkpoint_every steps and latest.isbc at
/// the end. EmptyCorpus when there is nothing to train on.
/// Random patch_size crops (clamped to the frame) of each sample, seeded per step.
std::vector<TrainingSample> training_patches(const std::vector<const TrainingSample*>& batch, int size, int scale,
                                             std::uint64_t seed);

CheckpointBundle fit(Trainer& trainer, const std::vector<TrainingSample>& dataset, const FitOptions& options = {});

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::int64_t step);

}  // namespace isb
