#include "isb/trainer.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

#include "isb/error.hpp"
#include "isb/random.hpp"

namespace fs = std::filesystem;

namespace isb {

namespace ops = nn::ops;

std::string_view to_string(AblationMode mode) noexcept {
  switch (mode) {
    case AblationMode::L1_ONLY: return "L1_ONLY";
    case AblationMode::MSE_ONLY: return "MSE_ONLY";
    case AblationMode::ADV: return "ADV";
    case AblationMode::ADV_MSE: return "ADV_MSE";
    case AblationMode::ADV_MSE_PERC: return "ADV_MSE_PERC";
    case AblationMode::FULL: return "FULL";
  }
  return "FULL";
}

AblationMode parse_ablation_mode(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (AblationMode m : kAllAblationModes)
    if (to_string(m) == upper) return m;
  fail(ErrorCode::InvalidConfig, "unknown ablation mode '" + std::string(text) + "'");
}

ActiveLosses active_losses(AblationMode mode) noexcept {
  ActiveLosses a{false, false, false, false, false};
  switch (mode) {
    case AblationMode::L1_ONLY: a.l1 = true; break;
    case AblationMode::MSE_ONLY: a.mse = true; break;
    case AblationMode::ADV: a.adversarial = true; break;
    case AblationMode::ADV_MSE: a.adversarial = a.mse = true; break;
    case AblationMode::ADV_MSE_PERC: a.adversarial = a.mse = a.perceptual = true; break;
    case AblationMode::FULL: a = ActiveLosses::all(); break;
  }
  return a;
}

bool trains_discriminator(AblationMode mode) noexcept { return active_losses(mode).adversarial; }

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) fail(ErrorCode::InvalidConfig, "learning_rate must be positive");
  if (batch_size < 1) fail(ErrorCode::InvalidConfig, "batch_size must be at least 1");
  if (max_steps < 0) fail(ErrorCode::InvalidConfig, "max_steps must be non-negative");
  if (patch_size < 0) fail(ErrorCode::InvalidConfig, "patch_size must be non-negative");
  if (checkpoint_every < 0) fail(ErrorCode::InvalidConfig, "checkpoint_every must be non-negative");
  loss_weights.validate();
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"learning_rate", c.learning_rate},
                     {"beta1", c.beta1},
                     {"beta2", c.beta2},
                     {"adam_epsilon", c.adam_epsilon},
                     {"batch_size", c.batch_size},
                     {"max_steps", c.max_steps},
                     {"seed", c.seed},
                     {"loss_weights", c.loss_weights},
                     {"ablation_mode", to_string(c.ablation_mode)},
                     {"checkpoint_every", c.checkpoint_every},
                     {"log_wall_time", c.log_wall_time},
                     {"patch_size", c.patch_size}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig d;
  d.learning_rate = j.value("learning_rate", d.learning_rate);
  d.beta1 = j.value("beta1", d.beta1);
  d.beta2 = j.value("beta2", d.beta2);
  d.adam_epsilon = j.value("adam_epsilon", d.adam_epsilon);
  d.batch_size = j.value("batch_size", d.batch_size);
  d.max_steps = j.value("max_steps", d.max_steps);
  d.seed = j.value("seed", d.seed);
  if (j.contains("loss_weights")) d.loss_weights = j.at("loss_weights").get<LossWeights>();
  if (j.contains("ablation_mode")) d.ablation_mode = parse_ablation_mode(j.at("ablation_mode").get<std::string>());
  d.checkpoint_every = j.value("checkpoint_every", d.checkpoint_every);
  d.log_wall_time = j.value("log_wall_time", d.log_wall_time);
  d.patch_size = j.value("patch_size", d.patch_size);
  c = d;
}

void to_json(nlohmann::json& j, const StepRecord& r) {
  j = nlohmann::json{{"step", r.step},
                     {"mse", r.losses.mse},
                     {"l1", r.losses.l1},
                     {"perceptual", r.losses.perceptual},
                     {"adversarial", r.losses.adversarial},
                     {"tv", r.losses.tv},
                     {"total", r.losses.total},
                     {"d_loss", r.d_loss},
                     {"wall_ms", r.wall_ms}};
}

Trainer::Trainer(const GeneratorConfig& gen, const DiscriminatorConfig& disc, const FeatureExtractorConfig& features,
                 const TrainConfig& train)
    : gen_config_(gen), disc_config_(disc), feature_config_(features), train_(train) {
  train_.validate();
  generator_ = std::make_unique<Generator>(gen_config_, mix_seed(train_.seed, 1));
  discriminator_ = std::make_unique<Discriminator>(disc_config_, mix_seed(train_.seed, 2));
  features_ = std::make_unique<FeatureExtractor>(feature_config_);
  round_to_float(generator_->parameters());
  round_to_float(discriminator_->parameters());
  const AdamParams hp{train_.learning_rate, train_.beta1, train_.beta2, train_.adam_epsilon};
  g_opt_ = std::make_unique<Adam>(generator_->parameters(), hp);
  d_opt_ = std::make_unique<Adam>(discriminator_->parameters(), hp);
}

void Trainer::check_finite(const std::vector<const TrainingSample*>& batch, double value, const char* what) const {
  if (std::isfinite(value)) return;
  std::string ids;
  for (const auto* s : batch) ids += (ids.empty() ? "" : ", ") + s->clip_id + "@" + std::to_string(s->t);
  fail(ErrorCode::NonFiniteLoss, std::string(what) + " is " + std::to_string(value) + " at step " +
                                     std::to_string(step_ + 1) + " on batch [" + ids + "]");
}

namespace {

constexpr std::uint64_t kPatchStream = std::uint64_t{1} << 40;

nn::Var hr_of(const TrainingSample& s) {
  if (!s.window.target_hr) fail(ErrorCode::DimensionMismatch, "training window " + s.clip_id + "@" + std::to_string(s.t) + " has no HR frame");
  return nn::constant(s.window.target_hr->to_tensor());
}

}  // namespace

double Trainer::discriminator_step(const std::vector<const TrainingSample*>& batch) {
  std::vector<nn::Var> sr;
  {
    nn::NoGradGuard guard;
    for (const auto* s : batch) sr.push_back(generator_->forward(s->window));
  }
  nn::zero_grads(discriminator_->parameters());
  std::vector<nn::Var> terms;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const nn::Var d_hr = discriminator_->probability(hr_of(*batch[i]));
    const nn::Var d_sr = discriminator_->probability(nn::detach(sr[i]));
    terms.push_back(discriminator_loss(d_hr, d_sr));
  }
  const nn::Var total = ops::mean(terms);
  check_finite(batch, total.item(), "discriminator loss");
  nn::backward(total);
  d_opt_->step();
  return total.item();
}

LossBreakdown Trainer::generator_step(const std::vector<const TrainingSample*>& batch) {
  const ActiveLosses active = active_losses(train_.ablation_mode);
  nn::zero_grads(generator_->parameters());
  std::vector<nn::Var> totals;
  std::vector<LossBreakdown> parts;
  for (const auto* s : batch) {
    const nn::Var sr = generator_->forward(s->window);
    const nn::Var d_prob = active.adversarial ? discriminator_->probability(sr) : nn::Var{};
    GeneratorLoss loss = generator_loss(sr, hr_of(*s), d_prob, *features_, train_.loss_weights, active);
    parts.push_back(loss.breakdown);
    totals.push_back(std::move(loss.total));
  }
  const LossBreakdown mean = sequence_loss(parts);
  for (double v : {mean.mse, mean.l1, mean.perceptual, mean.adversarial, mean.tv, mean.total}) {
    check_finite(batch, v, "generator loss");
  }
  const nn::Var total = ops::mean(totals);
  if (total.requires_grad()) {
    nn::backward(total);
    g_opt_->step();
  }
  // Gradients that leaked into the frozen discriminator are discarded.
  nn::zero_grads(discriminator_->parameters());
  return mean;
}

StepRecord Trainer::train_step(const std::vector<const TrainingSample*>& batch) {
  if (batch.empty()) fail(ErrorCode::EmptyCorpus, "empty training batch");
  const auto start = std::chrono::steady_clock::now();
  StepRecord record;
  if (trains_discriminator(train_.ablation_mode)) record.d_loss = discriminator_step(batch);
  record.losses = generator_step(batch);
  record.step = ++step_;
  if (train_.log_wall_time) {
    record.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return record;
}

std::vector<std::size_t> Trainer::batch_indices(std::int64_t step, std::size_t dataset_size) const {
  if (dataset_size == 0) fail(ErrorCode::EmptyCorpus, "no training windows");
  std::vector<std::size_t> out;
  for (int i = 0; i < train_.batch_size; ++i) {
    const auto p = static_cast<std::uint64_t>(step) * static_cast<std::uint64_t>(train_.batch_size) + static_cast<std::uint64_t>(i);
    const std::uint64_t epoch = p / dataset_size;
    auto it = permutations_.find(epoch);
    if (it == permutations_.end()) {
      if (permutations_.size() > 4) permutations_.erase(permutations_.begin());
      std::vector<std::size_t> perm(dataset_size);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      Rng rng(mix_seed(train_.seed, epoch));
      for (std::size_t k = dataset_size - 1; k > 0; --k) std::swap(perm[k], perm[rng.below(k + 1)]);
      it = permutations_.emplace(epoch, std::move(perm)).first;
    }
    out.push_back(it->second[p % dataset_size]);
  }
  return out;
}

CheckpointBundle Trainer::checkpoint() const {
  CheckpointBundle b;
  b.generator_params = export_parameters(generator_->parameters());
  b.discriminator_params = export_parameters(discriminator_->parameters());
  g_opt_->export_state(b.optimizer_state, "generator.");
  d_opt_->export_state(b.optimizer_state, "discriminator.");
  b.step = step_;
  b.configs = nlohmann::json{{"generator", gen_config_},
                             {"discriminator", disc_config_},
                             {"feature_extractor", feature_config_},
                             {"train", train_}};
  b.rng_state = Rng(train_.seed).state();
  return b;
}

void Trainer::restore(const CheckpointBundle& bundle) {
  import_parameters(generator_->parameters(), bundle.generator_params, "generator");
  import_parameters(discriminator_->parameters(), bundle.discriminator_params, "discriminator");
  g_opt_->import_state(bundle.optimizer_state, "generator.");
  d_opt_->import_state(bundle.optimizer_state, "discriminator.");
  step_ = bundle.step;
}

fs::path checkpoint_path(const fs::path& dir, std::int64_t step) {
  char name[64];
  std::snprintf(name, sizeof name, "checkpoint_%08lld.isbc", static_cast<long long>(step));
  return dir / name;
}

std::vector<TrainingSample> training_patches(const std::vector<const TrainingSample*>& batch, int size, int scale,
                                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TrainingSample> out;
  for (const auto* s : batch) {
    TrainingSample p = *s;
    const int h = s->window.target_lr.height(), w = s->window.target_lr.width();
    const int ph = std::min(size, h), pw = std::min(size, w);
    const int top = static_cast<int>(rng.below(static_cast<std::uint64_t>(h - ph + 1)));
    const int left = static_cast<int>(rng.below(static_cast<std::uint64_t>(w - pw + 1)));
    p.window = crop_window(s->window, top, left, ph, pw, scale);
    out.push_back(std::move(p));
  }
  return out;
}

CheckpointBundle fit(Trainer& trainer, const std::vector<TrainingSample>& dataset, const FitOptions& options) {
  if (dataset.empty()) fail(ErrorCode::EmptyCorpus, "training split has no windows");
  const TrainConfig& cfg = trainer.config();
  auto save = [&](const fs::path& path) {
    if (!options.checkpoint_dir.empty()) save_checkpoint(trainer.checkpoint(), path);
  };
  while (trainer.step() < cfg.max_steps) {
    std::vector<const TrainingSample*> batch;
    for (std::size_t i : trainer.batch_indices(trainer.step(), dataset.size())) batch.push_back(&dataset[i]);
    std::vector<TrainingSample> patches;
    if (cfg.patch_size > 0) {
      patches = training_patches(batch, cfg.patch_size, trainer.generator().config().scale,
                                 mix_seed(cfg.seed, kPatchStream + static_cast<std::uint64_t>(trainer.step())));
      batch.clear();
      for (const auto& s : patches) batch.push_back(&s);
    }
    const StepRecord record = trainer.train_step(batch);
    if (options.log) {
      *options.log << nlohmann::json(record).dump() << '\n';
      options.log->flush();
    }
    if (options.on_step) options.on_step(record);
    if (cfg.checkpoint_every > 0 && record.step % cfg.checkpoint_every == 0) {
      save(checkpoint_path(options.checkpoint_dir, record.step));
    }
  }
  save(options.checkpoint_dir / "latest.isbc");
  return trainer.checkpoint();
}

}  // namespace isb
