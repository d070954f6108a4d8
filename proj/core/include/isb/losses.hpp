#pragma once

#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isb/autograd.hpp"
#include "isb/feature_extractor.hpp"

namespace isb {

struct LossWeights {
  double alpha = 1.0;    // MSE (and the L1 baseline)
  double beta = 6e-3;    // perceptual
  double gamma = 1e-3;   // adversarial
  double delta = 2e-8;   // total variation

  void validate() const;
  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

void to_json(nlohmann::json& j, const LossWeights& w);
void from_json(const nlohmann::json& j, LossWeights& w);

/// Which generator loss terms are switched on. The L1 term only exists for the
/// L1 baseline configuration and shares alpha with MSE.
struct ActiveLosses {
  bool l1 = false;
  bool mse = true;
  bool perceptual = true;
  bool adversarial = true;
  bool tv = true;

  static ActiveLosses all() { return {}; }
};

/// Per-frame (or frame-averaged) loss values. Inactive terms are exactly 0 and
/// total = alpha * (mse + l1) + beta * perceptual + gamma * adversarial + delta * tv.
struct LossBreakdown {
  double mse = 0.0;
  double l1 = 0.0;
  double perceptual = 0.0;
  double adversarial = 0.0;
  double tv = 0.0;
  double total = 0.0;

  friend bool operator==(const LossBreakdown&, const LossBreakdown&) = default;
};

void to_json(nlohmann::json& j, const LossBreakdown& b);

/// Fills in total from the components.
LossBreakdown compose(LossBreakdown components, const LossWeights& weights);

// Mean over H*W*C of squared differences.
nn::Var mse_loss(const nn::Var& sr, const nn::Var& hr);
double mse_loss(const nn::Tensor& sr, const nn::Tensor& hr);
nn::Var l1_loss(const nn::Var& sr, const nn::Var& hr);
// MSE between extractor features of sr and hr.
nn::Var perceptual_loss(const nn::Var& sr, const nn::Var& hr, const FeatureExtractor& fx);
double perceptual_loss(const nn::Tensor& sr, const nn::Tensor& hr, const FeatureExtractor& fx);
// -log(p), p already clamped to [eps, 1 - eps].
nn::Var adversarial_loss(const nn::Var& d_prob);
double adversarial_loss(double d_prob);
nn::Var tv_loss(const nn::Var& sr);
double tv_loss(const nn::Tensor& sr);
// 1 - D(HR) + D(SR)
nn::Var discriminator_loss(const nn::Var& d_hr, const nn::Var& d_sr);
double discriminator_loss(double d_hr, double d_sr);
double sequence_loss(std::span<const double> per_frame);
LossBreakdown sequence_loss(std::span<const LossBreakdown> per_frame);

struct GeneratorLoss {
  LossBreakdown breakdown;
  nn::Var total;
};

/// Weighted generator objective for one frame. d_prob may be undefined when
/// the adversarial term is off.
GeneratorLoss generator_loss(const nn::Var& sr, const nn::Var& hr, const nn::Var& d_prob, const FeatureExtractor& fx,
                             const LossWeights& weights, const ActiveLosses& active = ActiveLosses::all());

LossBreakdown generator_loss(const nn::Tensor& sr, const nn::Tensor& hr, double d_prob, const FeatureExtractor& fx,
                             const LossWeights& weights);

}  // namespace isb
