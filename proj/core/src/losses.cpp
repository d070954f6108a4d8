#include "isb/losses.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "isb/error.hpp"

namespace isb {

namespace ops = nn::ops;

void LossWeights::validate() const {
  for (double w : {alpha, beta, gamma, delta}) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::InvalidConfig, "loss weights must be finite and non-negative");
  }
}

void to_json(nlohmann::json& j, const LossWeights& w) {
  j = nlohmann::json{{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}, {"delta", w.delta}};
}

void from_json(const nlohmann::json& j, LossWeights& w) {
  LossWeights d;
  d.alpha = j.value("alpha", d.alpha);
  d.beta = j.value("beta", d.beta);
  d.gamma = j.value("gamma", d.gamma);
  d.delta = j.value("delta", d.delta);
  w = d;
}

void to_json(nlohmann::json& j, const LossBreakdown& b) {
  j = nlohmann::json{{"mse", b.mse},
                     {"l1", b.l1},
                     {"perceptual", b.perceptual},
                     {"adversarial", b.adversarial},
                     {"tv", b.tv},
                     {"total", b.total}};
}

LossBreakdown compose(LossBreakdown c, const LossWeights& w) {
  c.total = w.alpha * (c.mse + c.l1) + w.beta * c.perceptual + w.gamma * c.adversarial + w.delta * c.tv;
  return c;
}

nn::Var mse_loss(const nn::Var& sr, const nn::Var& hr) { return ops::mean_squared_diff(sr, hr); }

double mse_loss(const nn::Tensor& sr, const nn::Tensor& hr) {
  nn::NoGradGuard guard;
  return mse_loss(nn::constant(sr), nn::constant(hr)).item();
}

nn::Var l1_loss(const nn::Var& sr, const nn::Var& hr) { return ops::mean_abs_diff(sr, hr); }

nn::Var perceptual_loss(const nn::Var& sr, const nn::Var& hr, const FeatureExtractor& fx) {
  if (sr.shape() != hr.shape()) {
    fail(ErrorCode::DimensionMismatch, "perceptual loss on " + nn::shape_string(sr.shape()) + " vs " + nn::shape_string(hr.shape()));
  }
  return ops::mean_squared_diff(fx(sr), fx(detach(hr)));
}

double perceptual_loss(const nn::Tensor& sr, const nn::Tensor& hr, const FeatureExtractor& fx) {
  nn::NoGradGuard guard;
  return perceptual_loss(nn::constant(sr), nn::constant(hr), fx).item();
}

nn::Var adversarial_loss(const nn::Var& d_prob) { return ops::neg_log(d_prob); }

double adversarial_loss(double d_prob) { return -std::log(d_prob); }

nn::Var tv_loss(const nn::Var& sr) { return ops::total_variation(sr); }

double tv_loss(const nn::Tensor& sr) {
  nn::NoGradGuard guard;
  return tv_loss(nn::constant(sr)).item();
}

nn::Var discriminator_loss(const nn::Var& d_hr, const nn::Var& d_sr) { return ops::affine(ops::sub(d_sr, d_hr), 1.0, 1.0); }

double discriminator_loss(double d_hr, double d_sr) { return 1.0 - d_hr + d_sr; }

double sequence_loss(std::span<const double> per_frame) {
  if (per_frame.empty()) fail(ErrorCode::EmptySequence, "sequence loss over zero frames");
  double sum = 0.0;
  for (double v : per_frame) sum += v;
  return sum / static_cast<double>(per_frame.size());
}

LossBreakdown sequence_loss(std::span<const LossBreakdown> per_frame) {
  if (per_frame.empty()) fail(ErrorCode::EmptySequence, "sequence loss over zero frames");
  LossBreakdown m;
  for (const auto& b : per_frame) {
    m.mse += b.mse;
    m.l1 += b.l1;
    m.perceptual += b.perceptual;
    m.adversarial += b.adversarial;
    m.tv += b.tv;
    m.total += b.total;
  }
  const double n = static_cast<double>(per_frame.size());
  m.mse /= n;
  m.l1 /= n;
  m.perceptual /= n;
  m.adversarial /= n;
  m.tv /= n;
  m.total /= n;
  return m;
}

GeneratorLoss generator_loss(const nn::Var& sr, const nn::Var& hr, const nn::Var& d_prob, const FeatureExtractor& fx,
                             const LossWeights& weights, const ActiveLosses& active) {
  if (sr.shape() != hr.shape()) {
    fail(ErrorCode::DimensionMismatch, "generator loss on " + nn::shape_string(sr.shape()) + " vs " + nn::shape_string(hr.shape()));
  }
  std::vector<nn::Var> terms;
  std::vector<double> coeffs;
  LossBreakdown b;
  auto add = [&](nn::Var v, double coeff, double& slot) {
    slot = v.item();
    terms.push_back(std::move(v));
    coeffs.push_back(coeff);
  };
  if (active.mse) add(mse_loss(sr, hr), weights.alpha, b.mse);
  if (active.l1) add(l1_loss(sr, hr), weights.alpha, b.l1);
  if (active.perceptual) add(perceptual_loss(sr, hr, fx), weights.beta, b.perceptual);
  if (active.adversarial) {
    if (!d_prob.defined()) fail(ErrorCode::InvalidConfig, "adversarial term needs a discriminator probability");
    add(adversarial_loss(d_prob), weights.gamma, b.adversarial);
  }
  if (active.tv) add(tv_loss(sr), weights.delta, b.tv);
  b = compose(b, weights);
  if (terms.empty()) return {b, nn::constant(nn::Tensor::scalar(0.0))};
  return {b, ops::weighted_sum(terms, coeffs)};
}

LossBreakdown generator_loss(const nn::Tensor& sr, const nn::Tensor& hr, double d_prob, const FeatureExtractor& fx,
                             const LossWeights& weights) {
  LossBreakdown b;
  b.mse = mse_loss(sr, hr);
  b.perceptual = perceptual_loss(sr, hr, fx);
  b.adversarial = adversarial_loss(d_prob);
  b.tv = tv_loss(sr);
  return compose(b, weights);
}

}  // namespace isb
