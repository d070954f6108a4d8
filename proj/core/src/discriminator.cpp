#include "isb/discriminator.hpp"

#include <nlohmann/json.hpp>

#include "isb/error.hpp"

namespace isb {

DiscriminatorConfig DiscriminatorConfig::tiny() {
  DiscriminatorConfig c;
  c.channel_schedule = {8, 16};
  c.head_width = 16;
  return c;
}

void DiscriminatorConfig::validate() const {
  if (channel_schedule.empty()) fail(ErrorCode::InvalidConfig, "discriminator channel schedule is empty");
  for (int c : channel_schedule)
    if (c < 1) fail(ErrorCode::InvalidConfig, "discriminator channel widths must be positive");
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) fail(ErrorCode::InvalidConfig, "leaky slope must lie in (0, 1)");
  if (head_width < 1) fail(ErrorCode::InvalidConfig, "head width must be positive");
  if (!adaptive_pool && (input_height < 1 || input_width < 1)) {
    fail(ErrorCode::InvalidConfig, "fixed-size discriminator needs input_height/input_width");
  }
}

std::size_t DiscriminatorConfig::parameter_count() const {
  std::size_t n = 0;
  std::size_t in = 3;
  for (int c : channel_schedule) {
    n += nn::conv_params(in, static_cast<std::size_t>(c), 3);
    in = static_cast<std::size_t>(c);
  }
  const auto head = static_cast<std::size_t>(head_width);
  return n + in * head + head + head + 1;
}

void to_json(nlohmann::json& j, const DiscriminatorConfig& c) {
  j = nlohmann::json{{"input_height", c.input_height}, {"input_width", c.input_width},
                     {"channel_schedule", c.channel_schedule}, {"leaky_slope", c.leaky_slope},
                     {"head_width", c.head_width}, {"adaptive_pool", c.adaptive_pool}};
}

void from_json(const nlohmann::json& j, DiscriminatorConfig& c) {
  j.at("input_height").get_to(c.input_height);
  j.at("input_width").get_to(c.input_width);
  j.at("channel_schedule").get_to(c.channel_schedule);
  j.at("leaky_slope").get_to(c.leaky_slope);
  j.at("head_width").get_to(c.head_width);
  j.at("adaptive_pool").get_to(c.adaptive_pool);
}

Discriminator::Discriminator(const DiscriminatorConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng(seed);
  int in = 3;
  for (std::size_t i = 0; i < config_.channel_schedule.size(); ++i) {
    const int out = config_.channel_schedule[i];
    stages_.emplace_back("d.stage" + std::to_string(i), in, out, 3, i % 2 == 1 ? 2 : 1, 1, rng);
    in = out;
  }
  hidden_ = nn::Linear("d.hidden", in, config_.head_width, rng);
  output_ = nn::Linear("d.output", config_.head_width, 1, rng);
}

nn::Var Discriminator::logit(const nn::Var& image) const {
  const auto& shape = image.shape();
  if (shape.size() != 3 || shape[0] != 3) fail(ErrorCode::DimensionMismatch, "discriminator input " + nn::shape_string(shape));
  if (!config_.adaptive_pool && (static_cast<int>(shape[1]) != config_.input_height ||
                                 static_cast<int>(shape[2]) != config_.input_width)) {
    fail(ErrorCode::DimensionMismatch, "discriminator expects " + std::to_string(config_.input_width) + "x" +
                                           std::to_string(config_.input_height) + " input, got " + nn::shape_string(shape));
  }
  nn::Var x = image;
  for (const auto& stage : stages_) x = nn::ops::leaky_relu(stage(x), config_.leaky_slope);
  x = nn::ops::global_avg_pool(x);
  x = nn::ops::leaky_relu(hidden_(x), config_.leaky_slope);
  return output_(x);
}

nn::Var Discriminator::probability(const nn::Var& image) const {
  return nn::ops::clamp(nn::ops::sigmoid(logit(image)), kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
}

double Discriminator::discriminate(const Frame& frame) const {
  nn::NoGradGuard no_grad;
  return probability(nn::constant(frame.to_tensor())).item();
}

nn::ParameterList Discriminator::parameters() const {
  nn::ParameterList out;
  for (const auto& s : stages_) s.collect(out);
  hidden_.collect(out);
  output_.collect(out);
  return out;
}

}  // namespace isb
