#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isb/frame.hpp"
#include "isb/layers.hpp"

namespace isb {

inline constexpr double kProbabilityEpsilon = 1e-7;

struct DiscriminatorConfig {
  // Expected HR input size; only enforced when adaptive_pool is off.
  int input_height = 0;
  int input_width = 0;
  std::vector<int> channel_schedule{64, 64, 128, 128, 256, 256, 512, 512};
  double leaky_slope = 0.2;
  int head_width = 1024;
  bool adaptive_pool = true;

  static DiscriminatorConfig full() { return {}; }
  static DiscriminatorConfig tiny();

  void validate() const;
  std::size_t parameter_count() const;

  friend bool operator==(const DiscriminatorConfig&, const DiscriminatorConfig&) = default;
};

void to_json(nlohmann::json& j, const DiscriminatorConfig& c);
void from_json(const nlohmann::json& j, DiscriminatorConfig& c);

/// Conv stages (3x3, stride 2 on every odd stage) with Leaky ReLU, global
/// average pooling, a dense Leaky ReLU layer, and a sigmoid output clamped to
/// [eps, 1 - eps].
class Discriminator {
 public:
  Discriminator(const DiscriminatorConfig& config, std::uint64_t seed);

  const DiscriminatorConfig& config() const noexcept { return config_; }

  nn::Var logit(const nn::Var& image) const;
  nn::Var probability(const nn::Var& image) const;
  double discriminate(const Frame& frame) const;

  nn::ParameterList parameters() const;

 private:
  DiscriminatorConfig config_;
  std::vector<nn::Conv2d> stages_;
  nn::Linear hidden_;
  nn::Linear output_;
};

}  // namespace isb
