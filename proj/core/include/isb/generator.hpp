#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isb/data_pipeline.hpp"
#include "isb/layers.hpp"

namespace isb {

struct GeneratorConfig {
  int scale = 4;
  int n_neighbors = 6;
  int feat_channels = 64;
  int base_channels = 64;
  int sisr_kernel = 8;
  int sisr_stride = 4;
  int sisr_pad = 2;
  int misr_tiles = 3;
  int misr_blocks_per_tile = 5;

  static GeneratorConfig full() { return {}; }
  // 4/4 channels and two neighbors; the profile used by tests and toy runs.
  static GeneratorConfig tiny();

  void validate() const;
  /// Closed-form trainable scalar count; matches parameters() exactly.
  std::size_t parameter_count() const;

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

void to_json(nlohmann::json& j, const GeneratorConfig& c);
void from_json(const nlohmann::json& j, GeneratorConfig& c);

/// HR feature maps appended by each projection step, plus the LR-scale state
/// the decoder hands to the next step's SISR path.
struct HiddenState {
  std::vector<nn::Var> hr_features;
  nn::Var lr_state;
};

/// Recurrent back-projection generator.
///
/// For a window with target LR_t and neighbors LR_{t-1}..LR_{t-n}:
///   feat_t = PReLU(conv3x3(LR_t))
///   state  = feat_t
///   for k in 1..n:
///     s = SISR(state)                        up/down/up, 8x8 kernels, stride 4
///     m = MISR(feat_t, feat(LR_{t-k}), F_{t-k})   residual tower then 4x up
///     h = s + Up(Res(Down(s - m)))           back-projected residual
///     state = PReLU(Down(h))                 carried to step k+1
///     H.append(h)
///   SR_t = conv3x3(concat(H))
/// Modules are shared across steps.
class Generator {
 public:
  Generator(const GeneratorConfig& config, std::uint64_t seed);

  const GeneratorConfig& config() const noexcept { return config_; }

  nn::Var extract_features(const nn::Var& lr) const;
  nn::Var sisr_path(const nn::Var& features) const;
  nn::Var misr_path(const nn::Var& target_features, const nn::Var& neighbor_lr, const nn::Var& flow) const;
  HiddenState projection_step(HiddenState state, const nn::Var& sisr_out, const nn::Var& misr_out) const;

  /// Raw (unclamped) SR output of shape (3, 4H, 4W).
  nn::Var forward(const ClipWindow& window) const;
  /// forward() without recording a graph.
  Frame infer(const ClipWindow& window) const;

  nn::ParameterList parameters() const;

 private:
  GeneratorConfig config_;

  nn::Conv2d feat_conv_;
  nn::PReLU feat_act_;

  nn::ConvTranspose2d sisr_up1_;
  nn::PReLU sisr_act1_;
  nn::Conv2d sisr_down_;
  nn::PReLU sisr_act2_;
  nn::ConvTranspose2d sisr_up2_;
  nn::PReLU sisr_act3_;

  nn::Conv2d misr_head_;
  nn::PReLU misr_head_act_;
  std::vector<nn::ResidualBlock> misr_blocks_;
  nn::ConvTranspose2d misr_up_;
  nn::PReLU misr_up_act_;

  nn::Conv2d proj_down_;
  nn::PReLU proj_down_act_;
  nn::ResidualBlock proj_refine_;
  nn::ConvTranspose2d proj_up_;
  nn::PReLU proj_up_act_;
  nn::Conv2d proj_decoder_;
  nn::PReLU proj_decoder_act_;

  nn::Conv2d reconstruct_;
};

nn::Tensor flow_tensor(const FlowMap& flow);

}  // namespace isb
