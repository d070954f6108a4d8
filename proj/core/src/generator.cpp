#include "isb/generator.hpp"

#include <nlohmann/json.hpp>

#include "isb/error.hpp"

namespace isb {

GeneratorConfig GeneratorConfig::tiny() {
  GeneratorConfig c;
  c.n_neighbors = 2;
  c.feat_channels = 4;
  c.base_channels = 4;
  return c;
}

void GeneratorConfig::validate() const {
  if (scale != 4 || sisr_stride != scale) fail(ErrorCode::InvalidConfig, "only 4x upscaling with stride 4 is supported");
  if (sisr_kernel - sisr_stride != 2 * sisr_pad) {
    fail(ErrorCode::InvalidConfig, "sisr kernel/stride/pad must satisfy k - s = 2p so up and down layers invert");
  }
  if (n_neighbors < 1) fail(ErrorCode::InvalidConfig, "n_neighbors must be >= 1");
  if (feat_channels < 1 || base_channels < 1 || misr_tiles < 1 || misr_blocks_per_tile < 1) {
    fail(ErrorCode::InvalidConfig, "channel and block counts must be >= 1");
  }
}

std::size_t GeneratorConfig::parameter_count() const {
  using nn::conv_params;
  using nn::prelu_params;
  using nn::residual_block_params;
  const std::size_t f = static_cast<std::size_t>(feat_channels), b = static_cast<std::size_t>(base_channels);
  const std::size_t k = static_cast<std::size_t>(sisr_kernel), n = static_cast<std::size_t>(n_neighbors);
  const std::size_t blocks = static_cast<std::size_t>(misr_tiles * misr_blocks_per_tile);
  const std::size_t features = conv_params(3, f, 3) + prelu_params();
  const std::size_t sisr = conv_params(f, b, k) + conv_params(b, b, k) + conv_params(b, b, k) + 3 * prelu_params();
  const std::size_t misr = conv_params(2 * f + 2, b, 3) + prelu_params() + blocks * residual_block_params(b) +
                           conv_params(b, b, k) + prelu_params();
  const std::size_t projection = conv_params(b, b, k) + prelu_params() + residual_block_params(b) + conv_params(b, b, k) +
                                 prelu_params() + conv_params(b, f, k) + prelu_params();
  const std::size_t reconstruct = conv_params(n * b, 3, 3);
  return features + sisr + misr + projection + reconstruct;
}

void to_json(nlohmann::json& j, const GeneratorConfig& c) {
  j = nlohmann::json{{"scale", c.scale},
                     {"n_neighbors", c.n_neighbors},
                     {"feat_channels", c.feat_channels},
                     {"base_channels", c.base_channels},
                     {"sisr_kernel", c.sisr_kernel},
                     {"sisr_stride", c.sisr_stride},
                     {"sisr_pad", c.sisr_pad},
                     {"misr_tiles", c.misr_tiles},
                     {"misr_blocks_per_tile", c.misr_blocks_per_tile}};
}

void from_json(const nlohmann::json& j, GeneratorConfig& c) {
  j.at("scale").get_to(c.scale);
  j.at("n_neighbors").get_to(c.n_neighbors);
  j.at("feat_channels").get_to(c.feat_channels);
  j.at("base_channels").get_to(c.base_channels);
  j.at("sisr_kernel").get_to(c.sisr_kernel);
  j.at("sisr_stride").get_to(c.sisr_stride);
  j.at("sisr_pad").get_to(c.sisr_pad);
  j.at("misr_tiles").get_to(c.misr_tiles);
  j.at("misr_blocks_per_tile").get_to(c.misr_blocks_per_tile);
}

nn::Tensor flow_tensor(const FlowMap& flow) {
  const auto h = static_cast<std::size_t>(flow.height), w = static_cast<std::size_t>(flow.width);
  nn::Tensor t({2, h, w});
  std::copy(flow.u.begin(), flow.u.end(), t.data());
  std::copy(flow.v.begin(), flow.v.end(), t.data() + h * w);
  return t;
}

Generator::Generator(const GeneratorConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng(seed);
  const int f = config_.feat_channels, b = config_.base_channels;
  const int k = config_.sisr_kernel, s = config_.sisr_stride, p = config_.sisr_pad;

  feat_conv_ = nn::Conv2d("g.feat.conv", 3, f, 3, 1, 1, rng);
  feat_act_ = nn::PReLU("g.feat.act");

  sisr_up1_ = nn::ConvTranspose2d("g.sisr.up1", f, b, k, s, p, rng);
  sisr_act1_ = nn::PReLU("g.sisr.act1");
  sisr_down_ = nn::Conv2d("g.sisr.down", b, b, k, s, p, rng);
  sisr_act2_ = nn::PReLU("g.sisr.act2");
  sisr_up2_ = nn::ConvTranspose2d("g.sisr.up2", b, b, k, s, p, rng);
  sisr_act3_ = nn::PReLU("g.sisr.act3");

  misr_head_ = nn::Conv2d("g.misr.head", 2 * f + 2, b, 3, 1, 1, rng);
  misr_head_act_ = nn::PReLU("g.misr.head_act");
  for (int tile = 0; tile < config_.misr_tiles; ++tile)
    for (int block = 0; block < config_.misr_blocks_per_tile; ++block)
      misr_blocks_.emplace_back("g.misr.tile" + std::to_string(tile) + ".block" + std::to_string(block), b, rng);
  misr_up_ = nn::ConvTranspose2d("g.misr.up", b, b, k, s, p, rng);
  misr_up_act_ = nn::PReLU("g.misr.up_act");

  proj_down_ = nn::Conv2d("g.proj.down", b, b, k, s, p, rng);
  proj_down_act_ = nn::PReLU("g.proj.down_act");
  proj_refine_ = nn::ResidualBlock("g.proj.refine", b, rng);
  proj_up_ = nn::ConvTranspose2d("g.proj.up", b, b, k, s, p, rng);
  proj_up_act_ = nn::PReLU("g.proj.up_act");
  proj_decoder_ = nn::Conv2d("g.proj.decoder", b, f, k, s, p, rng);
  proj_decoder_act_ = nn::PReLU("g.proj.decoder_act");

  reconstruct_ = nn::Conv2d("g.reconstruct", config_.n_neighbors * b, 3, 3, 1, 1, rng);
}

nn::Var Generator::extract_features(const nn::Var& lr) const { return feat_act_(feat_conv_(lr)); }

nn::Var Generator::sisr_path(const nn::Var& features) const {
  nn::Var up = sisr_act1_(sisr_up1_(features));
  nn::Var down = sisr_act2_(sisr_down_(up));
  return sisr_act3_(sisr_up2_(down));
}

nn::Var Generator::misr_path(const nn::Var& target_features, const nn::Var& neighbor_lr, const nn::Var& flow) const {
  const auto& t = target_features.shape();
  const auto& nb = neighbor_lr.shape();
  const auto& fl = flow.shape();
  if (nb.size() != 3 || fl.size() != 3 || nb[1] != t[1] || nb[2] != t[2] || fl[1] != t[1] || fl[2] != t[2] || fl[0] != 2) {
    fail(ErrorCode::DimensionMismatch, "misr inputs: target features " + nn::shape_string(t) + ", neighbor " +
                                           nn::shape_string(nb) + ", flow " + nn::shape_string(fl));
  }
  nn::Var x = misr_head_act_(misr_head_(nn::ops::concat_channels({target_features, extract_features(neighbor_lr), flow})));
  for (const auto& block : misr_blocks_) x = block(x);
  return misr_up_act_(misr_up_(x));
}

HiddenState Generator::projection_step(HiddenState state, const nn::Var& sisr_out, const nn::Var& misr_out) const {
  if (sisr_out.shape() != misr_out.shape()) {
    fail(ErrorCode::DimensionMismatch, "sisr " + nn::shape_string(sisr_out.shape()) + " vs misr " +
                                           nn::shape_string(misr_out.shape()));
  }
  // encoder: back-project the SISR/MISR disagreement
  nn::Var residual = nn::ops::sub(sisr_out, misr_out);
  nn::Var low = proj_refine_(proj_down_act_(proj_down_(residual)));
  nn::Var fused = nn::ops::add(sisr_out, proj_up_act_(proj_up_(low)));
  // decoder: LR-scale state for the next step
  state.lr_state = proj_decoder_act_(proj_decoder_(fused));
  state.hr_features.push_back(std::move(fused));
  return state;
}

nn::Var Generator::forward(const ClipWindow& window) const {
  if (window.n() != config_.n_neighbors) {
    fail(ErrorCode::ConfigMismatch, "window has " + std::to_string(window.n()) + " neighbors, generator expects " +
                                        std::to_string(config_.n_neighbors));
  }
  window.validate(config_.scale);

  const nn::Var target_features = extract_features(nn::constant(window.target_lr.to_tensor()));
  HiddenState state;
  state.lr_state = target_features;
  for (int k = 0; k < window.n(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    nn::Var s = sisr_path(state.lr_state);
    nn::Var m = misr_path(target_features, nn::constant(window.neighbors_lr[idx].to_tensor()),
                          nn::constant(flow_tensor(window.flows[idx])));
    state = projection_step(std::move(state), s, m);
  }
  return reconstruct_(nn::ops::concat_channels(state.hr_features));
}

Frame Generator::infer(const ClipWindow& window) const {
  nn::NoGradGuard no_grad;
  return Frame::from_tensor(forward(window).value());
}

nn::ParameterList Generator::parameters() const {
  nn::ParameterList out;
  feat_conv_.collect(out);
  feat_act_.collect(out);
  sisr_up1_.collect(out);
  sisr_act1_.collect(out);
  sisr_down_.collect(out);
  sisr_act2_.collect(out);
  sisr_up2_.collect(out);
  sisr_act3_.collect(out);
  misr_head_.collect(out);
  misr_head_act_.collect(out);
  for (const auto& block : misr_blocks_) block.collect(out);
  misr_up_.collect(out);
  misr_up_act_.collect(out);
  proj_down_.collect(out);
  proj_down_act_.collect(out);
  proj_refine_.collect(out);
  proj_up_.collect(out);
  proj_up_act_.collect(out);
  proj_decoder_.collect(out);
  proj_decoder_act_.collect(out);
  reconstruct_.collect(out);
  return out;
}

}  // namespace isb
