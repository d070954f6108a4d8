#include "isb/feature_extractor.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "isb/checkpoint.hpp"
#include "isb/error.hpp"
#include "isb/random.hpp"

namespace isb {
namespace {

std::string conv_name(std::size_t block, int conv) {
  return "block" + std::to_string(block + 1) + ".conv" + std::to_string(conv + 1);
}

const char kWeightsMagic[] = "ISBW";

}  // namespace

FeatureExtractorConfig FeatureExtractorConfig::tiny() {
  FeatureExtractorConfig c;
  c.block_convs = {2, 2};
  c.block_channels = {8, 8};
  c.pool_index = 2;
  c.conv_index = 2;
  return c;
}

FeatureExtractorConfig FeatureExtractorConfig::identity() {
  FeatureExtractorConfig c;
  c.kind = Kind::Identity;
  c.block_convs.clear();
  c.block_channels.clear();
  c.pool_index = 0;
  c.conv_index = 0;
  return c;
}

void FeatureExtractorConfig::validate() const {
  if (kind == Kind::Identity) return;
  if (block_convs.empty() || block_convs.size() != block_channels.size()) {
    fail(ErrorCode::InvalidConfig, "feature extractor needs one channel width per block");
  }
  for (std::size_t b = 0; b < block_convs.size(); ++b) {
    if (block_convs[b] < 1 || block_channels[b] < 1) fail(ErrorCode::InvalidConfig, "feature extractor blocks must be non-empty");
  }
  if (pool_index < 1 || pool_index > static_cast<int>(block_convs.size())) {
    fail(ErrorCode::InvalidConfig, "layer selector pool index out of range");
  }
  if (conv_index < 1 || conv_index > block_convs[static_cast<std::size_t>(pool_index - 1)]) {
    fail(ErrorCode::InvalidConfig, "layer selector conv index out of range");
  }
}

void to_json(nlohmann::json& j, const FeatureExtractorConfig& c) {
  j = nlohmann::json{{"kind", c.kind == FeatureExtractorConfig::Kind::Identity ? "identity" : "convolutional"},
                     {"block_convs", c.block_convs},
                     {"block_channels", c.block_channels},
                     {"pool_index", c.pool_index},
                     {"conv_index", c.conv_index},
                     {"seed", c.seed},
                     {"weights_path", c.weights_path}};
}

void from_json(const nlohmann::json& j, FeatureExtractorConfig& c) {
  FeatureExtractorConfig d;
  const std::string kind = j.value("kind", std::string("convolutional"));
  if (kind == "identity") {
    d = FeatureExtractorConfig::identity();
  } else if (kind != "convolutional") {
    fail(ErrorCode::InvalidConfig, "unknown feature extractor kind '" + kind + "'");
  }
  d.block_convs = j.value("block_convs", d.block_convs);
  d.block_channels = j.value("block_channels", d.block_channels);
  d.pool_index = j.value("pool_index", d.pool_index);
  d.conv_index = j.value("conv_index", d.conv_index);
  d.seed = j.value("seed", d.seed);
  d.weights_path = j.value("weights_path", d.weights_path);
  c = std::move(d);
}

FeatureExtractor::FeatureExtractor(const FeatureExtractorConfig& config) : config_(config) {
  config_.validate();
  if (config_.kind == FeatureExtractorConfig::Kind::Identity) return;
  Rng rng(config_.seed);
  std::size_t in = 3;
  for (std::size_t b = 0; b < static_cast<std::size_t>(config_.pool_index); ++b) {
    const auto out = static_cast<std::size_t>(config_.block_channels[b]);
    for (int c = 0; c < config_.block_convs[b]; ++c) {
      const double bound = std::sqrt(6.0 / static_cast<double>(in * 9));
      nn::Tensor w({out, in, 3, 3});
      for (double& v : w.values()) v = rng.uniform(-bound, bound);
      weights_.emplace(conv_name(b, c) + ".weight", std::move(w));
      weights_.emplace(conv_name(b, c) + ".bias", nn::Tensor({out}));
      in = out;
    }
  }
  if (!config_.weights_path.empty()) load_weights(config_.weights_path);
}

nn::Var FeatureExtractor::operator()(const nn::Var& image) const {
  if (config_.kind == FeatureExtractorConfig::Kind::Identity) return image;
  nn::Var x = image;
  const auto last_block = static_cast<std::size_t>(config_.pool_index - 1);
  for (std::size_t b = 0; b <= last_block; ++b) {
    if (b > 0) x = nn::ops::max_pool2(x);
    const int convs = b == last_block ? config_.conv_index : config_.block_convs[b];
    for (int c = 0; c < convs; ++c) {
      const std::string name = conv_name(b, c);
      x = nn::ops::relu(nn::ops::conv2d(x, nn::constant(weights_.at(name + ".weight")),
                                        nn::constant(weights_.at(name + ".bias")), 1, 1));
    }
  }
  return x;
}

void FeatureExtractor::load_weights(const std::filesystem::path& path) {
  const std::string bytes = read_binary_file(path);
  if (bytes.size() < 4 || bytes.compare(0, 4, kWeightsMagic) != 0) {
    fail(ErrorCode::UnreadableSource, path.string() + " is not a feature-extractor weight file");
  }
  std::size_t at = 4;
  TensorMap loaded = parse_arrays(bytes, at);
  for (auto& [name, t] : weights_) {
    auto it = loaded.find(name);
    if (it == loaded.end()) fail(ErrorCode::ShapeMismatch, path.string() + " lacks " + name);
    if (it->second.shape() != t.shape()) {
      fail(ErrorCode::ShapeMismatch, name + " is " + nn::shape_string(it->second.shape()) + " in " + path.string() +
                                         ", expected " + nn::shape_string(t.shape()));
    }
  }
  for (auto& [name, t] : weights_) t = std::move(loaded.at(name));
}

void FeatureExtractor::save_weights(const std::filesystem::path& path) const {
  std::string bytes = kWeightsMagic;
  append_arrays(bytes, weights_);
  write_binary_file(path, bytes);
}

}  // namespace isb
