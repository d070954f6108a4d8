#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isb/autograd.hpp"

namespace isb {

/// Frozen convolutional feature network for the perceptual loss, laid out
/// like VGG: blocks of 3x3 conv + ReLU separated by 2x2 max pools. The
/// selector (pool_index, conv_index) picks the conv_index-th activation before
/// the pool_index-th pool (both 1-based).
struct FeatureExtractorConfig {
  enum class Kind { Identity, Convolutional };

  Kind kind = Kind::Convolutional;
  std::vector<int> block_convs{2, 2, 4, 4, 4};
  std::vector<int> block_channels{64, 128, 256, 512, 512};
  int pool_index = 5;
  int conv_index = 4;
  std::uint64_t seed = 0x5EED;
  std::string weights_path;  // optional pretrained weights (ISBW file)

  static FeatureExtractorConfig vgg19_layout() { return {}; }
  static FeatureExtractorConfig tiny();
  static FeatureExtractorConfig identity();

  void validate() const;

  friend bool operator==(const FeatureExtractorConfig&, const FeatureExtractorConfig&) = default;
};

void to_json(nlohmann::json& j, const FeatureExtractorConfig& c);
void from_json(const nlohmann::json& j, FeatureExtractorConfig& c);

class FeatureExtractor {
 public:
  explicit FeatureExtractor(const FeatureExtractorConfig& config);

  const FeatureExtractorConfig& config() const noexcept { return config_; }
  nn::Var operator()(const nn::Var& image) const;

  // Replaces the seeded weights by the arrays named in an ISBW file.
  void load_weights(const std::filesystem::path& path);
  void save_weights(const std::filesystem::path& path) const;
  const std::map<std::string, nn::Tensor>& weights() const noexcept { return weights_; }

 private:
  FeatureExtractorConfig config_;
  std::map<std::string, nn::Tensor> weights_;
};

}  // namespace isb
