#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "isb/discriminator.hpp"
#include "isb/feature_extractor.hpp"
#include "isb/generator.hpp"
#include "isb/metrics.hpp"
#include "isb/optical_flow.hpp"
#include "isb/trainer.hpp"

namespace isb {

/// Everything a run depends on. Serialized as a single JSON object with flat
/// dotted keys ("train.learning_rate", "generator.n_neighbors", ...).
struct RunConfig {
  std::string profile = "tiny";
  GeneratorConfig generator = GeneratorConfig::tiny();
  DiscriminatorConfig discriminator = DiscriminatorConfig::tiny();
  FeatureExtractorConfig features = FeatureExtractorConfig::tiny();
  TrainConfig train;
  FlowParams flow;
  MetricOptions metrics;
  std::string data_root;
  std::string corpus_root;
  std::string flow_root;  // empty: <corpus_root>/flows
  std::string checkpoint_dir;
  std::string out_dir;

  /// "tiny" (small networks for desk-scale runs) or "full" (64-channel
  /// generator, VGG-19-layout perceptual features, full discriminator).
  static RunConfig for_profile(const std::string& profile);

  void validate() const;
};

nlohmann::json to_nested_json(const RunConfig& c);
nlohmann::json to_flat_json(const RunConfig& c);

/// Applies flat dotted overrides on top of base. A "profile" key, if present,
/// first resets base to that profile. InvalidConfig on unknown keys or bad values.
RunConfig apply_overrides(RunConfig base, const nlohmann::json& flat);

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

nlohmann::json flatten_dotted(const nlohmann::json& nested);
nlohmann::json unflatten_dotted(const nlohmann::json& flat);

void to_json(nlohmann::json& j, const FlowParams& p);
void from_json(const nlohmann::json& j, FlowParams& p);
void to_json(nlohmann::json& j, const MetricOptions& m);
void from_json(const nlohmann::json& j, MetricOptions& m);

}  // namespace isb
