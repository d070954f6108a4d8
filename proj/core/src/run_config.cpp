#include "isb/run_config.hpp"

#include <fstream>

#include "isb/error.hpp"

namespace isb {
namespace {

void flatten_into(const nlohmann::json& node, const std::string& prefix, nlohmann::json& out) {
  if (node.is_object() && !node.empty()) {
    for (const auto& [key, value] : node.items()) flatten_into(value, prefix.empty() ? key : prefix + "." + key, out);
  } else {
    out[prefix] = node;
  }
}

}  // namespace

void to_json(nlohmann::json& j, const FlowParams& p) {
  j = nlohmann::json{{"levels", p.levels}, {"min_level_size", p.min_level_size}, {"warps", p.warps},
                     {"iterations", p.iterations}, {"alpha", p.alpha}};
}

void from_json(const nlohmann::json& j, FlowParams& p) {
  FlowParams d;
  d.levels = j.value("levels", d.levels);
  d.min_level_size = j.value("min_level_size", d.min_level_size);
  d.warps = j.value("warps", d.warps);
  d.iterations = j.value("iterations", d.iterations);
  d.alpha = j.value("alpha", d.alpha);
  p = d;
}

void to_json(nlohmann::json& j, const MetricOptions& m) {
  j = nlohmann::json{{"colorspace", to_string(m.colorspace)}, {"crop_border", m.crop_border}};
}

void from_json(const nlohmann::json& j, MetricOptions& m) {
  MetricOptions d;
  if (j.contains("colorspace")) d.colorspace = parse_colorspace(j.at("colorspace").get<std::string>());
  d.crop_border = j.value("crop_border", d.crop_border);
  m = d;
}

RunConfig RunConfig::for_profile(const std::string& profile) {
  RunConfig c;
  c.profile = profile;
  if (profile == "tiny") return c;
  if (profile == "full") {
    c.generator = GeneratorConfig::full();
    c.discriminator = DiscriminatorConfig::full();
    c.features = FeatureExtractorConfig::vgg19_layout();
    return c;
  }
  fail(ErrorCode::InvalidConfig, "unknown profile '" + profile + "' (expected tiny or full)");
}

void RunConfig::validate() const {
  generator.validate();
  discriminator.validate();
  features.validate();
  train.validate();
  if (flow.levels < 1 || flow.warps < 1 || flow.iterations < 1 || !(flow.alpha > 0.0)) {
    fail(ErrorCode::InvalidConfig, "flow levels, warps, and iterations must be positive and alpha > 0");
  }
  if (metrics.crop_border < 0) fail(ErrorCode::InvalidConfig, "metrics.crop_border must be non-negative");
}

nlohmann::json flatten_dotted(const nlohmann::json& nested) {
  nlohmann::json out = nlohmann::json::object();
  flatten_into(nested, "", out);
  return out;
}

nlohmann::json unflatten_dotted(const nlohmann::json& flat) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, value] : flat.items()) {
    nlohmann::json* node = &out;
    std::size_t start = 0;
    for (std::size_t dot = key.find('.'); dot != std::string::npos; dot = key.find('.', start)) {
      node = &(*node)[key.substr(start, dot - start)];
      start = dot + 1;
    }
    (*node)[key.substr(start)] = value;
  }
  return out;
}

nlohmann::json to_nested_json(const RunConfig& c) {
  return nlohmann::json{{"profile", c.profile},
                        {"generator", c.generator},
                        {"discriminator", c.discriminator},
                        {"features", c.features},
                        {"train", c.train},
                        {"flow", c.flow},
                        {"metrics", c.metrics},
                        {"paths",
                         {{"data_root", c.data_root},
                          {"corpus_root", c.corpus_root},
                          {"flow_root", c.flow_root},
                          {"checkpoint_dir", c.checkpoint_dir},
                          {"out_dir", c.out_dir}}}};
}

nlohmann::json to_flat_json(const RunConfig& c) { return flatten_dotted(to_nested_json(c)); }

RunConfig apply_overrides(RunConfig base, const nlohmann::json& flat) {
  if (!flat.is_object()) fail(ErrorCode::InvalidConfig, "run config must be a JSON object of dotted keys");
  if (flat.contains("profile")) {
    const RunConfig fresh = RunConfig::for_profile(flat.at("profile").get<std::string>());
    base.profile = fresh.profile;
    base.generator = fresh.generator;
    base.discriminator = fresh.discriminator;
    base.features = fresh.features;
  }
  nlohmann::json merged = to_flat_json(base);
  for (const auto& [key, value] : flat.items()) {
    if (!merged.contains(key)) fail(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    merged[key] = value;
  }
  const nlohmann::json nested = unflatten_dotted(merged);
  RunConfig out;
  try {
    out.profile = nested.at("profile").get<std::string>();
    out.generator = nested.at("generator").get<GeneratorConfig>();
    out.discriminator = nested.at("discriminator").get<DiscriminatorConfig>();
    out.features = nested.at("features").get<FeatureExtractorConfig>();
    out.train = nested.at("train").get<TrainConfig>();
    out.flow = nested.at("flow").get<FlowParams>();
    out.metrics = nested.at("metrics").get<MetricOptions>();
    const auto& paths = nested.at("paths");
    out.data_root = paths.at("data_root").get<std::string>();
    out.corpus_root = paths.at("corpus_root").get<std::string>();
    out.flow_root = paths.at("flow_root").get<std::string>();
    out.checkpoint_dir = paths.at("checkpoint_dir").get<std::string>();
    out.out_dir = paths.at("out_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("bad config value: ") + e.what());
  }
  out.validate();
  return out;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::UnreadableSource, "cannot read config " + path.string());
  nlohmann::json flat;
  try {
    flat = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  // Nested sections are accepted too and read as their dotted equivalents.
  return apply_overrides(std::move(base), flatten_dotted(flat));
}

}  // namespace isb
