#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isb/data_pipeline.hpp"
#include "isb/optical_flow.hpp"

namespace isb {

/// Prepared corpus on disk:
///   <root>/hr/<clip_id>/%06d.png     cropped ground truth
///   <root>/lr/<clip_id>/%06d.png     bicubic 1/scale
///   <root>/flows/<clip_id>/...       FlowStore entries over the LR frames
///   <root>/split.json
/// A non-empty `flows` points the flow store elsewhere, e.g. at externally
/// computed FLO1 files.
struct CorpusLayout {
  std::filesystem::path root;
  std::filesystem::path flows;

  std::filesystem::path hr_dir(const std::string& clip_id) const { return root / "hr" / clip_id; }
  std::filesystem::path lr_dir(const std::string& clip_id) const { return root / "lr" / clip_id; }
  std::filesystem::path flow_root() const { return flows.empty() ? root / "flows" : flows; }
  std::filesystem::path split_path() const { return root / "split.json"; }
};

struct PrepareOptions {
  int scale = 4;
  int n_neighbors = 6;
  FlowParams flow;
  SplitRatios ratios;
  std::uint64_t seed = 0;
  int threads = 0;
  ExtractOptions extract;
};

struct PrepareReport {
  int clips = 0;
  int frames = 0;
  int frames_written = 0;
  int flows = 0;
  int flows_written = 0;
  bool split_written = false;
};

void to_json(nlohmann::json& j, const PrepareReport& r);

/// Every sub-directory of data_root (frames) or video file in it becomes one
/// clip named after its stem. Idempotent: a second run writes nothing.
PrepareReport prepare_corpus(const std::filesystem::path& data_root, const CorpusLayout& out,
                             const PrepareOptions& options);

/// One training window and where it came from.
struct TrainingSample {
  std::string clip_id;
  int t = 0;
  ClipWindow window;
};

/// All windows of the listed clips, flows read from the corpus store.
std::vector<TrainingSample> load_samples(const CorpusLayout& corpus, const std::vector<std::string>& clip_ids, int n,
                                         int scale = 4);

/// All windows of an in-memory LR/HR clip pair, flows computed on the fly.
std::vector<TrainingSample> make_samples(const Clip& lr_clip, const Clip* hr_clip, int n, const FlowParams& params,
                                         int scale = 4);

}  // namespace isb
