#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isb/flow_map.hpp"
#include "isb/frame.hpp"

namespace isb {

/// Frames of one source in temporal order; all frames share dimensions.
struct Clip {
  std::vector<Frame> frames;
  std::string clip_id;
  std::string source_path;

  int size() const noexcept { return static_cast<int>(frames.size()); }
};

/// Generator input unit: the target LR frame, its n predecessors (most recent
/// first) with one flow map each, and the HR ground truth when known.
struct ClipWindow {
  Frame target_lr;
  std::vector<Frame> neighbors_lr;
  std::vector<FlowMap> flows;
  std::optional<Frame> target_hr;

  int n() const noexcept { return static_cast<int>(neighbors_lr.size()); }
  // Throws DimensionMismatch / BadIndex when an invariant does not hold.
  void validate(int scale) const;
};

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
  std::uint64_t seed = 0;

  friend bool operator==(const DatasetSplit&, const DatasetSplit&) = default;
};

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct Rational {
  int num = 1;
  int den = 1;
};

struct ExtractOptions {
  // External decoder used for video files; frames go through PNG.
  std::string decoder = "ffmpeg";
};

struct FramePair {
  Frame lr;
  Frame hr;
};

/// Loads a video (via the external decoder) or a directory of numbered PNGs.
/// When out_dir is non-empty the frames are written there as %06d.png.
Clip extract_frames(const std::filesystem::path& source, const std::filesystem::path& out_dir,
                    const ExtractOptions& options = {});

/// Keys cubic convolution (a = -0.5) on a half-pixel-centred grid. When
/// shrinking, the kernel is stretched by 1/scale so every input pixel under
/// the footprint contributes (antialiasing). Output is clamped to [0, 1].
Frame bicubic_resize(const Frame& frame, Rational scale);

/// Center-crops hr to a multiple of scale_factor and derives lr from it.
FramePair make_pair(const Frame& hr_frame, int scale_factor);

DatasetSplit split_dataset(const std::vector<std::string>& clip_ids, SplitRatios ratios, std::uint64_t seed);

/// Frame indices t-1 .. t-n, clamped to 0 (first frame repeated).
std::vector<int> neighbor_indices(int t, int n);

ClipWindow window_clip(const Clip& lr_clip, int t, int n, std::vector<FlowMap> flows,
                       const Clip* hr_clip = nullptr, int scale = 4);

/// The height x width LR patch at (top, left) of every frame and flow, with
/// the matching scale-times-larger HR patch.
ClipWindow crop_window(const ClipWindow& window, int top, int left, int height, int width, int scale);

// Corpus layout on disk: <root>/<clip_id>/%06d.png
std::string frame_file_name(int index);
Clip load_clip(const std::filesystem::path& dir, const std::string& clip_id);
void write_clip(const Clip& clip, const std::filesystem::path& dir);
// Returns false when the file already holds identical 8-bit content.
bool write_png_if_changed(const std::filesystem::path& path, const Frame& frame);

void to_json(nlohmann::json& j, const DatasetSplit& split);
void from_json(const nlohmann::json& j, DatasetSplit& split);
DatasetSplit read_split_manifest(const std::filesystem::path& path);
bool write_split_manifest(const std::filesystem::path& path, const DatasetSplit& split);

/// Procedural corpus of moving textured squares over a textured background.
/// Fully determined by the arguments.
std::vector<Clip> make_toy_corpus(int num_clips, int frames_per_clip = 7, int height = 32, int width = 32,
                                  std::uint64_t seed = 7);

}  // namespace isb
