#include "isb/corpus.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "isb/error.hpp"
#include "isb/flow_store.hpp"
#include "isb/image_io.hpp"

namespace fs = std::filesystem;

namespace isb {
namespace {

bool is_video(const fs::path& p) {
  static const std::vector<std::string> exts{".mp4", ".avi", ".mkv", ".mov", ".webm", ".y4m", ".m4v"};
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::find(exts.begin(), exts.end(), ext) != exts.end();
}

}  // namespace

void to_json(nlohmann::json& j, const PrepareReport& r) {
  j = nlohmann::json{{"clips", r.clips},
                     {"frames", r.frames},
                     {"frames_written", r.frames_written},
                     {"flows", r.flows},
                     {"flows_written", r.flows_written},
                     {"split_written", r.split_written}};
}

PrepareReport prepare_corpus(const fs::path& data_root, const CorpusLayout& layout, const PrepareOptions& options) {
  if (!fs::is_directory(data_root)) fail(ErrorCode::UnreadableSource, data_root.string() + " is not a readable directory");

  std::vector<fs::path> sources;
  for (const auto& entry : fs::directory_iterator(data_root)) {
    const std::string name = entry.path().filename().string();
    if (name.empty() || name[0] == '.') continue;
    if (entry.is_directory() || (entry.is_regular_file() && is_video(entry.path()))) sources.push_back(entry.path());
  }
  std::sort(sources.begin(), sources.end());
  if (sources.empty()) fail(ErrorCode::EmptyCorpus, data_root.string() + " holds no frame directories or videos");

  FlowStore store(layout.flow_root());
  PrepareReport report;
  std::vector<std::string> ids;
  for (const auto& source : sources) {
    Clip clip = extract_frames(source, {}, options.extract);
    Clip lr{{}, clip.clip_id, clip.source_path};
    fs::create_directories(layout.hr_dir(clip.clip_id));
    fs::create_directories(layout.lr_dir(clip.clip_id));
    for (int i = 0; i < clip.size(); ++i) {
      FramePair pair = make_pair(clip.frames[static_cast<std::size_t>(i)], options.scale);
      report.frames_written += write_png_if_changed(layout.hr_dir(clip.clip_id) / frame_file_name(i), pair.hr);
      report.frames_written += write_png_if_changed(layout.lr_dir(clip.clip_id) / frame_file_name(i), pair.lr);
      // Flows are estimated on exactly what training will read back.
      lr.frames.push_back(quantized8(pair.lr));
    }
    const PrecomputeResult flows = precompute_flows(lr, options.n_neighbors, options.flow, store, options.threads);
    report.flows += flows.entries;
    report.flows_written += flows.written;
    report.frames += clip.size();
    ids.push_back(clip.clip_id);
  }
  report.clips = static_cast<int>(ids.size());
  report.split_written = write_split_manifest(layout.split_path(), split_dataset(ids, options.ratios, options.seed));
  return report;
}

std::vector<TrainingSample> load_samples(const CorpusLayout& corpus, const std::vector<std::string>& clip_ids, int n,
                                         int scale) {
  const FlowStore store(corpus.flow_root());
  std::vector<TrainingSample> samples;
  for (const auto& id : clip_ids) {
    const Clip lr = load_clip(corpus.lr_dir(id), id);
    const Clip hr = load_clip(corpus.hr_dir(id), id);
    if (lr.size() != hr.size()) {
      fail(ErrorCode::InconsistentDimensions, "clip " + id + " has " + std::to_string(lr.size()) + " LR and " +
                                                  std::to_string(hr.size()) + " HR frames");
    }
    for (int t = 0; t < lr.size(); ++t) {
      samples.push_back({id, t, window_clip(lr, t, n, window_flows(store, lr, t, n), &hr, scale)});
    }
  }
  return samples;
}

std::vector<TrainingSample> make_samples(const Clip& lr_clip, const Clip* hr_clip, int n, const FlowParams& params,
                                         int scale) {
  std::vector<TrainingSample> samples;
  for (int t = 0; t < lr_clip.size(); ++t) {
    samples.push_back({lr_clip.clip_id, t, window_clip(lr_clip, t, n, compute_window_flows(lr_clip, t, n, params), hr_clip, scale)});
  }
  return samples;
}

}  // namespace isb
