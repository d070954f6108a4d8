#include "isb/data_pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "isb/error.hpp"
#include "isb/image_io.hpp"
#include "isb/random.hpp"

namespace fs = std::filesystem;

namespace isb {
namespace {

bool is_png(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

// Sort key: trailing number in the stem when present ("im7" -> 7), else name.
struct FrameKey {
  bool numbered;
  unsigned long long number;
  std::string name;

  auto operator<=>(const FrameKey&) const = default;
};

FrameKey frame_key(const fs::path& p) {
  const std::string stem = p.stem().string();
  std::size_t end = stem.size();
  std::size_t begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  if (begin == end) return {false, 0, stem};
  return {true, std::stoull(stem.substr(begin, std::min<std::size_t>(end - begin, 18))), stem};
}

std::vector<fs::path> list_frames(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && is_png(entry.path())) files.push_back(entry.path());
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    // numbered frames first, in numeric order
    FrameKey ka = frame_key(a), kb = frame_key(b);
    if (ka.numbered != kb.numbered) return ka.numbered;
    return ka < kb;
  });
  return files;
}

Clip read_frames(const std::vector<fs::path>& files, const std::string& clip_id, const std::string& source) {
  Clip clip;
  clip.clip_id = clip_id;
  clip.source_path = source;
  for (const auto& f : files) {
    Frame frame = read_png(f);
    if (!clip.frames.empty() && !frame.same_dims(clip.frames.front())) {
      fail(ErrorCode::InconsistentDimensions,
           f.string() + " is " + std::to_string(frame.width()) + "x" + std::to_string(frame.height()) + ", expected " +
               std::to_string(clip.frames.front().width()) + "x" + std::to_string(clip.frames.front().height()));
    }
    clip.frames.push_back(std::move(frame));
  }
  return clip;
}

bool decoder_available(const std::string& decoder) {
  const std::string probe = "command -v '" + decoder + "' >/dev/null 2>&1";
  return std::system(probe.c_str()) == 0;
}

double keys_cubic(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

struct Taps {
  std::vector<int> index;
  std::vector<double> weight;
};

// Resampling taps along one axis from in_n samples to out_n samples.
std::vector<Taps> axis_taps(int in_n, int out_n, Rational scale) {
  const double s = static_cast<double>(scale.num) / scale.den;
  const double stretch = s < 1.0 ? s : 1.0;  // kernel compressed by s when shrinking
  const double support = 2.0 / stretch;
  std::vector<Taps> taps(static_cast<std::size_t>(out_n));
  for (int o = 0; o < out_n; ++o) {
    const double center = (o + 0.5) * scale.den / scale.num - 0.5;
    const int first = static_cast<int>(std::floor(center - support)) + 1;
    const int last = static_cast<int>(std::ceil(center + support)) - 1;
    Taps& t = taps[static_cast<std::size_t>(o)];
    double sum = 0.0;
    for (int i = first; i <= last; ++i) {
      const double w = keys_cubic((center - i) * stretch);
      if (w == 0.0) continue;
      t.index.push_back(std::clamp(i, 0, in_n - 1));
      t.weight.push_back(w);
      sum += w;
    }
    for (double& w : t.weight) w /= sum;
  }
  return taps;
}

}  // namespace

void ClipWindow::validate(int scale) const {
  if (neighbors_lr.empty()) fail(ErrorCode::BadIndex, "window has no neighbors");
  if (neighbors_lr.size() != flows.size()) {
    fail(ErrorCode::DimensionMismatch, std::to_string(neighbors_lr.size()) + " neighbors but " +
                                           std::to_string(flows.size()) + " flow maps");
  }
  for (const auto& f : neighbors_lr)
    if (!f.same_dims(target_lr)) fail(ErrorCode::DimensionMismatch, "neighbor frame differs from target LR dims");
  for (const auto& f : flows)
    if (f.height != target_lr.height() || f.width != target_lr.width())
      fail(ErrorCode::DimensionMismatch, "flow map differs from target LR dims");
  if (target_hr && (target_hr->height() != scale * target_lr.height() || target_hr->width() != scale * target_lr.width())) {
    fail(ErrorCode::DimensionMismatch, "target HR is not " + std::to_string(scale) + "x the LR frame");
  }
}

Clip extract_frames(const fs::path& source, const fs::path& out_dir, const ExtractOptions& options) {
  if (!fs::exists(source)) fail(ErrorCode::UnreadableSource, source.string() + " does not exist");

  Clip clip;
  const std::string clip_id = source.stem().string();
  if (fs::is_directory(source)) {
    auto files = list_frames(source);
    if (files.empty()) fail(ErrorCode::UnreadableSource, source.string() + " contains no PNG frames");
    clip = read_frames(files, clip_id, source.string());
  } else {
    if (!decoder_available(options.decoder)) {
      fail(ErrorCode::UnreadableSource, "cannot decode " + source.string() + ": decoder '" + options.decoder +
                                            "' not found; pass a directory of frames instead");
    }
    const fs::path scratch = fs::temp_directory_path() / ("isb_decode_" + std::to_string(std::hash<std::string>{}(
                                                                              fs::absolute(source).string())));
    fs::remove_all(scratch);
    fs::create_directories(scratch);
    const std::string cmd = "'" + options.decoder + "' -nostdin -loglevel error -i '" + source.string() + "' '" +
                            (scratch / "%06d.png").string() + "'";
    const int rc = std::system(cmd.c_str());
    auto files = rc == 0 ? list_frames(scratch) : std::vector<fs::path>{};
    if (files.empty()) {
      fs::remove_all(scratch);
      fail(ErrorCode::UnreadableSource, "decoder failed on " + source.string());
    }
    clip = read_frames(files, clip_id, source.string());
    fs::remove_all(scratch);
  }

  if (!out_dir.empty()) {
    std::error_code ec;
    const bool same = fs::exists(out_dir) && fs::equivalent(out_dir, source, ec);
    if (!same) write_clip(clip, out_dir);
  }
  return clip;
}

Frame bicubic_resize(const Frame& frame, Rational scale) {
  if (scale.num <= 0 || scale.den <= 0) fail(ErrorCode::DegenerateOutput, "scale must be positive");
  const int out_h = static_cast<int>(static_cast<long long>(frame.height()) * scale.num / scale.den);
  const int out_w = static_cast<int>(static_cast<long long>(frame.width()) * scale.num / scale.den);
  if (out_h < 1 || out_w < 1) {
    fail(ErrorCode::DegenerateOutput, "resizing " + std::to_string(frame.width()) + "x" + std::to_string(frame.height()) +
                                          " by " + std::to_string(scale.num) + "/" + std::to_string(scale.den) +
                                          " gives an empty frame");
  }
  const auto xtaps = axis_taps(frame.width(), out_w, scale);
  const auto ytaps = axis_taps(frame.height(), out_h, scale);

  Frame out(out_h, out_w, frame.channels());
  std::vector<double> rows(static_cast<std::size_t>(frame.height()) * out_w);
  for (int c = 0; c < frame.channels(); ++c) {
    auto in = frame.plane(c);
    for (int y = 0; y < frame.height(); ++y)
      for (int x = 0; x < out_w; ++x) {
        const Taps& t = xtaps[static_cast<std::size_t>(x)];
        double acc = 0.0;
        for (std::size_t i = 0; i < t.index.size(); ++i)
          acc += t.weight[i] * in[static_cast<std::size_t>(y) * frame.width() + t.index[i]];
        rows[static_cast<std::size_t>(y) * out_w + x] = acc;
      }
    for (int y = 0; y < out_h; ++y) {
      const Taps& t = ytaps[static_cast<std::size_t>(y)];
      for (int x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < t.index.size(); ++i) acc += t.weight[i] * rows[static_cast<std::size_t>(t.index[i]) * out_w + x];
        out.at(y, x, c) = std::clamp(acc, 0.0, 1.0);
      }
    }
  }
  return out;
}

ClipWindow crop_window(const ClipWindow& window, int top, int left, int height, int width, int scale) {
  const Frame& t = window.target_lr;
  if (height < 1 || width < 1 || top < 0 || left < 0 || top + height > t.height() || left + width > t.width()) {
    fail(ErrorCode::BadIndex, "patch " + std::to_string(height) + "x" + std::to_string(width) + " at (" +
                                  std::to_string(top) + "," + std::to_string(left) + ") is outside the " +
                                  std::to_string(t.height()) + "x" + std::to_string(t.width()) + " window");
  }
  ClipWindow out;
  out.target_lr = crop(t, top, left, height, width);
  for (const Frame& f : window.neighbors_lr) out.neighbors_lr.push_back(crop(f, top, left, height, width));
  for (const FlowMap& f : window.flows) {
    FlowMap c(height, width);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const auto src = static_cast<std::size_t>(top + y) * f.width + (left + x);
        c.u[static_cast<std::size_t>(y) * width + x] = f.u[src];
        c.v[static_cast<std::size_t>(y) * width + x] = f.v[src];
      }
    out.flows.push_back(std::move(c));
  }
  if (window.target_hr) out.target_hr = crop(*window.target_hr, top * scale, left * scale, height * scale, width * scale);
  return out;
}

FramePair make_pair(const Frame& hr_frame, int scale_factor) {
  if (scale_factor < 1) fail(ErrorCode::DegenerateOutput, "scale factor must be >= 1");
  const int h = hr_frame.height() / scale_factor * scale_factor;
  const int w = hr_frame.width() / scale_factor * scale_factor;
  if (h < scale_factor || w < scale_factor) {
    fail(ErrorCode::DegenerateOutput, "frame smaller than the scale factor " + std::to_string(scale_factor));
  }
  Frame hr = (h == hr_frame.height() && w == hr_frame.width())
                 ? hr_frame
                 : crop(hr_frame, (hr_frame.height() - h) / 2, (hr_frame.width() - w) / 2, h, w);
  Frame lr = bicubic_resize(hr, {1, scale_factor});
  return {std::move(lr), std::move(hr)};
}

DatasetSplit split_dataset(const std::vector<std::string>& clip_ids, SplitRatios ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    fail(ErrorCode::BadRatios, "split ratios must be non-negative and sum to 1");
  }
  if (clip_ids.empty()) fail(ErrorCode::EmptyCorpus, "no clips to split");

  std::vector<std::string> ids = clip_ids;
  Rng rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);

  const double n = static_cast<double>(ids.size());
  // the small epsilon absorbs representation error such as 10 * 0.1
  const auto n_val = static_cast<std::size_t>(std::floor(n * ratios.val + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(n * ratios.test + 1e-9));
  const std::size_t n_train = ids.size() - n_val - n_test;

  DatasetSplit split;
  split.seed = seed;
  split.train.assign(ids.begin(), ids.begin() + static_cast<long>(n_train));
  split.val.assign(ids.begin() + static_cast<long>(n_train), ids.begin() + static_cast<long>(n_train + n_val));
  split.test.assign(ids.begin() + static_cast<long>(n_train + n_val), ids.end());
  return split;
}

std::vector<int> neighbor_indices(int t, int n) {
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) idx.push_back(std::max(t - k, 0));
  return idx;
}

ClipWindow window_clip(const Clip& lr_clip, int t, int n, std::vector<FlowMap> flows, const Clip* hr_clip, int scale) {
  if (t < 0 || t >= lr_clip.size()) {
    fail(ErrorCode::BadIndex, "t=" + std::to_string(t) + " outside clip of " + std::to_string(lr_clip.size()) + " frames");
  }
  if (n < 1) fail(ErrorCode::BadIndex, "n must be >= 1");
  if (static_cast<int>(flows.size()) != n) {
    fail(ErrorCode::BadIndex, "expected " + std::to_string(n) + " flow maps, got " + std::to_string(flows.size()));
  }
  ClipWindow window;
  window.target_lr = lr_clip.frames[static_cast<std::size_t>(t)];
  for (int j : neighbor_indices(t, n)) window.neighbors_lr.push_back(lr_clip.frames[static_cast<std::size_t>(j)]);
  window.flows = std::move(flows);
  if (hr_clip) {
    if (hr_clip->size() != lr_clip.size()) fail(ErrorCode::BadIndex, "HR and LR clips differ in length");
    window.target_hr = hr_clip->frames[static_cast<std::size_t>(t)];
  }
  window.validate(scale);
  return window;
}

std::string frame_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d.png", index);
  return buf;
}

Clip load_clip(const fs::path& dir, const std::string& clip_id) {
  if (!fs::is_directory(dir)) fail(ErrorCode::UnreadableSource, dir.string() + " is not a directory");
  auto files = list_frames(dir);
  if (files.empty()) fail(ErrorCode::UnreadableSource, dir.string() + " contains no PNG frames");
  return read_frames(files, clip_id, dir.string());
}

void write_clip(const Clip& clip, const fs::path& dir) {
  fs::create_directories(dir);
  for (int i = 0; i < clip.size(); ++i) write_png_if_changed(dir / frame_file_name(i), clip.frames[static_cast<std::size_t>(i)]);
}

bool write_png_if_changed(const fs::path& path, const Frame& frame) {
  if (fs::exists(path)) {
    try {
      if (read_png(path) == replicate_to_rgb(quantized8(frame))) return false;
    } catch (const Error&) {
      // unreadable: overwrite
    }
  }
  write_png(path, frame);
  return true;
}

void to_json(nlohmann::json& j, const DatasetSplit& split) {
  j = nlohmann::json{{"seed", split.seed}, {"train", split.train}, {"val", split.val}, {"test", split.test}};
}

void from_json(const nlohmann::json& j, DatasetSplit& split) {
  j.at("seed").get_to(split.seed);
  j.at("train").get_to(split.train);
  j.at("val").get_to(split.val);
  j.at("test").get_to(split.test);
}

DatasetSplit read_split_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::UnreadableSource, "cannot open split manifest " + path.string());
  try {
    return nlohmann::json::parse(in).get<DatasetSplit>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::UnreadableSource, "malformed split manifest " + path.string() + ": " + e.what());
  }
}

bool write_split_manifest(const fs::path& path, const DatasetSplit& split) {
  const std::string text = nlohmann::json(split).dump(2) + "\n";
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    if (ss.str() == text) return false;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  return true;
}

}  // namespace isb
