#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "isb/data_pipeline.hpp"

namespace fs = std::filesystem;

namespace isb::fixture {

Frame texture(int height, int width, double dx, double dy) {
  Frame f(height, width, 3);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double u = x + dx, v = y + dy;
      const double base = 0.5 + 0.18 * std::sin(0.45 * u + 0.2 * v) + 0.14 * std::cos(0.31 * v - 0.17 * u) +
                          0.08 * std::sin(0.9 * u) * std::cos(0.7 * v);
      f.at(y, x, 0) = base;
      f.at(y, x, 1) = 0.9 * base + 0.05;
      f.at(y, x, 2) = 1.0 - base;
    }
  return f;
}

std::vector<TrainingSample> toy_samples(int clip, int n, int hr_size) {
  const auto clips = make_toy_corpus(clip + 1, 7, hr_size, hr_size);
  const Clip& src = clips.back();
  Clip lr{{}, src.clip_id, {}}, hr{{}, src.clip_id, {}};
  for (const auto& f : src.frames) {
    FramePair p = make_pair(f, 4);
    lr.frames.push_back(quantized8(p.lr));
    hr.frames.push_back(quantized8(p.hr));
  }
  return make_samples(lr, &hr, n, FlowParams{});
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("isb_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1)));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::pair<std::string, std::string>> snapshot_tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), root).string(), read_file(e.path()));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace isb::fixture
