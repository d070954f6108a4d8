#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "isb/corpus.hpp"
#include "isb/frame.hpp"

namespace isb::fixture {

/// Smooth multi-frequency texture sampled at (x + dx, y + dy).
Frame texture(int height, int width, double dx = 0.0, double dy = 0.0);

/// Windows of toy clip `clip` (LR = HR / 4, both on 8-bit levels), flows
/// computed in memory.
std::vector<TrainingSample> toy_samples(int clip, int n, int hr_size = 32);

/// Fresh empty directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

/// Relative path -> contents for every regular file under root.
std::vector<std::pair<std::string, std::string>> snapshot_tree(const std::filesystem::path& root);

}  // namespace isb::fixture
