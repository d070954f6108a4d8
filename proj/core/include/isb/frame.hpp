#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "isb/tensor.hpp"

namespace isb {

/// One image. Intensities are normalized to [0, 1] and stored planar
/// (channel-major, then row, then column) so a Frame converts to a (C, H, W)
/// tensor without reshuffling.
class Frame {
 public:
  Frame() = default;
  Frame(int height, int width, int channels = 3, double fill = 0.0);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return pixels_.empty(); }
  bool same_dims(const Frame& o) const noexcept {
    return height_ == o.height_ && width_ == o.width_ && channels_ == o.channels_;
  }

  double& at(int y, int x, int c) noexcept { return pixels_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x]; }
  double at(int y, int x, int c) const noexcept {
    return pixels_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }

  std::span<double> plane(int c) noexcept {
    return {pixels_.data() + static_cast<std::size_t>(c) * height_ * width_, static_cast<std::size_t>(height_) * width_};
  }
  std::span<const double> plane(int c) const noexcept {
    return {pixels_.data() + static_cast<std::size_t>(c) * height_ * width_, static_cast<std::size_t>(height_) * width_};
  }

  std::vector<double>& pixels() noexcept { return pixels_; }
  const std::vector<double>& pixels() const noexcept { return pixels_; }

  nn::Tensor to_tensor() const;
  static Frame from_tensor(const nn::Tensor& t);

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> pixels_;
};

std::uint8_t to_byte(double v) noexcept;
Frame clamped(const Frame& f);
// Clamp then snap every value to the nearest 8-bit level.
Frame quantized8(const Frame& f);
// Y = 0.299 R + 0.587 G + 0.114 B; single-channel frames pass through.
Frame luminance(const Frame& f);
Frame replicate_to_rgb(const Frame& gray);
Frame crop(const Frame& f, int top, int left, int height, int width);

}  // namespace isb
