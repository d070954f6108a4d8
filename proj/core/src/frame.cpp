#include "isb/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isb/error.hpp"

namespace isb {

Frame::Frame(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 0 || width < 0 || channels < 0) fail(ErrorCode::DegenerateOutput, "negative frame dimensions");
  pixels_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

nn::Tensor Frame::to_tensor() const {
  return nn::Tensor({static_cast<std::size_t>(channels_), static_cast<std::size_t>(height_), static_cast<std::size_t>(width_)},
                    pixels_);
}

Frame Frame::from_tensor(const nn::Tensor& t) {
  if (t.rank() != 3) fail(ErrorCode::DimensionMismatch, "frame from tensor of shape " + nn::shape_string(t.shape()));
  Frame f(static_cast<int>(t.height()), static_cast<int>(t.width()), static_cast<int>(t.channels()));
  std::copy(t.data(), t.data() + t.size(), f.pixels_.begin());
  return f;
}

std::uint8_t to_byte(double v) noexcept {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

Frame clamped(const Frame& f) {
  Frame out = f;
  for (double& v : out.pixels()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

Frame quantized8(const Frame& f) {
  Frame out = f;
  for (double& v : out.pixels()) v = to_byte(v) / 255.0;
  return out;
}

Frame luminance(const Frame& f) {
  if (f.channels() == 1) return f;
  if (f.channels() != 3) fail(ErrorCode::DimensionMismatch, "luminance needs 1 or 3 channels, got " + std::to_string(f.channels()));
  Frame out(f.height(), f.width(), 1);
  auto r = f.plane(0), g = f.plane(1), b = f.plane(2);
  auto y = out.plane(0);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  return out;
}

Frame replicate_to_rgb(const Frame& gray) {
  if (gray.channels() == 3) return gray;
  Frame out(gray.height(), gray.width(), 3);
  for (int c = 0; c < 3; ++c) std::copy(gray.plane(0).begin(), gray.plane(0).end(), out.plane(c).begin());
  return out;
}

Frame crop(const Frame& f, int top, int left, int height, int width) {
  if (top < 0 || left < 0 || height < 1 || width < 1 || top + height > f.height() || left + width > f.width()) {
    fail(ErrorCode::BadIndex, "crop window out of frame bounds");
  }
  Frame out(height, width, f.channels());
  for (int c = 0; c < f.channels(); ++c)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) out.at(y, x, c) = f.at(top + y, left + x, c);
  return out;
}

}  // namespace isb
