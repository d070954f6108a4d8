#pragma once

#include <string_view>
#include <vector>

#include "isb/frame.hpp"

namespace isb {

enum class Colorspace { Luma, Rgb };

std::string_view to_string(Colorspace c) noexcept;
Colorspace parse_colorspace(std::string_view text);

/// Frames are clamped to [0, 1] and snapped to 8-bit levels before scoring;
/// Luma then reduces them to Y = 0.299 R + 0.587 G + 0.114 B.
struct MetricOptions {
  Colorspace colorspace = Colorspace::Luma;
  int crop_border = 0;
};

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

/// The frame the metrics actually compare.
Frame metric_view(const Frame& frame, const MetricOptions& options);

/// 10 log10(1 / MSE) in dB with peak 1. IdenticalInputs when MSE is 0.
double psnr(const Frame& a, const Frame& b, const MetricOptions& options = {});

/// Mean SSIM over all fully contained 11x11 Gaussian windows (sigma 1.5),
/// averaged over channels in RGB mode. TooSmall below 11 pixels a side.
double ssim(const Frame& a, const Frame& b, const MetricOptions& options = {});

/// Normalized 11x11 Gaussian weights, row-major.
std::vector<double> ssim_window();

}  // namespace isb
