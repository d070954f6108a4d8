#include "isb/metrics.hpp"

#include <cmath>
#include <string>

#include "isb/error.hpp"

namespace isb {
namespace {

void require_same(const Frame& a, const Frame& b, const char* what) {
  if (!a.same_dims(b)) {
    fail(ErrorCode::DimensionMismatch, std::string(what) + " of " + std::to_string(a.width()) + "x" +
                                           std::to_string(a.height()) + "x" + std::to_string(a.channels()) + " and " +
                                           std::to_string(b.width()) + "x" + std::to_string(b.height()) + "x" +
                                           std::to_string(b.channels()));
  }
}

std::vector<double> gaussian_1d() {
  std::vector<double> g(kSsimWindow);
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - kSsimWindow / 2;
    g[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    sum += g[static_cast<std::size_t>(i)];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Separable valid-mode Gaussian filter of one plane.
std::vector<double> filter(std::span<const double> in, int h, int w, const std::vector<double>& g) {
  const int ow = w - kSsimWindow + 1, oh = h - kSsimWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += g[static_cast<std::size_t>(k)] * in[static_cast<std::size_t>(y) * w + x + k];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += g[static_cast<std::size_t>(k)] * rows[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

double ssim_plane(std::span<const double> a, std::span<const double> b, int h, int w) {
  const auto g = gaussian_1d();
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = filter(a, h, w, g), mu_b = filter(b, h, w, g);
  const auto e_aa = filter(aa, h, w, g), e_bb = filter(bb, h, w, g), e_ab = filter(ab, h, w, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double va = e_aa[i] - mu_a[i] * mu_a[i];
    const double vb = e_bb[i] - mu_b[i] * mu_b[i];
    const double cov = e_ab[i] - mu_a[i] * mu_b[i];
    sum += ((2 * mu_a[i] * mu_b[i] + kSsimC1) * (2 * cov + kSsimC2)) /
           ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kSsimC1) * (va + vb + kSsimC2));
  }
  return sum / static_cast<double>(mu_a.size());
}

}  // namespace

std::string_view to_string(Colorspace c) noexcept { return c == Colorspace::Luma ? "luma" : "rgb"; }

Colorspace parse_colorspace(std::string_view text) {
  if (text == "luma" || text == "y") return Colorspace::Luma;
  if (text == "rgb") return Colorspace::Rgb;
  fail(ErrorCode::InvalidConfig, "unknown colorspace '" + std::string(text) + "' (expected luma or rgb)");
}

std::vector<double> ssim_window() {
  const auto g = gaussian_1d();
  std::vector<double> w;
  for (double gy : g)
    for (double gx : g) w.push_back(gy * gx);
  return w;
}

Frame metric_view(const Frame& frame, const MetricOptions& options) {
  Frame f = quantized8(frame);
  if (options.colorspace == Colorspace::Luma) f = luminance(f);
  const int b = options.crop_border;
  if (b > 0) {
    if (2 * b >= f.height() || 2 * b >= f.width()) fail(ErrorCode::TooSmall, "crop border " + std::to_string(b) + " leaves no pixels");
    f = crop(f, b, b, f.height() - 2 * b, f.width() - 2 * b);
  }
  return f;
}

double psnr(const Frame& a, const Frame& b, const MetricOptions& options) {
  require_same(a, b, "psnr");
  const Frame x = metric_view(a, options), y = metric_view(b, options);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.pixels().size(); ++i) {
    const double d = x.pixels()[i] - y.pixels()[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(x.pixels().size());
  if (mse == 0.0) fail(ErrorCode::IdenticalInputs, "frames are identical after quantization (perfect match)");
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Frame& a, const Frame& b, const MetricOptions& options) {
  require_same(a, b, "ssim");
  const Frame x = metric_view(a, options), y = metric_view(b, options);
  if (x.height() < kSsimWindow || x.width() < kSsimWindow) {
    fail(ErrorCode::TooSmall, "ssim needs at least " + std::to_string(kSsimWindow) + " pixels per side, got " +
                                  std::to_string(x.width()) + "x" + std::to_string(x.height()));
  }
  double sum = 0.0;
  for (int c = 0; c < x.channels(); ++c) sum += ssim_plane(x.plane(c), y.plane(c), x.height(), x.width());
  return sum / x.channels();
}

}  // namespace isb
