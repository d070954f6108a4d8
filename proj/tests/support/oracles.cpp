#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace isb::oracle {

nn::Tensor random_tensor(const nn::Shape& shape, Rng& rng, double lo, double hi) {
  nn::Tensor t(shape);
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

Frame random_frame(int height, int width, Rng& rng, double lo, double hi) {
  Frame f(height, width, 3);
  for (double& v : f.pixels()) v = rng.uniform(lo, hi);
  return f;
}

double mse(const nn::Tensor& a, const nn::Tensor& b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.channels(); ++c)
    for (std::size_t y = 0; y < a.height(); ++y)
      for (std::size_t x = 0; x < a.width(); ++x) {
        const double d = a.at(c, y, x) - b.at(c, y, x);
        s += d * d;
      }
  return s / static_cast<double>(a.channels() * a.height() * a.width());
}

double l1(const nn::Tensor& a, const nn::Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

double tv(const nn::Tensor& x) {
  const std::size_t h = x.height(), w = x.width();
  double s = 0.0;
  for (std::size_t c = 0; c < x.channels(); ++c)
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j) {
        const double dv = i + 1 < h ? x.at(c, i + 1, j) - x.at(c, i, j) : 0.0;
        const double dh = j + 1 < w ? x.at(c, i, j + 1) - x.at(c, i, j) : 0.0;
        s += std::sqrt(dv * dv + dh * dh);
      }
  return s / static_cast<double>(h * w);
}

nn::Tensor conv2d(const nn::Tensor& x, const nn::Tensor& w, const nn::Tensor& b, int stride, int pad) {
  const int cin = static_cast<int>(x.channels()), h = static_cast<int>(x.height()), wd = static_cast<int>(x.width());
  const int cout = static_cast<int>(w.shape()[0]), k = static_cast<int>(w.shape()[2]);
  const int ho = (h + 2 * pad - k) / stride + 1, wo = (wd + 2 * pad - k) / stride + 1;
  nn::Tensor out({static_cast<std::size_t>(cout), static_cast<std::size_t>(ho), static_cast<std::size_t>(wo)});
  for (int o = 0; o < cout; ++o)
    for (int y = 0; y < ho; ++y)
      for (int xx = 0; xx < wo; ++xx) {
        double acc = b[static_cast<std::size_t>(o)];
        for (int i = 0; i < cin; ++i)
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
              const int sy = y * stride - pad + ky, sx = xx * stride - pad + kx;
              if (sy < 0 || sy >= h || sx < 0 || sx >= wd) continue;
              acc += w[((static_cast<std::size_t>(o) * cin + i) * k + ky) * k + kx] *
                     x.at(static_cast<std::size_t>(i), static_cast<std::size_t>(sy), static_cast<std::size_t>(sx));
            }
        out.at(static_cast<std::size_t>(o), static_cast<std::size_t>(y), static_cast<std::size_t>(xx)) = acc;
      }
  return out;
}

nn::Tensor relu(const nn::Tensor& x) {
  nn::Tensor out = x;
  for (double& v : out.values()) v = std::max(v, 0.0);
  return out;
}

nn::Tensor max_pool2(const nn::Tensor& x) {
  nn::Tensor out({x.channels(), x.height() / 2, x.width() / 2});
  for (std::size_t c = 0; c < out.channels(); ++c)
    for (std::size_t y = 0; y < out.height(); ++y)
      for (std::size_t xx = 0; xx < out.width(); ++xx)
        out.at(c, y, xx) = std::max({x.at(c, 2 * y, 2 * xx), x.at(c, 2 * y, 2 * xx + 1), x.at(c, 2 * y + 1, 2 * xx),
                                     x.at(c, 2 * y + 1, 2 * xx + 1)});
  return out;
}

nn::Tensor features(const FeatureExtractor& fx, const nn::Tensor& image) {
  const auto& cfg = fx.config();
  if (cfg.kind == FeatureExtractorConfig::Kind::Identity) return image;
  nn::Tensor x = image;
  for (int b = 1; b <= cfg.pool_index; ++b) {
    if (b > 1) x = max_pool2(x);
    const int convs = b == cfg.pool_index ? cfg.conv_index : cfg.block_convs[static_cast<std::size_t>(b - 1)];
    for (int c = 1; c <= convs; ++c) {
      const std::string name = "block" + std::to_string(b) + ".conv" + std::to_string(c);
      x = relu(conv2d(x, fx.weights().at(name + ".weight"), fx.weights().at(name + ".bias"), 1, 1));
    }
  }
  return x;
}

double perceptual(const FeatureExtractor& fx, const nn::Tensor& a, const nn::Tensor& b) {
  return mse(features(fx, a), features(fx, b));
}

std::vector<double> luma8(const Frame& f) {
  std::vector<double> y(static_cast<std::size_t>(f.height()) * f.width());
  auto q = [](double v) { return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0; };
  for (int r = 0; r < f.height(); ++r)
    for (int c = 0; c < f.width(); ++c)
      y[static_cast<std::size_t>(r) * f.width() + c] =
          0.299 * q(f.at(r, c, 0)) + 0.587 * q(f.at(r, c, 1)) + 0.114 * q(f.at(r, c, 2));
  return y;
}

double psnr_luma(const Frame& a, const Frame& b) {
  const auto ya = luma8(a), yb = luma8(b);
  double s = 0.0;
  for (std::size_t i = 0; i < ya.size(); ++i) s += (ya[i] - yb[i]) * (ya[i] - yb[i]);
  return 10.0 * std::log10(static_cast<double>(ya.size()) / s);
}

double ssim_luma(const Frame& a, const Frame& b) {
  const auto ya = luma8(a), yb = luma8(b);
  const int h = a.height(), w = a.width();
  double g[11][11];
  double total = 0.0;
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) {
      g[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2.0 * 1.5 * 1.5));
      total += g[i][j];
    }
  const double c1 = 1e-4, c2 = 9e-4;
  double sum = 0.0;
  int count = 0;
  for (int y = 0; y + 11 <= h; ++y)
    for (int x = 0; x + 11 <= w; ++x) {
      double ma = 0, mb = 0;
      for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
          const double wt = g[i][j] / total;
          ma += wt * ya[static_cast<std::size_t>(y + i) * w + x + j];
          mb += wt * yb[static_cast<std::size_t>(y + i) * w + x + j];
        }
      double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
          const double wt = g[i][j] / total;
          const double da = ya[static_cast<std::size_t>(y + i) * w + x + j] - ma;
          const double db = yb[static_cast<std::size_t>(y + i) * w + x + j] - mb;
          va += wt * da * da;
          vb += wt * db * db;
          cov += wt * da * db;
        }
      sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  return sum / count;
}

nn::Tensor numeric_gradient(const std::function<double()>& f, nn::Tensor& x, double h) {
  nn::Tensor g(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f();
    x[i] = keep - h;
    const double down = f();
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

double max_relative_error(const nn::Tensor& analytic, const nn::Tensor& numeric, double floor) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

}  // namespace isb::oracle
