#include "isb/optical_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isb/error.hpp"

namespace isb {
namespace {

// Single-channel working image.
struct Plane {
  int h = 0;
  int w = 0;
  std::vector<double> px;

  Plane() = default;
  Plane(int height, int width, double fill = 0.0) : h(height), w(width), px(static_cast<std::size_t>(height) * width, fill) {}
  double& operator()(int y, int x) { return px[static_cast<std::size_t>(y) * w + x]; }
  double operator()(int y, int x) const { return px[static_cast<std::size_t>(y) * w + x]; }
  double clamped(int y, int x) const { return (*this)(std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1)); }
};

double sample_bilinear(const Plane& p, double y, double x) {
  y = std::clamp(y, 0.0, static_cast<double>(p.h - 1));
  x = std::clamp(x, 0.0, static_cast<double>(p.w - 1));
  const int y0 = static_cast<int>(std::floor(y)), x0 = static_cast<int>(std::floor(x));
  const int y1 = std::min(y0 + 1, p.h - 1), x1 = std::min(x0 + 1, p.w - 1);
  const double fy = y - y0, fx = x - x0;
  return (1 - fy) * ((1 - fx) * p(y0, x0) + fx * p(y0, x1)) + fy * ((1 - fx) * p(y1, x0) + fx * p(y1, x1));
}

Plane luma_plane(const Frame& f) {
  Frame y = luminance(f);
  Plane p(f.height(), f.width());
  std::copy(y.plane(0).begin(), y.plane(0).end(), p.px.begin());
  return p;
}

// Binomial [1 4 6 4 1] / 16 blur, then keep every second sample.
Plane downsample(const Plane& in) {
  static constexpr double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  Plane rows(in.h, in.w);
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x) {
      double acc = 0.0;
      for (int i = -2; i <= 2; ++i) acc += k[i + 2] * in.clamped(y, x + i);
      rows(y, x) = acc;
    }
  Plane out((in.h + 1) / 2, (in.w + 1) / 2);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x) {
      double acc = 0.0;
      for (int i = -2; i <= 2; ++i) acc += k[i + 2] * rows.clamped(2 * y + i, 2 * x);
      out(y, x) = acc;
    }
  return out;
}

Plane upsample_flow(const Plane& coarse, int h, int w, double gain) {
  Plane out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(y, x) = gain * sample_bilinear(coarse, (y + 0.5) / 2.0 - 0.5, (x + 0.5) / 2.0 - 0.5);
  return out;
}

Plane warp_plane(const Plane& src, const Plane& u, const Plane& v) {
  Plane out(src.h, src.w);
  for (int y = 0; y < src.h; ++y)
    for (int x = 0; x < src.w; ++x) out(y, x) = sample_bilinear(src, y + v(y, x), x + u(y, x));
  return out;
}

// Horn-Schunck neighbourhood average: 1/6 on edge neighbours, 1/12 on corners.
double hs_average(const Plane& p, int y, int x) {
  return (p.clamped(y - 1, x) + p.clamped(y + 1, x) + p.clamped(y, x - 1) + p.clamped(y, x + 1)) / 6.0 +
         (p.clamped(y - 1, x - 1) + p.clamped(y - 1, x + 1) + p.clamped(y + 1, x - 1) + p.clamped(y + 1, x + 1)) / 12.0;
}

constexpr double kMaxWarpStep = 1.0;

void refine_level(const Plane& src, const Plane& dst, Plane& u, Plane& v, const FlowParams& params) {
  const double alpha2 = params.alpha * params.alpha;
  const int h = src.h, w = src.w;
  Plane ix(h, w), iy(h, w), it(h, w), ubar(h, w), vbar(h, w);
  for (int pass = 0; pass < params.warps; ++pass) {
    const Plane warped = warp_plane(src, u, v);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        // gradients averaged over the warped source and the target
        ix(y, x) = 0.25 * (warped.clamped(y, x + 1) - warped.clamped(y, x - 1) + dst.clamped(y, x + 1) - dst.clamped(y, x - 1));
        iy(y, x) = 0.25 * (warped.clamped(y + 1, x) - warped.clamped(y - 1, x) + dst.clamped(y + 1, x) - dst.clamped(y - 1, x));
        it(y, x) = warped(y, x) - dst(y, x);
      }
    const Plane u0 = u, v0 = v;
    for (int iter = 0; iter < params.iterations; ++iter) {
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          ubar(y, x) = hs_average(u, y, x);
          vbar(y, x) = hs_average(v, y, x);
        }
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double gx = ix(y, x), gy = iy(y, x);
          const double residual = it(y, x) + gx * (ubar(y, x) - u0(y, x)) + gy * (vbar(y, x) - v0(y, x));
          const double k = residual / (alpha2 + gx * gx + gy * gy);
          u(y, x) = ubar(y, x) - gx * k;
          v(y, x) = vbar(y, x) - gy * k;
        }
    }
    // The linearization only holds for sub-pixel steps.
    for (std::size_t i = 0; i < u.px.size(); ++i) {
      u.px[i] = std::clamp(u.px[i], u0.px[i] - kMaxWarpStep, u0.px[i] + kMaxWarpStep);
      v.px[i] = std::clamp(v.px[i], v0.px[i] - kMaxWarpStep, v0.px[i] + kMaxWarpStep);
    }
  }
}

}  // namespace

FlowMap estimate_flow(const Frame& source, const Frame& target, const FlowParams& params) {
  if (source.height() != target.height() || source.width() != target.width()) {
    fail(ErrorCode::DimensionMismatch, "flow between " + std::to_string(source.width()) + "x" + std::to_string(source.height()) +
                                           " and " + std::to_string(target.width()) + "x" + std::to_string(target.height()));
  }
  if (params.levels < 1 || params.iterations < 0 || params.warps < 1 || !(params.alpha > 0)) {
    fail(ErrorCode::InvalidConfig, "flow parameters out of range");
  }

  std::vector<Plane> src_pyr{luma_plane(source)}, dst_pyr{luma_plane(target)};
  while (static_cast<int>(src_pyr.size()) < params.levels &&
         std::min(src_pyr.back().h, src_pyr.back().w) / 2 >= params.min_level_size) {
    src_pyr.push_back(downsample(src_pyr.back()));
    dst_pyr.push_back(downsample(dst_pyr.back()));
  }

  Plane u, v;
  for (int level = static_cast<int>(src_pyr.size()) - 1; level >= 0; --level) {
    const Plane& s = src_pyr[static_cast<std::size_t>(level)];
    if (u.px.empty()) {
      u = Plane(s.h, s.w);
      v = Plane(s.h, s.w);
    } else {
      u = upsample_flow(u, s.h, s.w, 2.0);
      v = upsample_flow(v, s.h, s.w, 2.0);
    }
    refine_level(s, dst_pyr[static_cast<std::size_t>(level)], u, v, params);
  }

  FlowMap flow(source.height(), source.width());
  flow.u = std::move(u.px);
  flow.v = std::move(v.px);
  return flow;
}

Frame warp(const Frame& frame, const FlowMap& flow) {
  if (flow.height != frame.height() || flow.width != frame.width()) {
    fail(ErrorCode::DimensionMismatch, "flow dims differ from frame dims");
  }
  Frame out(frame.height(), frame.width(), frame.channels());
  Plane p(frame.height(), frame.width());
  for (int c = 0; c < frame.channels(); ++c) {
    std::copy(frame.plane(c).begin(), frame.plane(c).end(), p.px.begin());
    for (int y = 0; y < frame.height(); ++y)
      for (int x = 0; x < frame.width(); ++x) out.at(y, x, c) = sample_bilinear(p, y + flow.v_at(y, x), x + flow.u_at(y, x));
  }
  return out;
}

double mean_flow_magnitude(const FlowMap& flow) {
  if (flow.u.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < flow.u.size(); ++i) acc += std::hypot(flow.u[i], flow.v[i]);
  return acc / static_cast<double>(flow.u.size());
}

bool flow_is_finite(const FlowMap& flow) {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(flow.u.begin(), flow.u.end(), finite) && std::all_of(flow.v.begin(), flow.v.end(), finite);
}

}  // namespace isb
