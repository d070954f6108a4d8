#pragma once

#include <vector>

namespace isb {

/// Dense displacement field. u is horizontal (positive = rightward), v is
/// vertical (positive = downward), both in pixels, row-major H x W.
struct FlowMap {
  int height = 0;
  int width = 0;
  std::vector<double> u;
  std::vector<double> v;

  FlowMap() = default;
  FlowMap(int h, int w) : height(h), width(w), u(static_cast<std::size_t>(h) * w, 0.0), v(u) {}

  double& u_at(int y, int x) noexcept { return u[static_cast<std::size_t>(y) * width + x]; }
  double& v_at(int y, int x) noexcept { return v[static_cast<std::size_t>(y) * width + x]; }
  double u_at(int y, int x) const noexcept { return u[static_cast<std::size_t>(y) * width + x]; }
  double v_at(int y, int x) const noexcept { return v[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const FlowMap&, const FlowMap&) = default;
};

}  // namespace isb
