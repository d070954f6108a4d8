#pragma once

#include "isb/flow_map.hpp"
#include "isb/frame.hpp"

namespace isb {

/// Coarse-to-fine Horn-Schunck settings.
struct FlowParams {
  int levels = 4;         // pyramid levels, clamped so the coarsest side stays >= min_level_size
  int min_level_size = 8;
  int warps = 3;          // re-linearisations per level
  int iterations = 60;    // Jacobi sweeps per warp
  double alpha = 0.04;    // smoothness weight, in intensity units (frames are in [0, 1])

  friend bool operator==(const FlowParams&, const FlowParams&) = default;
};

/// Flow F such that source(x + F(x)) ~ target(x): warp(source, F) aligns the
/// source onto the target. Computed on luminance.
FlowMap estimate_flow(const Frame& source, const Frame& target, const FlowParams& params = {});

/// Backward warp with bilinear sampling; samples outside the frame clamp to
/// the nearest edge pixel.
Frame warp(const Frame& frame, const FlowMap& flow);

double mean_flow_magnitude(const FlowMap& flow);
bool flow_is_finite(const FlowMap& flow);

}  // namespace isb
