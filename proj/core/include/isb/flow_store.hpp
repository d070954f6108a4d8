#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "isb/data_pipeline.hpp"
#include "isb/optical_flow.hpp"

namespace isb {

// FLO1 container: "FLO1", u32 H, u32 W (little-endian), H*W float32 u, then
// H*W float32 v.
std::string encode_flo1(const FlowMap& flow);
FlowMap decode_flo1(const std::string& bytes);

/// Flow maps keyed by (clip, t, k) under <root>/<clip_id>/t%06d_k%d.flo1,
/// where entry (t, k) holds estimate_flow(LR[t-k], LR[t]).
class FlowStore {
 public:
  explicit FlowStore(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path path_for(const std::string& clip_id, int t, int k) const;
  bool contains(const std::string& clip_id, int t, int k) const;
  FlowMap read(const std::string& clip_id, int t, int k) const;
  // Returns false when an identical entry is already stored.
  bool write(const std::string& clip_id, int t, int k, const FlowMap& flow);

 private:
  std::filesystem::path root_;
  std::mutex write_mutex_;
};

/// Worker cap from ISB_THREADS (default: hardware concurrency, at least 1).
int worker_threads();

struct PrecomputeResult {
  int entries = 0;  // (t, k) pairs covered
  int written = 0;  // files that changed
};

/// Fills the store with every (t, k) for 1 <= k <= min(n, t). Idempotent.
PrecomputeResult precompute_flows(const Clip& lr_clip, int n, const FlowParams& params, FlowStore& store,
                                  int threads = 0);

/// The n flow maps of window t, matching neighbor_indices(t, n): a neighbor
/// clamped onto the target itself gets a zero flow.
std::vector<FlowMap> window_flows(const FlowStore& store, const Clip& lr_clip, int t, int n);

/// Same as window_flows but computed in memory, rounded to float32 as the
/// store would.
std::vector<FlowMap> compute_window_flows(const Clip& lr_clip, int t, int n, const FlowParams& params);

}  // namespace isb
