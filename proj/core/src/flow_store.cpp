#include "isb/flow_store.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "isb/error.hpp"

namespace fs = std::filesystem;

namespace isb {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

void put_f32(std::string& out, double value) {
  const float f = static_cast<float>(value);
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(out, bits);
}

double get_f32(const std::string& in, std::size_t at) {
  const std::uint32_t bits = get_u32(in, at);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FlowMap round_to_float(FlowMap flow) {
  for (double& x : flow.u) x = static_cast<float>(x);
  for (double& x : flow.v) x = static_cast<float>(x);
  return flow;
}

}  // namespace

std::string encode_flo1(const FlowMap& flow) {
  std::string out = "FLO1";
  out.reserve(12 + flow.u.size() * 8);
  put_u32(out, static_cast<std::uint32_t>(flow.height));
  put_u32(out, static_cast<std::uint32_t>(flow.width));
  for (double x : flow.u) put_f32(out, x);
  for (double x : flow.v) put_f32(out, x);
  return out;
}

FlowMap decode_flo1(const std::string& bytes) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "FLO1") != 0) fail(ErrorCode::UnreadableSource, "not a FLO1 flow file");
  const auto h = static_cast<int>(get_u32(bytes, 4)), w = static_cast<int>(get_u32(bytes, 8));
  const std::size_t n = static_cast<std::size_t>(h) * w;
  if (bytes.size() != 12 + 8 * n) fail(ErrorCode::UnreadableSource, "truncated FLO1 flow file");
  FlowMap flow(h, w);
  for (std::size_t i = 0; i < n; ++i) flow.u[i] = get_f32(bytes, 12 + 4 * i);
  for (std::size_t i = 0; i < n; ++i) flow.v[i] = get_f32(bytes, 12 + 4 * (n + i));
  return flow;
}

fs::path FlowStore::path_for(const std::string& clip_id, int t, int k) const {
  char name[48];
  std::snprintf(name, sizeof(name), "t%06d_k%d.flo1", t, k);
  return root_ / clip_id / name;
}

bool FlowStore::contains(const std::string& clip_id, int t, int k) const { return fs::exists(path_for(clip_id, t, k)); }

FlowMap FlowStore::read(const std::string& clip_id, int t, int k) const {
  const fs::path p = path_for(clip_id, t, k);
  if (!fs::exists(p)) fail(ErrorCode::IoError, "missing flow " + p.string() + " (clip " + clip_id + ", t=" + std::to_string(t) + ", k=" + std::to_string(k) + ")");
  try {
    return decode_flo1(read_file(p));
  } catch (const Error& e) {
    fail(ErrorCode::IoError, "clip " + clip_id + " t=" + std::to_string(t) + " k=" + std::to_string(k) + ": " + e.what());
  }
}

bool FlowStore::write(const std::string& clip_id, int t, int k, const FlowMap& flow) {
  const std::string bytes = encode_flo1(flow);
  const fs::path p = path_for(clip_id, t, k);
  std::lock_guard lock(write_mutex_);
  if (fs::exists(p) && read_file(p) == bytes) return false;
  fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::IoError, "cannot write flow for clip " + clip_id + " t=" + std::to_string(t) + " k=" + std::to_string(k));
  }
  fs::rename(tmp, p);
  return true;
}

int worker_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ISB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = cap;
  }
  return std::max(1, n);
}

PrecomputeResult precompute_flows(const Clip& lr_clip, int n, const FlowParams& params, FlowStore& store, int threads) {
  if (lr_clip.frames.empty()) fail(ErrorCode::EmptyCorpus, "clip " + lr_clip.clip_id + " has no frames");
  if (n < 1) fail(ErrorCode::BadIndex, "n must be >= 1");
  std::vector<std::pair<int, int>> jobs;
  for (int t = 0; t < lr_clip.size(); ++t)
    for (int k = 1; k <= std::min(n, t); ++k) jobs.emplace_back(t, k);

  std::atomic<std::size_t> next{0};
  std::atomic<int> written{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto [t, k] = jobs[i];
        const FlowMap flow = estimate_flow(lr_clip.frames[static_cast<std::size_t>(t - k)],
                                           lr_clip.frames[static_cast<std::size_t>(t)], params);
        if (store.write(lr_clip.clip_id, t, k, flow)) ++written;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int count = std::clamp(threads > 0 ? threads : worker_threads(), 1, std::max<int>(1, static_cast<int>(jobs.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return {static_cast<int>(jobs.size()), written.load()};
}

std::vector<FlowMap> window_flows(const FlowStore& store, const Clip& lr_clip, int t, int n) {
  const Frame& target = lr_clip.frames.at(static_cast<std::size_t>(t));
  std::vector<FlowMap> flows;
  for (int j : neighbor_indices(t, n)) {
    if (j == t) {
      flows.emplace_back(target.height(), target.width());
    } else {
      flows.push_back(store.read(lr_clip.clip_id, t, t - j));
    }
  }
  return flows;
}

std::vector<FlowMap> compute_window_flows(const Clip& lr_clip, int t, int n, const FlowParams& params) {
  const Frame& target = lr_clip.frames.at(static_cast<std::size_t>(t));
  std::vector<FlowMap> flows;
  for (int j : neighbor_indices(t, n)) {
    if (j == t) {
      flows.emplace_back(target.height(), target.width());
    } else {
      flows.push_back(round_to_float(estimate_flow(lr_clip.frames[static_cast<std::size_t>(j)], target, params)));
    }
  }
  return flows;
}

}  // namespace isb
