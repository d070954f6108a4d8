#include <algorithm>
#include <cmath>
#include <cstdio>

#include "isb/data_pipeline.hpp"
#include "isb/random.hpp"

namespace isb {
namespace {

struct Wave {
  double fx, fy, phase;
  double color[3];
};

struct Square {
  int size;
  double x0, y0, vx, vy;
  Wave texture;
};

Wave random_wave(Rng& rng, double min_freq, double max_freq) {
  Wave w{};
  const double freq = rng.uniform(min_freq, max_freq);
  const double angle = rng.uniform(0.0, M_PI);
  w.fx = freq * std::cos(angle);
  w.fy = freq * std::sin(angle);
  w.phase = rng.uniform(0.0, 2.0 * M_PI);
  for (double& c : w.color) c = rng.uniform(0.3, 1.0);
  return w;
}

double eval(const Wave& w, double x, double y, int c) { return w.color[c] * std::sin(w.fx * x + w.fy * y + w.phase); }

}  // namespace

std::vector<Clip> make_toy_corpus(int num_clips, int frames_per_clip, int height, int width, std::uint64_t seed) {
  std::vector<Clip> clips;
  for (int ci = 0; ci < num_clips; ++ci) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(ci)));
    Wave bg[2] = {random_wave(rng, 0.15, 0.45), random_wave(rng, 0.3, 0.8)};
    double base[3];
    for (double& b : base) b = rng.uniform(0.35, 0.65);
    const double pan_x = rng.uniform(-0.5, 0.5), pan_y = rng.uniform(-0.5, 0.5);

    std::vector<Square> squares(2);
    for (auto& s : squares) {
      s.size = std::max(2, static_cast<int>(std::lround(rng.uniform(0.25, 0.38) * std::min(height, width))));
      s.vx = static_cast<double>(static_cast<int>(rng.below(5)) - 2);
      s.vy = static_cast<double>(static_cast<int>(rng.below(3)) - 1);
      const double travel_x = std::abs(s.vx) * (frames_per_clip - 1), travel_y = std::abs(s.vy) * (frames_per_clip - 1);
      const double span_x = std::max(0.0, width - s.size - travel_x), span_y = std::max(0.0, height - s.size - travel_y);
      s.x0 = std::floor(rng.uniform(0.0, span_x)) + (s.vx < 0 ? travel_x : 0.0);
      s.y0 = std::floor(rng.uniform(0.0, span_y)) + (s.vy < 0 ? travel_y : 0.0);
      s.texture = random_wave(rng, 0.5, 1.2);
    }

    Clip clip;
    char id[32];
    std::snprintf(id, sizeof(id), "toy_%03d", ci);
    clip.clip_id = id;
    clip.source_path = "procedural";
    for (int t = 0; t < frames_per_clip; ++t) {
      Frame f(height, width, 3);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          const double bx = x + pan_x * t, by = y + pan_y * t;
          for (int c = 0; c < 3; ++c)
            f.at(y, x, c) = base[c] + 0.22 * eval(bg[0], bx, by, c) + 0.1 * eval(bg[1], bx, by, c);
        }
      for (const auto& s : squares) {
        const int sx = static_cast<int>(s.x0 + s.vx * t), sy = static_cast<int>(s.y0 + s.vy * t);
        for (int y = std::max(0, sy); y < std::min(height, sy + s.size); ++y)
          for (int x = std::max(0, sx); x < std::min(width, sx + s.size); ++x)
            for (int c = 0; c < 3; ++c)
              f.at(y, x, c) = 0.5 + 0.4 * eval(s.texture, x - sx, y - sy, c);
      }
      for (double& v : f.pixels()) v = std::clamp(v, 0.02, 0.98);
      clip.frames.push_back(std::move(f));
    }
    clips.push_back(std::move(clip));
  }
  return clips;
}

}  // namespace isb
