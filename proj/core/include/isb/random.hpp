#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace isb {

// mt19937_64 is bit-exactly specified by the standard; the distributions are
// not, so the conversions below are written out by hand to keep every seeded
// stream identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

  std::string state() const;
  void restore(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace isb
