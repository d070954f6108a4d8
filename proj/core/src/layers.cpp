#include "isb/layers.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace isb {

std::uint64_t Rng::below(std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double Rng::normal() {
  // Box-Muller on two open-interval uniforms.
  const double u1 = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::string Rng::state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::restore(const std::string& state) {
  std::istringstream is(state);
  is >> engine_;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace nn {
namespace {

Tensor kaiming_uniform(Shape shape, double fan_in, Rng& rng) {
  Tensor t(std::move(shape));
  const double bound = std::sqrt(6.0 / fan_in);
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace

std::size_t parameter_count(const ParameterList& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.var.value().size();
  return n;
}

void zero_grads(const ParameterList& params) {
  for (const auto& p : params) p.var.zero_grad();
}

Conv2d::Conv2d(std::string name, int in_channels, int out_channels, int kernel, int stride, int pad, Rng& rng)
    : name_(std::move(name)), stride_(stride), pad_(pad) {
  const auto in = static_cast<std::size_t>(in_channels), out = static_cast<std::size_t>(out_channels),
             k = static_cast<std::size_t>(kernel);
  weight_ = parameter(kaiming_uniform({out, in, k, k}, static_cast<double>(in * k * k), rng));
  bias_ = parameter(Tensor({out}, 0.0));
}

void Conv2d::collect(ParameterList& out) const {
  out.push_back({name_ + ".weight", weight_});
  out.push_back({name_ + ".bias", bias_});
}

ConvTranspose2d::ConvTranspose2d(std::string name, int in_channels, int out_channels, int kernel, int stride, int pad,
                                 Rng& rng)
    : name_(std::move(name)), stride_(stride), pad_(pad) {
  const auto in = static_cast<std::size_t>(in_channels), out = static_cast<std::size_t>(out_channels),
             k = static_cast<std::size_t>(kernel);
  // each output pixel receives (k / stride)^2 taps per input channel
  const double taps = static_cast<double>(k * k) / static_cast<double>(stride * stride);
  weight_ = parameter(kaiming_uniform({in, out, k, k}, static_cast<double>(in) * taps, rng));
  bias_ = parameter(Tensor({out}, 0.0));
}

void ConvTranspose2d::collect(ParameterList& out) const {
  out.push_back({name_ + ".weight", weight_});
  out.push_back({name_ + ".bias", bias_});
}

PReLU::PReLU(std::string name, double init) : name_(std::move(name)), slope_(parameter(Tensor({1}, init))) {}

void PReLU::collect(ParameterList& out) const { out.push_back({name_ + ".slope", slope_}); }

Linear::Linear(std::string name, int in_features, int out_features, Rng& rng) : name_(std::move(name)) {
  const auto in = static_cast<std::size_t>(in_features), out = static_cast<std::size_t>(out_features);
  weight_ = parameter(kaiming_uniform({out, in}, static_cast<double>(in), rng));
  bias_ = parameter(Tensor({out}, 0.0));
}

void Linear::collect(ParameterList& out) const {
  out.push_back({name_ + ".weight", weight_});
  out.push_back({name_ + ".bias", bias_});
}

ResidualBlock::ResidualBlock(const std::string& name, int channels, Rng& rng)
    : first_(name + ".conv1", channels, channels, 3, 1, 1, rng),
      act_(name + ".act"),
      second_(name + ".conv2", channels, channels, 3, 1, 1, rng) {
  for (double& w : second_.weight().mutable_value().values()) w *= kResidualInitScale;
}

Var ResidualBlock::operator()(const Var& x) const { return ops::add(x, second_(act_(first_(x)))); }

void ResidualBlock::collect(ParameterList& out) const {
  first_.collect(out);
  act_.collect(out);
  second_.collect(out);
}

}  // namespace nn
}  // namespace isb
