#pragma once

#include <string>
#include <vector>

#include "isb/autograd.hpp"
#include "isb/random.hpp"

namespace isb::nn {

struct NamedParameter {
  std::string name;
  Var var;
};
using ParameterList = std::vector<NamedParameter>;

std::size_t parameter_count(const ParameterList& params);
void zero_grads(const ParameterList& params);

class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(std::string name, int in_channels, int out_channels, int kernel, int stride, int pad, Rng& rng);

  Var operator()(const Var& x) const { return ops::conv2d(x, weight_, bias_, stride_, pad_); }
  void collect(ParameterList& out) const;

  Var& weight() { return weight_; }
  Var& bias() { return bias_; }

 private:
  std::string name_;
  Var weight_;
  Var bias_;
  int stride_ = 1;
  int pad_ = 0;
};

class ConvTranspose2d {
 public:
  ConvTranspose2d() = default;
  ConvTranspose2d(std::string name, int in_channels, int out_channels, int kernel, int stride, int pad, Rng& rng);

  Var operator()(const Var& x) const { return ops::conv_transpose2d(x, weight_, bias_, stride_, pad_); }
  void collect(ParameterList& out) const;

  Var& weight() { return weight_; }
  Var& bias() { return bias_; }

 private:
  std::string name_;
  Var weight_;
  Var bias_;
  int stride_ = 1;
  int pad_ = 0;
};

class PReLU {
 public:
  PReLU() = default;
  explicit PReLU(std::string name, double init = 0.25);

  Var operator()(const Var& x) const { return ops::prelu(x, slope_); }
  void collect(ParameterList& out) const;

 private:
  std::string name_;
  Var slope_;
};

class Linear {
 public:
  Linear() = default;
  Linear(std::string name, int in_features, int out_features, Rng& rng);

  Var operator()(const Var& x) const { return ops::linear(x, weight_, bias_); }
  void collect(ParameterList& out) const;

 private:
  std::string name_;
  Var weight_;
  Var bias_;
};

inline constexpr double kResidualInitScale = 0.1;

/// x + conv(prelu(conv(x))), two 3x3 stride-1 pad-1 convolutions. The second
/// convolution starts at kResidualInitScale times its Kaiming draw so deep
/// residual towers begin close to the identity.
class ResidualBlock {
 public:
  ResidualBlock() = default;
  ResidualBlock(const std::string& name, int channels, Rng& rng);

  Var operator()(const Var& x) const;
  void collect(ParameterList& out) const;

  Conv2d& first() { return first_; }
  Conv2d& second() { return second_; }

 private:
  Conv2d first_;
  PReLU act_;
  Conv2d second_;
};

// Number of trainable scalars in each layer kind, for closed-form counts.
constexpr std::size_t conv_params(std::size_t in, std::size_t out, std::size_t k) { return out * in * k * k + out; }
constexpr std::size_t prelu_params() { return 1; }
constexpr std::size_t residual_block_params(std::size_t ch) { return 2 * conv_params(ch, ch, 3) + prelu_params(); }

}  // namespace isb::nn
