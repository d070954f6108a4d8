#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isb/checkpoint.hpp"
#include "isb/layers.hpp"

namespace isb {

struct AdamParams {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam over a fixed parameter list. After every update the parameters and
/// both moment buffers are rounded to float32, so a checkpoint written in
/// float32 holds the exact optimizer state and resumed runs stay bit-identical.
class Adam {
 public:
  Adam(nn::ParameterList params, AdamParams hp);

  void step();
  void zero_grad() const { nn::zero_grads(params_); }
  std::int64_t steps_taken() const noexcept { return t_; }
  const AdamParams& hyperparameters() const noexcept { return hp_; }
  void set_learning_rate(double lr) { hp_.learning_rate = lr; }

  // Named as "<prefix><param>.m", "<prefix><param>.v" and "<prefix>t".
  void export_state(TensorMap& out, const std::string& prefix) const;
  void import_state(const TensorMap& in, const std::string& prefix);

 private:
  nn::ParameterList params_;
  AdamParams hp_;
  std::vector<nn::Tensor> m_;
  std::vector<nn::Tensor> v_;
  std::int64_t t_ = 0;
};

inline double round_to_float(double v) { return static_cast<double>(static_cast<float>(v)); }
void round_to_float(const nn::ParameterList& params);

}  // namespace isb
