#pragma once

// Tape-free reverse-mode differentiation over Tensor values. Every op returns a
// Var that remembers its inputs and a closure that pushes its gradient back to
// them; backward() walks the graph in reverse topological order.

#include <functional>
#include <memory>
#include <vector>

#include "isb/tensor.hpp"

namespace isb::nn {

struct Node {
  Tensor value;
  Tensor grad;  // allocated lazily, same shape as value
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  Tensor& ensure_grad();
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  bool defined() const noexcept { return static_cast<bool>(node_); }
  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  double item() const { return node_->value.item(); }

  bool requires_grad() const noexcept { return node_ && node_->requires_grad; }
  // Gradient accumulated so far; zeros if nothing has flowed in yet.
  const Tensor& grad() const { return node_->ensure_grad(); }
  void zero_grad() const;

  Node* node() const noexcept { return node_.get(); }
  const std::shared_ptr<Node>& shared() const noexcept { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

Var parameter(Tensor value);
Var constant(Tensor value);
Var detach(const Var& v);

/// Seeds d(root)/d(root) = seed and accumulates gradients into every
/// reachable node that requires them. root must be a scalar.
void backward(const Var& root, double seed = 1.0);

/// While alive, ops on the current thread record no graph.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled() noexcept;

namespace ops {

// Elementwise.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var affine(const Var& x, double scale, double shift);
Var prelu(const Var& x, const Var& slope);  // slope has shape {1}
Var leaky_relu(const Var& x, double slope);
Var relu(const Var& x);
Var sigmoid(const Var& x);
// Values outside [lo, hi] are pinned and pass no gradient.
Var clamp(const Var& x, double lo, double hi);
Var neg_log(const Var& x);

// Structural, on (C, H, W) maps.
Var concat_channels(const std::vector<Var>& parts);
Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad);
// weight is (in, out, k, k); output side is (n - 1) * stride - 2 * pad + k.
Var conv_transpose2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad);
Var max_pool2(const Var& x);
Var global_avg_pool(const Var& x);           // -> (C, 1, 1)
Var linear(const Var& x, const Var& weight, const Var& bias);  // weight (out, in) -> (out, 1, 1)

// Scalar reductions; all return shape {1}.
Var mean_squared_diff(const Var& a, const Var& b);
Var mean_abs_diff(const Var& a, const Var& b);
Var total_variation(const Var& x);
Var weighted_sum(const std::vector<Var>& scalars, const std::vector<double>& weights);
Var dot(const Var& x, const Tensor& weights);
Var mean(const std::vector<Var>& scalars);

}  // namespace ops
}  // namespace isb::nn
