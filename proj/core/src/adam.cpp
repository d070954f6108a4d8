#include "isb/adam.hpp"

#include <cmath>

#include "isb/error.hpp"

namespace isb {

void round_to_float(const nn::ParameterList& params) {
  for (const auto& p : params) {
    nn::Var v = p.var;
    for (double& x : v.mutable_value().values()) x = round_to_float(x);
  }
}

Adam::Adam(nn::ParameterList params, AdamParams hp) : params_(std::move(params)), hp_(hp) {
  if (!(hp_.learning_rate > 0.0)) fail(ErrorCode::InvalidConfig, "learning rate must be positive");
  if (!(hp_.beta1 >= 0.0 && hp_.beta1 < 1.0 && hp_.beta2 >= 0.0 && hp_.beta2 < 1.0)) {
    fail(ErrorCode::InvalidConfig, "Adam betas must lie in [0, 1)");
  }
  for (const auto& p : params_) {
    m_.emplace_back(p.var.shape());
    v_.emplace_back(p.var.shape());
  }
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    nn::Var var = params_[i].var;
    const nn::Tensor& g = var.grad();
    nn::Tensor& w = var.mutable_value();
    nn::Tensor& m = m_[i];
    nn::Tensor& v = v_[i];
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = round_to_float(hp_.beta1 * m[k] + (1.0 - hp_.beta1) * g[k]);
      v[k] = round_to_float(hp_.beta2 * v[k] + (1.0 - hp_.beta2) * g[k] * g[k]);
      const double update = hp_.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + hp_.epsilon);
      w[k] = round_to_float(w[k] - update);
    }
  }
}

void Adam::export_state(TensorMap& out, const std::string& prefix) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    out[prefix + params_[i].name + ".m"] = m_[i];
    out[prefix + params_[i].name + ".v"] = v_[i];
  }
  out[prefix + "t"] = nn::Tensor::scalar(static_cast<double>(t_));
}

void Adam::import_state(const TensorMap& in, const std::string& prefix) {
  auto fetch = [&](const std::string& name, const nn::Shape& shape) -> const nn::Tensor& {
    auto it = in.find(prefix + name);
    if (it == in.end()) fail(ErrorCode::ShapeMismatch, "optimizer state lacks " + prefix + name);
    if (it->second.shape() != shape) fail(ErrorCode::ShapeMismatch, "optimizer state " + prefix + name + " has wrong shape");
    return it->second;
  };
  std::vector<nn::Tensor> m, v;
  for (const auto& p : params_) {
    m.push_back(fetch(p.name + ".m", p.var.shape()));
    v.push_back(fetch(p.name + ".v", p.var.shape()));
  }
  const double t = fetch("t", {1}).item();
  m_ = std::move(m);
  v_ = std::move(v);
  t_ = static_cast<std::int64_t>(t);
}

}  // namespace isb
