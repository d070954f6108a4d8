#include "isb/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "isb/error.hpp"

namespace isb::nn {
namespace {

thread_local bool g_grad_enabled = true;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    fail(ErrorCode::DimensionMismatch,
         std::string(op) + ": " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

void require_rank3(const Tensor& t, const char* op) {
  if (t.rank() != 3) fail(ErrorCode::DimensionMismatch, std::string(op) + ": expected (C,H,W), got " + shape_string(t.shape()));
}

Var make_result(Tensor value, std::vector<Var> inputs, std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (g_grad_enabled) {
    bool needs = std::any_of(inputs.begin(), inputs.end(), [](const Var& v) { return v.requires_grad(); });
    if (needs) {
      node->requires_grad = true;
      node->inputs.reserve(inputs.size());
      for (auto& in : inputs) node->inputs.push_back(in.shared());
      node->backward = std::move(backward_fn);
    }
  }
  return Var(std::move(node));
}

// Valid output range [lo, hi) for index o where i = o * stride + offset must
// land in [0, extent).
struct Range {
  long lo;
  long hi;
};

Range valid_range(long count, long stride, long offset, long extent) {
  long lo = 0;
  if (offset < 0) lo = (-offset + stride - 1) / stride;
  long hi = count;
  // o * stride + offset <= extent - 1
  long max_o = extent - 1 - offset;
  if (max_o < 0) return {0, 0};
  hi = std::min(hi, max_o / stride + 1);
  return {lo, std::max(lo, hi)};
}

}  // namespace

Tensor& Node::ensure_grad() {
  if (grad.shape() != value.shape()) grad = Tensor(value.shape(), 0.0);
  return grad;
}

void Var::zero_grad() const {
  if (node_) node_->grad = Tensor(node_->value.shape(), 0.0);
}

Var parameter(Tensor value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Var(std::move(node));
}

Var constant(Tensor value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

Var detach(const Var& v) { return constant(v.value()); }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() noexcept { return g_grad_enabled; }

void backward(const Var& root, double seed) {
  if (!root.defined()) fail(ErrorCode::InvalidConfig, "backward on undefined Var");
  if (root.value().size() != 1) fail(ErrorCode::ShapeMismatch, "backward root must be scalar");
  if (!root.requires_grad()) return;

  // Iterative DFS post-order gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.node(), 0}};
  seen.insert(root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->ensure_grad()[0] += seed;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward) node->backward(*node);
  }
}

namespace ops {

Var add(const Var& a, const Var& b) {
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  out += b.value();
  return make_result(std::move(out), {a, b}, [](Node& self) {
    for (auto& in : self.inputs)
      if (in->requires_grad) in->ensure_grad() += self.grad;
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a.value(), b.value(), "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return make_result(std::move(out), {a, b}, [](Node& self) {
    if (self.inputs[0]->requires_grad) self.inputs[0]->ensure_grad() += self.grad;
    if (self.inputs[1]->requires_grad) {
      Tensor& g = self.inputs[1]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Var affine(const Var& x, double scale, double shift) {
  Tensor out = x.value();
  for (double& v : out.values()) v = scale * v + shift;
  return make_result(std::move(out), {x}, [scale](Node& self) {
    Tensor& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += scale * self.grad[i];
  });
}

Var prelu(const Var& x, const Var& slope) {
  const double a = slope.value().item();
  Tensor out = x.value();
  for (double& v : out.values())
    if (v < 0) v *= a;
  return make_result(std::move(out), {x, slope}, [a](Node& self) {
    const Tensor& in = self.inputs[0]->value;
    if (self.inputs[0]->requires_grad) {
      Tensor& g = self.inputs[0]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += in[i] < 0 ? a * self.grad[i] : self.grad[i];
    }
    if (self.inputs[1]->requires_grad) {
      double acc = 0.0;
      for (std::size_t i = 0; i < in.size(); ++i)
        if (in[i] < 0) acc += in[i] * self.grad[i];
      self.inputs[1]->ensure_grad()[0] += acc;
    }
  });
}

Var leaky_relu(const Var& x, double slope) {
  Tensor out = x.value();
  for (double& v : out.values())
    if (v < 0) v *= slope;
  return make_result(std::move(out), {x}, [slope](Node& self) {
    const Tensor& in = self.inputs[0]->value;
    Tensor& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += in[i] < 0 ? slope * self.grad[i] : self.grad[i];
  });
}

Var relu(const Var& x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = std::max(v, 0.0);
  return make_result(std::move(out), {x}, [](Node& self) {
    const Tensor& in = self.inputs[0]->value;
    Tensor& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (in[i] > 0) g[i] += self.grad[i];
  });
}

Var sigmoid(const Var& x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  return make_result(std::move(out), {x}, [](Node& self) {
    Tensor& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = self.value[i];
      g[i] += s * (1.0 - s) * self.grad[i];
    }
  });
}

Var clamp(const Var& x, double lo, double hi) {
  Tensor out = x.value();
  for (double& v : out.values()) v = std::clamp(v, lo, hi);
  return make_result(std::move(out), {x}, [lo, hi](Node& self) {
    const Tensor& in = self.inputs[0]->value;
    Tensor& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (in[i] >= lo && in[i] <= hi) g[i] += self.grad[i];
  });
}

Var neg_log(const Var& x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = -std::log(v);
  return make_result(std::move(out), {x}, [](Node& self) {
    const Tensor& in = self.inputs[0]->value;
    Tensor& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i] / in[i];
  });
}

Var concat_channels(const std::vector<Var>& parts) {
  if (parts.empty()) fail(ErrorCode::DimensionMismatch, "concat of zero tensors");
  const Tensor& first = parts.front().value();
  require_rank3(first, "concat_channels");
  std::size_t channels = 0;
  for (const auto& p : parts) {
    require_rank3(p.value(), "concat_channels");
    if (p.value().height() != first.height() || p.value().width() != first.width()) {
      fail(ErrorCode::DimensionMismatch, "concat_channels: " + shape_string(first.shape()) + " vs " +
                                             shape_string(p.value().shape()));
    }
    channels += p.value().channels();
  }
  Tensor out({channels, first.height(), first.width()});
  std::size_t offset = 0;
  for (const auto& p : parts) {
    std::copy(p.value().data(), p.value().data() + p.value().size(), out.data() + offset);
    offset += p.value().size();
  }
  return make_result(std::move(out), parts, [](Node& self) {
    std::size_t off = 0;
    for (auto& in : self.inputs) {
      const std::size_t n = in->value.size();
      if (in->requires_grad) {
        Tensor& g = in->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[off + i];
      }
      off += n;
    }
  });
}

Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad) {
  const Tensor& in = x.value();
  const Tensor& w = weight.value();
  require_rank3(in, "conv2d");
  if (w.rank() != 4 || w.shape()[1] != in.channels() || w.shape()[2] != w.shape()[3]) {
    fail(ErrorCode::DimensionMismatch, "conv2d weight " + shape_string(w.shape()) + " for input " + shape_string(in.shape()));
  }
  const long ci = static_cast<long>(in.channels()), h = static_cast<long>(in.height()), wd = static_cast<long>(in.width());
  const long co = static_cast<long>(w.shape()[0]), k = static_cast<long>(w.shape()[2]);
  const long s = stride, p = pad;
  const long ho = (h + 2 * p - k) / s + 1, wo = (wd + 2 * p - k) / s + 1;
  if (ho < 1 || wo < 1) fail(ErrorCode::DimensionMismatch, "conv2d output would be empty for input " + shape_string(in.shape()));

  Tensor out({static_cast<std::size_t>(co), static_cast<std::size_t>(ho), static_cast<std::size_t>(wo)});
  for (long oc = 0; oc < co; ++oc) {
    double* oplane = out.data() + oc * ho * wo;
    if (bias.defined()) std::fill(oplane, oplane + ho * wo, bias.value()[oc]);
    for (long ic = 0; ic < ci; ++ic) {
      const double* iplane = in.data() + ic * h * wd;
      for (long ky = 0; ky < k; ++ky) {
        const Range ry = valid_range(ho, s, ky - p, h);
        for (long kx = 0; kx < k; ++kx) {
          const double wv = w[((oc * ci + ic) * k + ky) * k + kx];
          const Range rx = valid_range(wo, s, kx - p, wd);
          for (long oy = ry.lo; oy < ry.hi; ++oy) {
            const double* irow = iplane + (oy * s + ky - p) * wd + (kx - p);
            double* orow = oplane + oy * wo;
            for (long ox = rx.lo; ox < rx.hi; ++ox) orow[ox] += wv * irow[ox * s];
          }
        }
      }
    }
  }

  return make_result(std::move(out), {x, weight, bias.defined() ? bias : constant(Tensor())},
                     [ci, h, wd, co, k, s, p, ho, wo](Node& self) {
    const Tensor& in = self.inputs[0]->value;
    const Tensor& w = self.inputs[1]->value;
    const Tensor& gout = self.grad;
    const bool want_x = self.inputs[0]->requires_grad;
    const bool want_w = self.inputs[1]->requires_grad;
    Tensor* gx = want_x ? &self.inputs[0]->ensure_grad() : nullptr;
    Tensor* gw = want_w ? &self.inputs[1]->ensure_grad() : nullptr;
    if (self.inputs[2]->requires_grad) {
      Tensor& gb = self.inputs[2]->ensure_grad();
      for (long oc = 0; oc < co; ++oc) {
        double acc = 0.0;
        const double* g = gout.data() + oc * ho * wo;
        for (long i = 0; i < ho * wo; ++i) acc += g[i];
        gb[oc] += acc;
      }
    }
    if (!want_x && !want_w) return;
    for (long oc = 0; oc < co; ++oc) {
      const double* gplane = gout.data() + oc * ho * wo;
      for (long ic = 0; ic < ci; ++ic) {
        const long ioff = ic * h * wd;
        for (long ky = 0; ky < k; ++ky) {
          const Range ry = valid_range(ho, s, ky - p, h);
          for (long kx = 0; kx < k; ++kx) {
            const long widx = ((oc * ci + ic) * k + ky) * k + kx;
            const double wv = w[widx];
            const Range rx = valid_range(wo, s, kx - p, wd);
            double wacc = 0.0;
            for (long oy = ry.lo; oy < ry.hi; ++oy) {
              const long irow = ioff + (oy * s + ky - p) * wd + (kx - p);
              const double* grow = gplane + oy * wo;
              if (gx) {
                double* gxrow = gx->data() + irow;
                for (long ox = rx.lo; ox < rx.hi; ++ox) gxrow[ox * s] += wv * grow[ox];
              }
              if (gw) {
                const double* xrow = in.data() + irow;
                for (long ox = rx.lo; ox < rx.hi; ++ox) wacc += xrow[ox * s] * grow[ox];
              }
            }
            if (gw) (*gw)[widx] += wacc;
          }
        }
      }
    }
  });
}

Var conv_transpose2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad) {
  const Tensor& in = x.value();
  const Tensor& w = weight.value();
  require_rank3(in, "conv_transpose2d");
  if (w.rank() != 4 || w.shape()[0] != in.channels() || w.shape()[2] != w.shape()[3]) {
    fail(ErrorCode::DimensionMismatch,
         "conv_transpose2d weight " + shape_string(w.shape()) + " for input " + shape_string(in.shape()));
  }
  const long ci = static_cast<long>(in.channels()), h = static_cast<long>(in.height()), wd = static_cast<long>(in.width());
  const long co = static_cast<long>(w.shape()[1]), k = static_cast<long>(w.shape()[2]);
  const long s = stride, p = pad;
  const long ho = (h - 1) * s - 2 * p + k, wo = (wd - 1) * s - 2 * p + k;
  if (ho < 1 || wo < 1) fail(ErrorCode::DimensionMismatch, "conv_transpose2d output would be empty");

  Tensor out({static_cast<std::size_t>(co), static_cast<std::size_t>(ho), static_cast<std::size_t>(wo)});
  for (long oc = 0; oc < co; ++oc) {
    double* oplane = out.data() + oc * ho * wo;
    if (bias.defined()) std::fill(oplane, oplane + ho * wo, bias.value()[oc]);
    for (long ic = 0; ic < ci; ++ic) {
      const double* iplane = in.data() + ic * h * wd;
      for (long ky = 0; ky < k; ++ky) {
        // input row iy feeds output row iy * s + ky - p
        const Range ry = valid_range(h, s, ky - p, ho);
        for (long kx = 0; kx < k; ++kx) {
          const double wv = w[((ic * co + oc) * k + ky) * k + kx];
          const Range rx = valid_range(wd, s, kx - p, wo);
          for (long iy = ry.lo; iy < ry.hi; ++iy) {
            const double* irow = iplane + iy * wd;
            double* orow = oplane + (iy * s + ky - p) * wo + (kx - p);
            for (long ix = rx.lo; ix < rx.hi; ++ix) orow[ix * s] += wv * irow[ix];
          }
        }
      }
    }
  }

  return make_result(std::move(out), {x, weight, bias.defined() ? bias : constant(Tensor())},
                     [ci, h, wd, co, k, s, p, ho, wo](Node& self) {
    const Tensor& in = self.inputs[0]->value;
    const Tensor& w = self.inputs[1]->value;
    const Tensor& gout = self.grad;
    const bool want_x = self.inputs[0]->requires_grad;
    const bool want_w = self.inputs[1]->requires_grad;
    Tensor* gx = want_x ? &self.inputs[0]->ensure_grad() : nullptr;
    Tensor* gw = want_w ? &self.inputs[1]->ensure_grad() : nullptr;
    if (self.inputs[2]->requires_grad) {
      Tensor& gb = self.inputs[2]->ensure_grad();
      for (long oc = 0; oc < co; ++oc) {
        double acc = 0.0;
        const double* g = gout.data() + oc * ho * wo;
        for (long i = 0; i < ho * wo; ++i) acc += g[i];
        gb[oc] += acc;
      }
    }
    if (!want_x && !want_w) return;
    for (long oc = 0; oc < co; ++oc) {
      const double* gplane = gout.data() + oc * ho * wo;
      for (long ic = 0; ic < ci; ++ic) {
        const long ioff = ic * h * wd;
        for (long ky = 0; ky < k; ++ky) {
          const Range ry = valid_range(h, s, ky - p, ho);
          for (long kx = 0; kx < k; ++kx) {
            const long widx = ((ic * co + oc) * k + ky) * k + kx;
            const double wv = w[widx];
            const Range rx = valid_range(wd, s, kx - p, wo);
            double wacc = 0.0;
            for (long iy = ry.lo; iy < ry.hi; ++iy) {
              const double* grow = gplane + (iy * s + ky - p) * wo + (kx - p);
              if (gx) {
                double* gxrow = gx->data() + ioff + iy * wd;
                for (long ix = rx.lo; ix < rx.hi; ++ix) gxrow[ix] += wv * grow[ix * s];
              }
              if (gw) {
                const double* xrow = in.data() + ioff + iy * wd;
                for (long ix = rx.lo; ix < rx.hi; ++ix) wacc += xrow[ix] * grow[ix * s];
              }
            }
            if (gw) (*gw)[widx] += wacc;
          }
        }
      }
    }
  });
}

Var max_pool2(const Var& x) {
  const Tensor& in = x.value();
  require_rank3(in, "max_pool2");
  const std::size_t c = in.channels(), h = in.height() / 2, w = in.width() / 2;
  if (h == 0 || w == 0) fail(ErrorCode::DimensionMismatch, "max_pool2 on " + shape_string(in.shape()));
  Tensor out({c, h, w});
  std::vector<std::size_t> argmax(out.size());
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t xx = 0; xx < w; ++xx) {
        std::size_t best = (ch * in.height() + 2 * y) * in.width() + 2 * xx;
        for (std::size_t dy = 0; dy < 2; ++dy)
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (ch * in.height() + 2 * y + dy) * in.width() + 2 * xx + dx;
            if (in[idx] > in[best]) best = idx;
          }
        const std::size_t o = (ch * h + y) * w + xx;
        out[o] = in[best];
        argmax[o] = best;
      }
  return make_result(std::move(out), {x}, [argmax = std::move(argmax)](Node& self) {
    Tensor& g = self.inputs[0]->ensure_grad();
    for (std::size_t o = 0; o < argmax.size(); ++o) g[argmax[o]] += self.grad[o];
  });
}

Var global_avg_pool(const Var& x) {
  const Tensor& in = x.value();
  require_rank3(in, "global_avg_pool");
  const std::size_t c = in.channels(), hw = in.height() * in.width();
  Tensor out({c, 1, 1});
  for (std::size_t ch = 0; ch < c; ++ch) {
    double acc = 0.0;
    for (std::size_t i = 0; i < hw; ++i) acc += in[ch * hw + i];
    out[ch] = acc / static_cast<double>(hw);
  }
  return make_result(std::move(out), {x}, [c, hw](Node& self) {
    Tensor& g = self.inputs[0]->ensure_grad();
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double v = self.grad[ch] / static_cast<double>(hw);
      for (std::size_t i = 0; i < hw; ++i) g[ch * hw + i] += v;
    }
  });
}

Var linear(const Var& x, const Var& weight, const Var& bias) {
  const Tensor& in = x.value();
  const Tensor& w = weight.value();
  if (w.rank() != 2 || w.shape()[1] != in.size()) {
    fail(ErrorCode::DimensionMismatch, "linear weight " + shape_string(w.shape()) + " for input " + shape_string(in.shape()));
  }
  const std::size_t n_out = w.shape()[0], n_in = w.shape()[1];
  Tensor out({n_out, 1, 1});
  for (std::size_t o = 0; o < n_out; ++o) {
    double acc = bias.defined() ? bias.value()[o] : 0.0;
    for (std::size_t i = 0; i < n_in; ++i) acc += w[o * n_in + i] * in[i];
    out[o] = acc;
  }
  return make_result(std::move(out), {x, weight, bias.defined() ? bias : constant(Tensor())}, [n_out, n_in](Node& self) {
    const Tensor& in = self.inputs[0]->value;
    const Tensor& w = self.inputs[1]->value;
    if (self.inputs[0]->requires_grad) {
      Tensor& g = self.inputs[0]->ensure_grad();
      for (std::size_t o = 0; o < n_out; ++o)
        for (std::size_t i = 0; i < n_in; ++i) g[i] += w[o * n_in + i] * self.grad[o];
    }
    if (self.inputs[1]->requires_grad) {
      Tensor& g = self.inputs[1]->ensure_grad();
      for (std::size_t o = 0; o < n_out; ++o)
        for (std::size_t i = 0; i < n_in; ++i) g[o * n_in + i] += in[i] * self.grad[o];
    }
    if (self.inputs[2]->requires_grad) {
      Tensor& g = self.inputs[2]->ensure_grad();
      for (std::size_t o = 0; o < n_out; ++o) g[o] += self.grad[o];
    }
  });
}

Var mean_squared_diff(const Var& a, const Var& b) {
  require_same_shape(a.value(), b.value(), "mean_squared_diff");
  const std::size_t n = a.value().size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.value()[i] - b.value()[i];
    acc += d * d;
  }
  return make_result(Tensor::scalar(acc / static_cast<double>(n)), {a, b}, [n](Node& self) {
    const Tensor& va = self.inputs[0]->value;
    const Tensor& vb = self.inputs[1]->value;
    const double scale = 2.0 * self.grad[0] / static_cast<double>(n);
    for (int side = 0; side < 2; ++side) {
      if (!self.inputs[side]->requires_grad) continue;
      Tensor& g = self.inputs[side]->ensure_grad();
      const double sign = side == 0 ? 1.0 : -1.0;
      for (std::size_t i = 0; i < n; ++i) g[i] += sign * scale * (va[i] - vb[i]);
    }
  });
}

Var mean_abs_diff(const Var& a, const Var& b) {
  require_same_shape(a.value(), b.value(), "mean_abs_diff");
  const std::size_t n = a.value().size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::abs(a.value()[i] - b.value()[i]);
  return make_result(Tensor::scalar(acc / static_cast<double>(n)), {a, b}, [n](Node& self) {
    const Tensor& va = self.inputs[0]->value;
    const Tensor& vb = self.inputs[1]->value;
    const double scale = self.grad[0] / static_cast<double>(n);
    for (int side = 0; side < 2; ++side) {
      if (!self.inputs[side]->requires_grad) continue;
      Tensor& g = self.inputs[side]->ensure_grad();
      const double sign = side == 0 ? 1.0 : -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = va[i] - vb[i];
        if (d != 0.0) g[i] += sign * scale * (d > 0 ? 1.0 : -1.0);
      }
    }
  });
}

// Isotropic TV: per channel, sqrt(dy^2 + dx^2) with forward differences that
// vanish past the last row/column; summed over channels, divided by H*W.
Var total_variation(const Var& x) {
  const Tensor& in = x.value();
  require_rank3(in, "total_variation");
  const std::size_t c = in.channels(), h = in.height(), w = in.width();
  double acc = 0.0;
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t xx = 0; xx < w; ++xx) {
        const double v = in.at(ch, y, xx);
        const double dy = y + 1 < h ? in.at(ch, y + 1, xx) - v : 0.0;
        const double dx = xx + 1 < w ? in.at(ch, y, xx + 1) - v : 0.0;
        acc += std::sqrt(dy * dy + dx * dx);
      }
  const double norm = static_cast<double>(h * w);
  return make_result(Tensor::scalar(acc / norm), {x}, [c, h, w, norm](Node& self) {
    const Tensor& in = self.inputs[0]->value;
    Tensor& g = self.inputs[0]->ensure_grad();
    const double scale = self.grad[0] / norm;
    for (std::size_t ch = 0; ch < c; ++ch)
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t xx = 0; xx < w; ++xx) {
          const double v = in.at(ch, y, xx);
          const double dy = y + 1 < h ? in.at(ch, y + 1, xx) - v : 0.0;
          const double dx = xx + 1 < w ? in.at(ch, y, xx + 1) - v : 0.0;
          const double mag = std::sqrt(dy * dy + dx * dx);
          if (mag == 0.0) continue;  // subgradient 0 at the kink
          const double f = scale / mag;
          if (y + 1 < h) {
            g.at(ch, y + 1, xx) += f * dy;
            g.at(ch, y, xx) -= f * dy;
          }
          if (xx + 1 < w) {
            g.at(ch, y, xx + 1) += f * dx;
            g.at(ch, y, xx) -= f * dx;
          }
        }
  });
}

Var weighted_sum(const std::vector<Var>& scalars, const std::vector<double>& weights) {
  if (scalars.size() != weights.size()) fail(ErrorCode::DimensionMismatch, "weighted_sum: weight count mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < scalars.size(); ++i) acc += weights[i] * scalars[i].value().item();
  return make_result(Tensor::scalar(acc), scalars, [weights](Node& self) {
    for (std::size_t i = 0; i < self.inputs.size(); ++i)
      if (self.inputs[i]->requires_grad) self.inputs[i]->ensure_grad()[0] += weights[i] * self.grad[0];
  });
}

Var dot(const Var& x, const Tensor& weights) {
  require_same_shape(x.value(), weights, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += x.value()[i] * weights[i];
  return make_result(Tensor::scalar(acc), {x}, [weights](Node& self) {
    Tensor& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += weights[i] * self.grad[0];
  });
}

Var mean(const std::vector<Var>& scalars) {
  if (scalars.empty()) fail(ErrorCode::EmptySequence, "mean of zero values");
  return weighted_sum(scalars, std::vector<double>(scalars.size(), 1.0 / static_cast<double>(scalars.size())));
}

}  // namespace ops
}  // namespace isb::nn
