// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/nn/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mcfnet/errors.hpp"
#include "mcfnet/texture.hpp"

namespace mcfnet::nn {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

struct ConvGeometry {
  int channels;  // channels of the image side
  int height, width;
  int kernel, stride, pad;
  int out_h, out_w;  // positions the kernel visits

  Eigen::Index rows() const { return static_cast<Eigen::Index>(channels) * kernel * kernel; }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(out_h) * out_w; }
};

// Unfolds kernel-sized patches of one CxHxW image into a (C*k*k) x (out_h*out_w)
// matrix.
void im2col(const double* img, const ConvGeometry& g, double* col) {
  const std::size_t cols = static_cast<std::size_t>(g.out_h) * g.out_w;
  for (int c = 0; c < g.channels; ++c) {
    const double* plane = img + static_cast<std::size_t>(c) * g.height * g.width;
    for (int ki = 0; ki < g.kernel; ++ki) {
      for (int kj = 0; kj < g.kernel; ++kj) {
        double* row = col + ((static_cast<std::size_t>(c) * g.kernel + ki) * g.kernel + kj) * cols;
        for (int oy = 0; oy < g.out_h; ++oy) {
          double* dst = row + static_cast<std::size_t>(oy) * g.out_w;
          const int iy = oy * g.stride - g.pad + ki;
          if (iy < 0 || iy >= g.height) {
            std::fill(dst, dst + g.out_w, 0.0);
            continue;
          }
          const double* src = plane + static_cast<std::size_t>(iy) * g.width;
          if (g.stride == 1) {
            const int x0 = std::min(std::max(0, g.pad - kj), g.out_w);
            const int x1 = std::min(g.out_w, g.width + g.pad - kj);
            std::fill(dst, dst + x0, 0.0);
            for (int ox = x0; ox < x1; ++ox) dst[ox] = src[ox - g.pad + kj];
            if (x1 < g.out_w) std::fill(dst + std::max(x1, 0), dst + g.out_w, 0.0);
          } else {
            for (int ox = 0; ox < g.out_w; ++ox) {
              const int ix = ox * g.stride - g.pad + kj;
              dst[ox] = (ix >= 0 && ix < g.width) ? src[ix] : 0.0;
            }
          }
        }
      }
    }
  }
}

// Adjoint of im2col: folds patch columns back, accumulating into img.
void col2im(const double* col, const ConvGeometry& g, double* img) {
  const std::size_t cols = static_cast<std::size_t>(g.out_h) * g.out_w;
  for (int c = 0; c < g.channels; ++c) {
    double* plane = img + static_cast<std::size_t>(c) * g.height * g.width;
    for (int ki = 0; ki < g.kernel; ++ki) {
      for (int kj = 0; kj < g.kernel; ++kj) {
        const double* row =
            col + ((static_cast<std::size_t>(c) * g.kernel + ki) * g.kernel + kj) * cols;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * g.stride - g.pad + ki;
          if (iy < 0 || iy >= g.height) continue;
          const double* src = row + static_cast<std::size_t>(oy) * g.out_w;
          double* dst = plane + static_cast<std::size_t>(iy) * g.width;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int ix = ox * g.stride - g.pad + kj;
            if (ix >= 0 && ix < g.width) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

bool is_pointwise(const ConvGeometry& g) { return g.kernel == 1 && g.stride == 1 && g.pad == 0; }

void require_same(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape " + a.shape().str() + " vs " + b.shape().str());
  }
}

void check_bias(const Var& bias, int channels, const char* op) {
  if (bias.defined() && bias.shape() != Shape{1, channels, 1, 1}) {
    throw ShapeError(std::string(op) + ": bias " + bias.shape().str() + " does not match " +
                     std::to_string(channels) + " output channels");
  }
}

void add_bias(Tensor& out, const Var& bias) {
  if (!bias.defined()) return;
  const Shape& s = out.shape();
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double b = bias.value()[c];
      double* p = out.plane(n, c);
      for (std::size_t i = 0; i < s.plane(); ++i) p[i] += b;
    }
  }
}

void accumulate_bias_grad(const Tensor& grad_out, const Var& bias) {
  if (!bias.defined() || !bias.requires_grad()) return;
  Tensor& gb = bias.node()->grad_buffer();
  const Shape& s = grad_out.shape();
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double* p = grad_out.plane(n, c);
      double acc = 0.0;
      for (std::size_t i = 0; i < s.plane(); ++i) acc += p[i];
      gb[c] += acc;
    }
  }
}

template <typename Fwd, typename Bwd>
Var unary(const Var& x, Fwd fwd, Bwd dfdx) {
  Tensor out(x.shape());
  const auto in = x.value().values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = fwd(in[i]);
  return make_result(std::move(out), {x}, [x, dfdx](detail::Node& self) mutable {
    Tensor& gx = x.node()->grad_buffer();
    const auto in = x.value().values();
    const auto y = self.value.values();
    for (std::size_t i = 0; i < in.size(); ++i) gx[i] += self.grad[i] * dfdx(in[i], y[i]);
  });
}

}  // namespace

Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad) {
  const Shape xs = x.shape();
  const Shape ws = weight.shape();
  if (ws.c != xs.c || ws.h != ws.w) {
    throw ShapeError("conv2d: weight " + ws.str() + " incompatible with input " + xs.str());
  }
  check_bias(bias, ws.n, "conv2d");
  const int k = ws.h;
  if (stride < 1 || xs.h + 2 * pad < k || xs.w + 2 * pad < k) {
    throw ShapeError("conv2d: input " + xs.str() + " too small for kernel " + std::to_string(k));
  }
  const ConvGeometry g{xs.c, xs.h, xs.w, k, stride, pad, (xs.h + 2 * pad - k) / stride + 1,
                       (xs.w + 2 * pad - k) / stride + 1};
  const Shape os{xs.n, ws.n, g.out_h, g.out_w};
  Tensor out(os);

  const ConstMatMap wmat(weight.value().data(), ws.n, g.rows());
  std::vector<double> col(is_pointwise(g) ? 0 : static_cast<std::size_t>(g.rows() * g.cols()));
  const std::size_t in_stride = static_cast<std::size_t>(xs.c) * xs.h * xs.w;
  const std::size_t out_stride = static_cast<std::size_t>(os.c) * os.h * os.w;
  for (int n = 0; n < xs.n; ++n) {
    const double* src = x.value().data() + n * in_stride;
    if (!is_pointwise(g)) {
      im2col(src, g, col.data());
      src = col.data();
    }
    MatMap o(out.data() + n * out_stride, os.c, g.cols());
    o.noalias() = wmat * ConstMatMap(src, g.rows(), g.cols());
  }
  add_bias(out, bias);

  std::vector<Var> parents{x, weight};
  if (bias.defined()) parents.push_back(bias);
  return make_result(std::move(out), std::move(parents),
                     [x, weight, bias, g](detail::Node& self) mutable {
    const Shape xs = x.shape();
    const Shape os = self.value.shape();
    const std::size_t in_stride = static_cast<std::size_t>(xs.c) * xs.h * xs.w;
    const std::size_t out_stride = static_cast<std::size_t>(os.c) * os.h * os.w;
    const ConstMatMap wmat(weight.value().data(), os.c, g.rows());
    std::vector<double> col(is_pointwise(g) ? 0 : static_cast<std::size_t>(g.rows() * g.cols()));
    for (int n = 0; n < xs.n; ++n) {
      const ConstMatMap go(self.grad.data() + n * out_stride, os.c, g.cols());
      if (weight.requires_grad()) {
        const double* src = x.value().data() + n * in_stride;
        if (!is_pointwise(g)) {
          im2col(src, g, col.data());
          src = col.data();
        }
        MatMap gw(weight.node()->grad_buffer().data(), os.c, g.rows());
        gw.noalias() += go * ConstMatMap(src, g.rows(), g.cols()).transpose();
      }
      if (x.requires_grad()) {
        double* gx = x.node()->grad_buffer().data() + n * in_stride;
        if (is_pointwise(g)) {
          MatMap(gx, g.rows(), g.cols()).noalias() += wmat.transpose() * go;
        } else {
          MatMap(col.data(), g.rows(), g.cols()).noalias() = wmat.transpose() * go;
          col2im(col.data(), g, gx);
        }
      }
    }
    accumulate_bias_grad(self.grad, bias);
  });
}

Var conv_transpose2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad) {
  const Shape xs = x.shape();
  const Shape ws = weight.shape();
  if (ws.n != xs.c || ws.h != ws.w) {
    throw ShapeError("conv_transpose2d: weight " + ws.str() + " incompatible with input " +
                     xs.str());
  }
  check_bias(bias, ws.c, "conv_transpose2d");
  const int k = ws.h;
  const int out_h = (xs.h - 1) * stride - 2 * pad + k;
  const int out_w = (xs.w - 1) * stride - 2 * pad + k;
  if (stride < 1 || out_h < 1 || out_w < 1) {
    throw ShapeError("conv_transpose2d: empty output for input " + xs.str());
  }
  // The image side of the geometry is the (larger) output.
  const ConvGeometry g{ws.c, out_h, out_w, k, stride, pad, xs.h, xs.w};
  const Shape os{xs.n, ws.c, out_h, out_w};
  Tensor out(os);

  const ConstMatMap wmat(weight.value().data(), ws.n, g.rows());  // in x (out*k*k)
  std::vector<double> col(static_cast<std::size_t>(g.rows() * g.cols()));
  const std::size_t in_stride = static_cast<std::size_t>(xs.c) * xs.h * xs.w;
  const std::size_t out_stride = static_cast<std::size_t>(os.c) * os.h * os.w;
  for (int n = 0; n < xs.n; ++n) {
    const ConstMatMap xin(x.value().data() + n * in_stride, xs.c, g.cols());
    MatMap(col.data(), g.rows(), g.cols()).noalias() = wmat.transpose() * xin;
    col2im(col.data(), g, out.data() + n * out_stride);
  }
  add_bias(out, bias);

  std::vector<Var> parents{x, weight};
  if (bias.defined()) parents.push_back(bias);
  return make_result(std::move(out), std::move(parents),
                     [x, weight, bias, g](detail::Node& self) mutable {
    const Shape xs = x.shape();
    const Shape os = self.value.shape();
    const std::size_t in_stride = static_cast<std::size_t>(xs.c) * xs.h * xs.w;
    const std::size_t out_stride = static_cast<std::size_t>(os.c) * os.h * os.w;
    const ConstMatMap wmat(weight.value().data(), xs.c, g.rows());
    std::vector<double> col(static_cast<std::size_t>(g.rows() * g.cols()));
    for (int n = 0; n < xs.n; ++n) {
      im2col(self.grad.data() + n * out_stride, g, col.data());
      const ConstMatMap gcol(col.data(), g.rows(), g.cols());
      if (weight.requires_grad()) {
        const ConstMatMap xin(x.value().data() + n * in_stride, xs.c, g.cols());
        MatMap gw(weight.node()->grad_buffer().data(), xs.c, g.rows());
        gw.noalias() += xin * gcol.transpose();
      }
      if (x.requires_grad()) {
        MatMap gx(x.node()->grad_buffer().data() + n * in_stride, xs.c, g.cols());
        gx.noalias() += wmat * gcol;
      }
    }
    accumulate_bias_grad(self.grad, bias);
  });
}

Var instance_norm(const Var& x, double eps) {
  const Shape s = x.shape();
  const std::size_t plane = s.plane();
  if (plane == 0) {
    throw ShapeError("instance_norm: empty spatial extent " + s.str());
  }
  Tensor out(s);
  std::vector<double> inv_std(static_cast<std::size_t>(s.n) * s.c);
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double* p = x.value().plane(n, c);
      double mu = 0.0;
      bool constant = true;
      for (std::size_t i = 0; i < plane; ++i) {
        mu += p[i];
        constant = constant && p[i] == p[0];
      }
      // A constant plane normalises to exact zeros.
      mu = constant ? p[0] : mu / static_cast<double>(plane);
      double var = 0.0;
      for (std::size_t i = 0; i < plane; ++i) var += (p[i] - mu) * (p[i] - mu);
      var /= static_cast<double>(plane);
      const double is = 1.0 / std::sqrt(var + eps);
      inv_std[static_cast<std::size_t>(n) * s.c + c] = is;
      double* o = out.plane(n, c);
      for (std::size_t i = 0; i < plane; ++i) o[i] = (p[i] - mu) * is;
    }
  }
  return make_result(std::move(out), {x},
                     [x, inv_std = std::move(inv_std)](detail::Node& self) mutable {
    const Shape s = x.shape();
    const std::size_t plane = s.plane();
    const double inv_m = 1.0 / static_cast<double>(plane);
    Tensor& gx = x.node()->grad_buffer();
    for (int n = 0; n < s.n; ++n) {
      for (int c = 0; c < s.c; ++c) {
        const double* g = self.grad.plane(n, c);
        const double* xhat = self.value.plane(n, c);
        double g_mean = 0.0;
        double gx_mean = 0.0;
        for (std::size_t i = 0; i < plane; ++i) {
          g_mean += g[i];
          gx_mean += g[i] * xhat[i];
        }
        g_mean *= inv_m;
        gx_mean *= inv_m;
        const double is = inv_std[static_cast<std::size_t>(n) * s.c + c];
        double* d = gx.plane(n, c);
        for (std::size_t i = 0; i < plane; ++i) d[i] += is * (g[i] - g_mean - xhat[i] * gx_mean);
      }
    }
  });
}

Var relu(const Var& x) {
  return unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double in, double) { return in > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(const Var& x, double slope) {
  return unary(
      x, [slope](double v) { return v > 0.0 ? v : slope * v; },
      [slope](double in, double) { return in > 0.0 ? 1.0 : slope; });
}

Var sigmoid(const Var& x) {
  return unary(
      x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var abs(const Var& x) {
  return unary(
      x, [](double v) { return std::fabs(v); },
      [](double in, double) { return in > 0.0 ? 1.0 : (in < 0.0 ? -1.0 : 0.0); });
}

Var log_clamped(const Var& x, double eps) {
  const double lo = eps;
  const double hi = 1.0 - eps;
  return unary(
      x, [lo, hi](double v) { return std::log(std::clamp(v, lo, hi)); },
      [lo, hi](double in, double) { return (in > lo && in < hi) ? 1.0 / in : 0.0; });
}

Var add(const Var& a, const Var& b) {
  require_same(a, b, "add");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] + b.value()[i];
  return make_result(std::move(out), {a, b}, [a, b](detail::Node& self) mutable {
    for (const Var* v : {&a, &b}) {
      if (!v->requires_grad()) continue;
      Tensor& g = v->node()->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_same(a, b, "sub");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] - b.value()[i];
  return make_result(std::move(out), {a, b}, [a, b](detail::Node& self) mutable {
    if (a.requires_grad()) {
      Tensor& g = a.node()->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (b.requires_grad()) {
      Tensor& g = b.node()->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same(a, b, "mul");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] * b.value()[i];
  return make_result(std::move(out), {a, b}, [a, b](detail::Node& self) mutable {
    if (a.requires_grad()) {
      Tensor& g = a.node()->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * b.value()[i];
    }
    if (b.requires_grad()) {
      Tensor& g = b.node()->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * a.value()[i];
    }
  });
}

Var scale(const Var& x, double s) {
  return unary(
      x, [s](double v) { return s * v; }, [s](double, double) { return s; });
}

Var add_scalar(const Var& x, double s) {
  return unary(
      x, [s](double v) { return v + s; }, [](double, double) { return 1.0; });
}

Var mean(const Var& x) {
  const auto in = x.value().values();
  if (in.empty()) {
    throw ShapeError("mean: empty tensor");
  }
  double acc = 0.0;
  for (double v : in) acc += v;
  const double inv = 1.0 / static_cast<double>(in.size());
  return make_result(Tensor::scalar(acc * inv), {x}, [x, inv](detail::Node& self) mutable {
    Tensor& g = x.node()->grad_buffer();
    const double d = self.grad[0] * inv;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += d;
  });
}

Var concat_channels(std::span<const Var> parts) {
  if (parts.empty()) {
    throw ShapeError("concat_channels: nothing to concatenate");
  }
  Shape s = parts.front().shape();
  s.c = 0;
  for (const auto& p : parts) {
    const Shape& ps = p.shape();
    if (ps.n != s.n || ps.h != s.h || ps.w != s.w) {
      throw ShapeError("concat_channels: " + ps.str() + " does not match batch/spatial extent of " +
                       parts.front().shape().str());
    }
    s.c += ps.c;
  }
  Tensor out(s);
  const std::size_t plane = s.plane();
  for (int n = 0; n < s.n; ++n) {
    double* dst = out.plane(n, 0);
    for (const auto& p : parts) {
      const std::size_t count = static_cast<std::size_t>(p.shape().c) * plane;
      std::copy_n(p.value().plane(n, 0), count, dst);
      dst += count;
    }
  }
  std::vector<Var> parents(parts.begin(), parts.end());
  return make_result(std::move(out), parents, [parents](detail::Node& self) mutable {
    const Shape& s = self.value.shape();
    const std::size_t plane = s.plane();
    for (int n = 0; n < s.n; ++n) {
      const double* src = self.grad.plane(n, 0);
      for (auto& p : parents) {
        const std::size_t count = static_cast<std::size_t>(p.shape().c) * plane;
        if (p.requires_grad()) {
          double* g = p.node()->grad_buffer().plane(n, 0);
          for (std::size_t i = 0; i < count; ++i) g[i] += src[i];
        }
        src += count;
      }
    }
  });
}

namespace {

struct Taps {
  std::vector<int> lo, hi;
  std::vector<double> frac;
};

Taps bilinear_taps(int in, int out) {
  Taps t;
  t.lo.resize(out);
  t.hi.resize(out);
  t.frac.resize(out);
  const double ratio = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    const double src = std::max(0.0, (i + 0.5) * ratio - 0.5);
    const int lo = std::min(static_cast<int>(src), in - 1);
    t.lo[i] = lo;
    t.hi[i] = std::min(lo + 1, in - 1);
    t.frac[i] = src - lo;
  }
  return t;
}

}  // namespace

Var resize_bilinear(const Var& x, int out_h, int out_w) {
  const Shape s = x.shape();
  if (out_h < 1 || out_w < 1 || s.h < 1 || s.w < 1) {
    throw ShapeError("resize_bilinear: invalid extent " + s.str() + " -> " +
                     std::to_string(out_h) + "x" + std::to_string(out_w));
  }
  if (s.h == out_h && s.w == out_w) {
    return x;
  }
  const Taps ty = bilinear_taps(s.h, out_h);
  const Taps tx = bilinear_taps(s.w, out_w);
  const Shape os{s.n, s.c, out_h, out_w};
  Tensor out(os);
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double* src = x.value().plane(n, c);
      double* dst = out.plane(n, c);
      for (int oy = 0; oy < out_h; ++oy) {
        const double* r0 = src + static_cast<std::size_t>(ty.lo[oy]) * s.w;
        const double* r1 = src + static_cast<std::size_t>(ty.hi[oy]) * s.w;
        const double fy = ty.frac[oy];
        for (int ox = 0; ox < out_w; ++ox) {
          const double fx = tx.frac[ox];
          const double top = r0[tx.lo[ox]] + fx * (r0[tx.hi[ox]] - r0[tx.lo[ox]]);
          const double bot = r1[tx.lo[ox]] + fx * (r1[tx.hi[ox]] - r1[tx.lo[ox]]);
          dst[static_cast<std::size_t>(oy) * out_w + ox] = top + fy * (bot - top);
        }
      }
    }
  }
  return make_result(std::move(out), {x}, [x, ty, tx](detail::Node& self) mutable {
    const Shape s = x.shape();
    const Shape os = self.value.shape();
    Tensor& gx = x.node()->grad_buffer();
    for (int n = 0; n < s.n; ++n) {
      for (int c = 0; c < s.c; ++c) {
        const double* g = self.grad.plane(n, c);
        double* d = gx.plane(n, c);
        for (int oy = 0; oy < os.h; ++oy) {
          double* r0 = d + static_cast<std::size_t>(ty.lo[oy]) * s.w;
          double* r1 = d + static_cast<std::size_t>(ty.hi[oy]) * s.w;
          const double fy = ty.frac[oy];
          for (int ox = 0; ox < os.w; ++ox) {
            const double v = g[static_cast<std::size_t>(oy) * os.w + ox];
            const double fx = tx.frac[ox];
            r0[tx.lo[ox]] += v * (1 - fy) * (1 - fx);
            r0[tx.hi[ox]] += v * (1 - fy) * fx;
            r1[tx.lo[ox]] += v * fy * (1 - fx);
            r1[tx.hi[ox]] += v * fy * fx;
          }
        }
      }
    }
  });
}

Var laplacian(const Var& x) {
  const Shape s = x.shape();
  if (s.h < 3 || s.w < 3) {
    throw ShapeError("laplacian: spatial extent " + s.str() + " is smaller than 3x3");
  }
  Tensor out(s);
  const std::size_t plane = s.plane();
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      mcfnet::detail::laplacian_plane({x.value().plane(n, c), plane}, s.h, s.w,
                                      {out.plane(n, c), plane});
    }
  }
  return make_result(std::move(out), {x}, [x](detail::Node& self) mutable {
    const Shape s = x.shape();
    const std::size_t plane = s.plane();
    Tensor& gx = x.node()->grad_buffer();
    for (int n = 0; n < s.n; ++n) {
      for (int c = 0; c < s.c; ++c) {
        mcfnet::detail::laplacian_plane_adjoint({self.grad.plane(n, c), plane}, s.h, s.w,
                                                {gx.plane(n, c), plane});
      }
    }
  });
}

Var zeros(Shape shape) { return Var::constant(Tensor(shape, 0.0)); }

}  // namespace mcfnet::nn
