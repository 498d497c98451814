// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/nn/ops.hpp"

#include <algorithm>
#include <cmath>

namespace evf::nn {
namespace {

struct AxisView {
  Eigen::Index outer = 1, n = 1, inner = 1;
};

AxisView axis_view(const Shape& s, Eigen::Index axis) {
  AxisView v;
  for (Eigen::Index i = 0; i < axis; ++i) v.outer *= s[static_cast<std::size_t>(i)];
  v.n = s[static_cast<std::size_t>(axis)];
  for (std::size_t i = static_cast<std::size_t>(axis) + 1; i < s.size(); ++i) v.inner *= s[i];
  return v;
}

void check_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.value().shape() != b.value().shape()) throw Error(std::string(op) + ": shape mismatch");
}

Tensor unary(const Var& a, const std::function<double(double)>& f) {
  Tensor out(a.shape());
  out.a() = a.value().a().unaryExpr(f);
  return out;
}

}  // namespace

Var constant(Tensor t) { return Var(std::move(t), false); }

Var detach(const Var& a) { return Var(a.value(), false); }

Var add(const Var& a, const Var& b) {
  check_same_shape(a, b, "add");
  Tensor out(a.shape());
  out.a() = a.value().a() + b.value().a();
  return make_op(std::move(out), {a, b}, [](const Var& g) -> std::vector<Var> { return {g, g}; });
}

Var add_rowvec(const Var& x, const Var& b) {
  if (x.value().rank() != 2 || b.value().rank() != 1 || x.value().dim(1) != b.size())
    throw Error("add_rowvec: shape mismatch");
  const Eigen::Index n = x.value().dim(0), f = x.value().dim(1);
  Tensor out({n, f});
  out.m(n, f) = x.value().m(n, f).rowwise() + b.value().m(1, f).row(0);
  return make_op(std::move(out), {x, b}, [](const Var& g) -> std::vector<Var> {
    return {g, sum_axis(g, 0)};
  });
}

Var sub(const Var& a, const Var& b) {
  check_same_shape(a, b, "sub");
  Tensor out(a.shape());
  out.a() = a.value().a() - b.value().a();
  return make_op(std::move(out), {a, b},
                 [](const Var& g) -> std::vector<Var> { return {g, neg(g)}; });
}

Var neg(const Var& a) {
  Tensor out(a.shape());
  out.a() = -a.value().a();
  return make_op(std::move(out), {a}, [](const Var& g) -> std::vector<Var> { return {neg(g)}; });
}

Var mul(const Var& a, const Var& b) {
  check_same_shape(a, b, "mul");
  Tensor out(a.shape());
  out.a() = a.value().a() * b.value().a();
  return make_op(std::move(out), {a, b}, [a, b](const Var& g) -> std::vector<Var> {
    return {mul(g, b), mul(g, a)};
  });
}

Var div(const Var& a, const Var& b) {
  check_same_shape(a, b, "div");
  Tensor out(a.shape());
  out.a() = a.value().a() / b.value().a();
  return make_op(std::move(out), {a, b}, [a, b](const Var& g) -> std::vector<Var> {
    return {div(g, b), neg(div(mul(g, a), mul(b, b)))};
  });
}

Var scale(const Var& a, double c) {
  Tensor out(a.shape());
  out.a() = a.value().a() * c;
  return make_op(std::move(out), {a},
                 [c](const Var& g) -> std::vector<Var> { return {scale(g, c)}; });
}

Var add_scalar(const Var& a, double c) {
  Tensor out(a.shape());
  out.a() = a.value().a() + c;
  return make_op(std::move(out), {a}, [](const Var& g) -> std::vector<Var> { return {g}; });
}

Var exp_v(const Var& a) {
  Tensor out(a.shape());
  out.a() = a.value().a().exp();
  return make_op(std::move(out), {a}, [a](const Var& g) -> std::vector<Var> {
    return {mul(g, exp_v(a))};
  });
}

Var log_v(const Var& a) {
  Tensor out(a.shape());
  out.a() = a.value().a().log();
  return make_op(std::move(out), {a},
                 [a](const Var& g) -> std::vector<Var> { return {div(g, a)}; });
}

Var sqrt_v(const Var& a) {
  Tensor out(a.shape());
  out.a() = a.value().a().sqrt();
  return make_op(std::move(out), {a}, [a](const Var& g) -> std::vector<Var> {
    return {scale(div(g, sqrt_v(a)), 0.5)};
  });
}

Var recip(const Var& a) {
  Tensor out(a.shape());
  out.a() = a.value().a().inverse();
  return make_op(std::move(out), {a}, [a](const Var& g) -> std::vector<Var> {
    return {neg(div(g, mul(a, a)))};
  });
}

Var tanh_v(const Var& a) {
  Tensor out(a.shape());
  out.a() = a.value().a().tanh();
  return make_op(std::move(out), {a}, [a](const Var& g) -> std::vector<Var> {
    Var t = tanh_v(a);
    return {mul(g, add_scalar(neg(mul(t, t)), 1.0))};
  });
}

Var sigmoid_v(const Var& a) {
  Tensor out = unary(a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
  return make_op(std::move(out), {a}, [a](const Var& g) -> std::vector<Var> {
    Var s = sigmoid_v(a);
    return {mul(g, mul(s, add_scalar(neg(s), 1.0)))};
  });
}

namespace {

// Gradient mask recomputed from the saved input; a.e. exact for the
// piecewise-linear activations.
Tensor slope_mask(const Var& a, double alpha) {
  Tensor mask(a.shape());
  mask.a() = (a.value().a() > 0.0)
                 .select(Eigen::ArrayXd::Constant(a.size(), 1.0),
                         Eigen::ArrayXd::Constant(a.size(), alpha));
  return mask;
}

}  // namespace

Var relu(const Var& a) {
  Tensor out(a.shape());
  out.a() = a.value().a().max(0.0);
  return make_op(std::move(out), {a}, [a](const Var& g) -> std::vector<Var> {
    return {apply_mask(g, slope_mask(a, 0.0))};
  });
}

Var leaky_relu(const Var& a, double alpha) {
  Tensor out(a.shape());
  out.a() = (a.value().a() > 0.0).select(a.value().a(), alpha * a.value().a());
  return make_op(std::move(out), {a}, [a, alpha](const Var& g) -> std::vector<Var> {
    return {apply_mask(g, slope_mask(a, alpha))};
  });
}

Var apply_mask(const Var& a, Tensor mask) {
  if (a.value().shape() != mask.shape()) throw Error("apply_mask: shape mismatch");
  Tensor out(a.shape());
  out.a() = a.value().a() * mask.a();
  return make_op(std::move(out), {a}, [mask](const Var& g) -> std::vector<Var> {
    return {apply_mask(g, mask)};
  });
}

Var reshape(const Var& a, Shape shape) {
  Shape orig = a.shape();
  Tensor out = a.value().reshaped(std::move(shape));
  return make_op(std::move(out), {a}, [orig](const Var& g) -> std::vector<Var> {
    return {reshape(g, orig)};
  });
}

Var expand(const Var& a, Eigen::Index axis, Eigen::Index n) {
  Shape shape = a.shape();
  if (axis < 0 || axis > a.value().rank()) throw Error("expand: bad axis");
  shape.insert(shape.begin() + axis, n);
  AxisView v = axis_view(shape, axis);
  Tensor out(shape);
  const double* src = a.value().data();
  double* dst = out.data();
  for (Eigen::Index o = 0; o < v.outer; ++o)
    for (Eigen::Index r = 0; r < v.n; ++r)
      std::copy(src + o * v.inner, src + (o + 1) * v.inner, dst + (o * v.n + r) * v.inner);
  return make_op(std::move(out), {a}, [axis](const Var& g) -> std::vector<Var> {
    return {sum_axis(g, axis)};
  });
}

Var sum_axis(const Var& a, Eigen::Index axis) {
  if (axis < 0 || axis >= a.value().rank()) throw Error("sum_axis: bad axis");
  Shape shape = a.shape();
  AxisView v = axis_view(shape, axis);
  Eigen::Index n = v.n;
  shape.erase(shape.begin() + axis);
  Tensor out(shape);
  const double* src = a.value().data();
  double* dst = out.data();
  for (Eigen::Index o = 0; o < v.outer; ++o) {
    Eigen::Map<Eigen::ArrayXd> acc(dst + o * v.inner, v.inner);
    for (Eigen::Index r = 0; r < v.n; ++r)
      acc += Eigen::Map<const Eigen::ArrayXd>(src + (o * v.n + r) * v.inner, v.inner);
  }
  return make_op(std::move(out), {a}, [axis, n](const Var& g) -> std::vector<Var> {
    return {expand(g, axis, n)};
  });
}

Var sum_all(const Var& a) {
  Shape orig = a.shape();
  Tensor out = Tensor::scalar(a.value().a().sum());
  return make_op(std::move(out), {a}, [orig](const Var& g) -> std::vector<Var> {
    return {bcast_scalar(g, orig)};
  });
}

Var mean_all(const Var& a) {
  return scale(sum_all(a), 1.0 / static_cast<double>(a.size()));
}

Var bcast_scalar(const Var& a, Shape shape) {
  if (a.size() != 1) throw Error("bcast_scalar: input must be scalar");
  Tensor out = Tensor::full(std::move(shape), a.value()[0]);
  return make_op(std::move(out), {a}, [](const Var& g) -> std::vector<Var> {
    return {sum_all(g)};
  });
}

Var narrow(const Var& a, Eigen::Index axis, Eigen::Index start, Eigen::Index len) {
  const Shape& s = a.shape();
  if (axis < 0 || axis >= a.value().rank()) throw Error("narrow: bad axis");
  AxisView v = axis_view(s, axis);
  if (start < 0 || len < 0 || start + len > v.n) throw Error("narrow: range out of bounds");
  Shape shape = s;
  shape[static_cast<std::size_t>(axis)] = len;
  Tensor out(shape);
  const double* src = a.value().data();
  double* dst = out.data();
  for (Eigen::Index o = 0; o < v.outer; ++o)
    std::copy(src + (o * v.n + start) * v.inner, src + (o * v.n + start + len) * v.inner,
              dst + o * len * v.inner);
  Eigen::Index after = v.n - start - len;
  return make_op(std::move(out), {a}, [axis, start, after](const Var& g) -> std::vector<Var> {
    return {pad_axis(g, axis, start, after)};
  });
}

Var pad_axis(const Var& a, Eigen::Index axis, Eigen::Index before, Eigen::Index after) {
  const Shape& s = a.shape();
  if (axis < 0 || axis >= a.value().rank()) throw Error("pad_axis: bad axis");
  if (before < 0 || after < 0) throw Error("pad_axis: negative padding");
  AxisView v = axis_view(s, axis);
  Shape shape = s;
  shape[static_cast<std::size_t>(axis)] = v.n + before + after;
  Tensor out(shape);
  const double* src = a.value().data();
  double* dst = out.data();
  Eigen::Index out_n = v.n + before + after;
  for (Eigen::Index o = 0; o < v.outer; ++o)
    std::copy(src + o * v.n * v.inner, src + (o + 1) * v.n * v.inner,
              dst + (o * out_n + before) * v.inner);
  Eigen::Index len = v.n;
  return make_op(std::move(out), {a}, [axis, before, len](const Var& g) -> std::vector<Var> {
    return {narrow(g, axis, before, len)};
  });
}

Var cat(const std::vector<Var>& parts, Eigen::Index axis) {
  if (parts.empty()) throw Error("cat: no parts");
  const Shape& s0 = parts[0].shape();
  if (axis < 0 || axis >= parts[0].value().rank()) throw Error("cat: bad axis");
  Shape shape = s0;
  Eigen::Index total = 0;
  std::vector<Eigen::Index> lens;
  for (const Var& p : parts) {
    Shape ps = p.shape();
    ps[static_cast<std::size_t>(axis)] = 0;
    Shape ss = s0;
    ss[static_cast<std::size_t>(axis)] = 0;
    if (ps != ss) throw Error("cat: incompatible part shapes");
    lens.push_back(p.shape()[static_cast<std::size_t>(axis)]);
    total += lens.back();
  }
  shape[static_cast<std::size_t>(axis)] = total;
  AxisView v = axis_view(shape, axis);
  Tensor out(shape);
  double* dst = out.data();
  Eigen::Index offset = 0;
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    const double* src = parts[pi].value().data();
    Eigen::Index n = lens[pi];
    for (Eigen::Index o = 0; o < v.outer; ++o)
      std::copy(src + o * n * v.inner, src + (o + 1) * n * v.inner,
                dst + (o * total + offset) * v.inner);
    offset += n;
  }
  return make_op(std::move(out), parts, [axis, lens](const Var& g) -> std::vector<Var> {
    std::vector<Var> gs;
    Eigen::Index offset = 0;
    for (Eigen::Index n : lens) {
      gs.push_back(narrow(g, axis, offset, n));
      offset += n;
    }
    return gs;
  });
}

Var permute(const Var& a, std::vector<Eigen::Index> axes) {
  const Shape& s = a.shape();
  const Eigen::Index r = a.value().rank();
  if (static_cast<Eigen::Index>(axes.size()) != r) throw Error("permute: rank mismatch");
  Shape shape(axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i) shape[i] = s[static_cast<std::size_t>(axes[i])];

  std::vector<Eigen::Index> in_strides(static_cast<std::size_t>(r), 1);
  for (Eigen::Index i = r - 2; i >= 0; --i)
    in_strides[static_cast<std::size_t>(i)] =
        in_strides[static_cast<std::size_t>(i + 1)] * s[static_cast<std::size_t>(i + 1)];

  Tensor out(shape);
  const double* src = a.value().data();
  double* dst = out.data();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(r), 0);
  const Eigen::Index total = out.size();
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index src_flat = 0;
    for (Eigen::Index i = 0; i < r; ++i)
      src_flat += idx[static_cast<std::size_t>(i)] *
                  in_strides[static_cast<std::size_t>(axes[static_cast<std::size_t>(i)])];
    dst[flat] = src[src_flat];
    for (Eigen::Index i = r - 1; i >= 0; --i) {
      if (++idx[static_cast<std::size_t>(i)] < shape[static_cast<std::size_t>(i)]) break;
      idx[static_cast<std::size_t>(i)] = 0;
    }
  }

  std::vector<Eigen::Index> inverse(axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i) inverse[static_cast<std::size_t>(axes[i])] = i;
  return make_op(std::move(out), {a}, [inverse](const Var& g) -> std::vector<Var> {
    return {permute(g, inverse)};
  });
}

Var flip(const Var& a, Eigen::Index axis) {
  const Shape& s = a.shape();
  if (axis < 0 || axis >= a.value().rank()) throw Error("flip: bad axis");
  AxisView v = axis_view(s, axis);
  Tensor out(s);
  const double* src = a.value().data();
  double* dst = out.data();
  for (Eigen::Index o = 0; o < v.outer; ++o)
    for (Eigen::Index r = 0; r < v.n; ++r)
      std::copy(src + (o * v.n + r) * v.inner, src + (o * v.n + r + 1) * v.inner,
                dst + (o * v.n + (v.n - 1 - r)) * v.inner);
  return make_op(std::move(out), {a}, [axis](const Var& g) -> std::vector<Var> {
    return {flip(g, axis)};
  });
}

Var transpose2d(const Var& a) {
  if (a.value().rank() != 2) throw Error("transpose2d: rank must be 2");
  const Eigen::Index m = a.value().dim(0), n = a.value().dim(1);
  Tensor out({n, m});
  out.m(n, m) = a.value().m(m, n).transpose();
  return make_op(std::move(out), {a}, [](const Var& g) -> std::vector<Var> {
    return {transpose2d(g)};
  });
}

Var matmul(const Var& a, const Var& b) {
  if (a.value().rank() != 2 || b.value().rank() != 2) throw Error("matmul: rank must be 2");
  const Eigen::Index m = a.value().dim(0), k = a.value().dim(1);
  const Eigen::Index k2 = b.value().dim(0), n = b.value().dim(1);
  if (k != k2) throw Error("matmul: inner dimension mismatch");
  Tensor out({m, n});
  out.m(m, n).noalias() = a.value().m(m, k) * b.value().m(k, n);
  return make_op(std::move(out), {a, b}, [a, b](const Var& g) -> std::vector<Var> {
    return {matmul(g, transpose2d(b)), matmul(transpose2d(a), g)};
  });
}

Var gather_flat(const Var& a, IndexList idx, Shape out_shape) {
  if (static_cast<Eigen::Index>(idx->size()) != shape_size(out_shape))
    throw Error("gather_flat: index count does not match output shape");
  Tensor out(out_shape);
  const double* src = a.value().data();
  double* dst = out.data();
  const Eigen::Index limit = a.size();
  for (std::size_t i = 0; i < idx->size(); ++i) {
    Eigen::Index j = (*idx)[i];
    if (j < 0 || j >= limit) throw Error("gather_flat: index out of range");
    dst[i] = src[j];
  }
  Shape in_shape = a.shape();
  return make_op(std::move(out), {a}, [idx, in_shape](const Var& g) -> std::vector<Var> {
    return {scatter_flat(g, idx, in_shape)};
  });
}

Var scatter_flat(const Var& a, IndexList idx, Shape out_shape) {
  if (static_cast<Eigen::Index>(idx->size()) != a.size())
    throw Error("scatter_flat: index count does not match input size");
  Tensor out(out_shape);
  double* dst = out.data();
  const Eigen::Index limit = out.size();
  for (std::size_t i = 0; i < idx->size(); ++i) {
    Eigen::Index j = (*idx)[i];
    if (j < 0 || j >= limit) throw Error("scatter_flat: index out of range");
    dst[j] += a.value()[static_cast<Eigen::Index>(i)];
  }
  Shape in_shape = a.shape();
  return make_op(std::move(out), {a}, [idx, in_shape](const Var& g) -> std::vector<Var> {
    return {gather_flat(g, idx, in_shape)};
  });
}

// ---- convolution plumbing --------------------------------------------------

namespace {

Eigen::Index eff_kernel(Eigen::Index k, Eigen::Index dil) { return (k - 1) * dil + 1; }

void same_pads(Eigen::Index in, Eigen::Index stride, Eigen::Index eff_k, Eigen::Index* out,
               Eigen::Index* pad_lo, Eigen::Index* pad_hi) {
  *out = (in + stride - 1) / stride;
  Eigen::Index total = std::max<Eigen::Index>((*out - 1) * stride + eff_k - in, 0);
  *pad_lo = total / 2;
  *pad_hi = total - *pad_lo;
}

}  // namespace

Conv1dGeom Conv1dGeom::make(Eigen::Index batch, Eigen::Index in_len, Eigen::Index channels,
                            Eigen::Index k, Eigen::Index stride, Eigen::Index dilation,
                            Padding pad) {
  Conv1dGeom g{batch, in_len, channels, k, stride, dilation, 0, 0, 0};
  const Eigen::Index ek = eff_kernel(k, dilation);
  if (pad == Padding::kSame) {
    same_pads(in_len, stride, ek, &g.out_len, &g.pad_l, &g.pad_r);
  } else {
    if (in_len < ek) throw Error("conv1d: input shorter than kernel");
    g.out_len = (in_len - ek) / stride + 1;
  }
  return g;
}

Conv2dGeom Conv2dGeom::make(Eigen::Index batch, Eigen::Index in_h, Eigen::Index in_w,
                            Eigen::Index channels, Eigen::Index kh, Eigen::Index kw,
                            Eigen::Index stride_h, Eigen::Index stride_w, Eigen::Index dil_h,
                            Eigen::Index dil_w, Padding pad) {
  Conv2dGeom g{batch, in_h, in_w, channels, kh, kw, stride_h, stride_w,
               dil_h, dil_w, 0,  0,    0,  0,  0,        0};
  const Eigen::Index ekh = eff_kernel(kh, dil_h), ekw = eff_kernel(kw, dil_w);
  if (pad == Padding::kSame) {
    same_pads(in_h, stride_h, ekh, &g.out_h, &g.pad_t, &g.pad_b);
    same_pads(in_w, stride_w, ekw, &g.out_w, &g.pad_l, &g.pad_r);
  } else {
    if (in_h < ekh || in_w < ekw) throw Error("conv2d: input smaller than kernel");
    g.out_h = (in_h - ekh) / stride_h + 1;
    g.out_w = (in_w - ekw) / stride_w + 1;
  }
  return g;
}

namespace {

// Walks the (patch row, patch column, image position) correspondence once;
// im2col and col2im are exact adjoints because they share this enumeration.
template <class Fn>
void walk_conv1d(const Conv1dGeom& g, Fn&& fn) {
  for (Eigen::Index b = 0; b < g.batch; ++b)
    for (Eigen::Index ol = 0; ol < g.out_len; ++ol) {
      const Eigen::Index row = b * g.out_len + ol;
      for (Eigen::Index k = 0; k < g.k; ++k) {
        const Eigen::Index src = ol * g.stride + k * g.dilation - g.pad_l;
        if (src < 0 || src >= g.in_len) continue;
        fn(row * (g.k * g.channels) + k * g.channels, (b * g.in_len + src) * g.channels);
      }
    }
}

template <class Fn>
void walk_conv2d(const Conv2dGeom& g, Fn&& fn) {
  const Eigen::Index cols_per_row = g.kh * g.kw * g.channels;
  for (Eigen::Index b = 0; b < g.batch; ++b)
    for (Eigen::Index oh = 0; oh < g.out_h; ++oh)
      for (Eigen::Index ow = 0; ow < g.out_w; ++ow) {
        const Eigen::Index row = (b * g.out_h + oh) * g.out_w + ow;
        for (Eigen::Index kh = 0; kh < g.kh; ++kh) {
          const Eigen::Index sh = oh * g.stride_h + kh * g.dil_h - g.pad_t;
          if (sh < 0 || sh >= g.in_h) continue;
          for (Eigen::Index kw = 0; kw < g.kw; ++kw) {
            const Eigen::Index sw = ow * g.stride_w + kw * g.dil_w - g.pad_l;
            if (sw < 0 || sw >= g.in_w) continue;
            fn(row * cols_per_row + (kh * g.kw + kw) * g.channels,
               ((b * g.in_h + sh) * g.in_w + sw) * g.channels);
          }
        }
      }
}

}  // namespace

Var im2col1d(const Var& a, const Conv1dGeom& g) {
  if (a.shape() != Shape{g.batch, g.in_len, g.channels}) throw Error("im2col1d: shape mismatch");
  Tensor out({g.batch * g.out_len, g.k * g.channels});
  const double* src = a.value().data();
  double* dst = out.data();
  const Eigen::Index c = g.channels;
  walk_conv1d(g, [&](Eigen::Index col_off, Eigen::Index img_off) {
    std::copy(src + img_off, src + img_off + c, dst + col_off);
  });
  Conv1dGeom geom = g;
  return make_op(std::move(out), {a}, [geom](const Var& gr) -> std::vector<Var> {
    return {col2im1d(gr, geom)};
  });
}

Var col2im1d(const Var& a, const Conv1dGeom& g) {
  if (a.shape() != Shape{g.batch * g.out_len, g.k * g.channels})
    throw Error("col2im1d: shape mismatch");
  Tensor out({g.batch, g.in_len, g.channels});
  const double* src = a.value().data();
  double* dst = out.data();
  const Eigen::Index c = g.channels;
  walk_conv1d(g, [&](Eigen::Index col_off, Eigen::Index img_off) {
    Eigen::Map<Eigen::ArrayXd>(dst + img_off, c) +=
        Eigen::Map<const Eigen::ArrayXd>(src + col_off, c);
  });
  Conv1dGeom geom = g;
  return make_op(std::move(out), {a}, [geom](const Var& gr) -> std::vector<Var> {
    return {im2col1d(gr, geom)};
  });
}

Var im2col2d(const Var& a, const Conv2dGeom& g) {
  if (a.shape() != Shape{g.batch, g.in_h, g.in_w, g.channels})
    throw Error("im2col2d: shape mismatch");
  Tensor out({g.batch * g.out_h * g.out_w, g.kh * g.kw * g.channels});
  const double* src = a.value().data();
  double* dst = out.data();
  const Eigen::Index c = g.channels;
  walk_conv2d(g, [&](Eigen::Index col_off, Eigen::Index img_off) {
    std::copy(src + img_off, src + img_off + c, dst + col_off);
  });
  Conv2dGeom geom = g;
  return make_op(std::move(out), {a}, [geom](const Var& gr) -> std::vector<Var> {
    return {col2im2d(gr, geom)};
  });
}

Var col2im2d(const Var& a, const Conv2dGeom& g) {
  if (a.shape() != Shape{g.batch * g.out_h * g.out_w, g.kh * g.kw * g.channels})
    throw Error("col2im2d: shape mismatch");
  Tensor out({g.batch, g.in_h, g.in_w, g.channels});
  const double* src = a.value().data();
  double* dst = out.data();
  const Eigen::Index c = g.channels;
  walk_conv2d(g, [&](Eigen::Index col_off, Eigen::Index img_off) {
    Eigen::Map<Eigen::ArrayXd>(dst + img_off, c) +=
        Eigen::Map<const Eigen::ArrayXd>(src + col_off, c);
  });
  Conv2dGeom geom = g;
  return make_op(std::move(out), {a}, [geom](const Var& gr) -> std::vector<Var> {
    return {im2col2d(gr, geom)};
  });
}

// ---- composite layers --------------------------------------------------------

Var conv1d(const Var& x, const Var& w, Eigen::Index stride, Padding pad, Eigen::Index dilation) {
  if (x.value().rank() != 3 || w.value().rank() != 3) throw Error("conv1d: bad ranks");
  const Eigen::Index b = x.value().dim(0), l = x.value().dim(1), cin = x.value().dim(2);
  const Eigen::Index k = w.value().dim(0), wcin = w.value().dim(1), cout = w.value().dim(2);
  if (cin != wcin) throw Error("conv1d: channel mismatch");
  Conv1dGeom g = Conv1dGeom::make(b, l, cin, k, stride, dilation, pad);
  Var cols = im2col1d(x, g);
  Var y = matmul(cols, reshape(w, {k * cin, cout}));
  return reshape(y, {b, g.out_len, cout});
}

Var tconv1d(const Var& x, const Var& w, Eigen::Index stride) {
  if (x.value().rank() != 3 || w.value().rank() != 3) throw Error("tconv1d: bad ranks");
  const Eigen::Index b = x.value().dim(0), l = x.value().dim(1), cin = x.value().dim(2);
  const Eigen::Index k = w.value().dim(0), wcin = w.value().dim(1), cout = w.value().dim(2);
  if (cin != wcin) throw Error("tconv1d: channel mismatch");
  const Eigen::Index out_len = l * stride;
  Conv1dGeom g = Conv1dGeom::make(b, out_len, cout, k, stride, 1, Padding::kSame);
  if (g.out_len != l) throw Error("tconv1d: geometry does not invert");
  Var wm = reshape(permute(w, {1, 0, 2}), {cin, k * cout});
  Var cols = matmul(reshape(x, {b * l, cin}), wm);
  return col2im1d(cols, g);
}

Var conv2d(const Var& x, const Var& w, Eigen::Index stride_h, Eigen::Index stride_w, Padding pad,
           Eigen::Index dil_h, Eigen::Index dil_w) {
  if (x.value().rank() != 4 || w.value().rank() != 4) throw Error("conv2d: bad ranks");
  const Eigen::Index b = x.value().dim(0), h = x.value().dim(1), wd = x.value().dim(2),
                     cin = x.value().dim(3);
  const Eigen::Index kh = w.value().dim(0), kw = w.value().dim(1), wcin = w.value().dim(2),
                     cout = w.value().dim(3);
  if (cin != wcin) throw Error("conv2d: channel mismatch");
  Conv2dGeom g = Conv2dGeom::make(b, h, wd, cin, kh, kw, stride_h, stride_w, dil_h, dil_w, pad);
  Var cols = im2col2d(x, g);
  Var y = matmul(cols, reshape(w, {kh * kw * cin, cout}));
  return reshape(y, {b, g.out_h, g.out_w, cout});
}

Var tconv2d(const Var& x, const Var& w, Eigen::Index stride_h, Eigen::Index stride_w) {
  if (x.value().rank() != 4 || w.value().rank() != 4) throw Error("tconv2d: bad ranks");
  const Eigen::Index b = x.value().dim(0), h = x.value().dim(1), wd = x.value().dim(2),
                     cin = x.value().dim(3);
  const Eigen::Index kh = w.value().dim(0), kw = w.value().dim(1), wcin = w.value().dim(2),
                     cout = w.value().dim(3);
  if (cin != wcin) throw Error("tconv2d: channel mismatch");
  const Eigen::Index out_h = h * stride_h, out_w = wd * stride_w;
  Conv2dGeom g =
      Conv2dGeom::make(b, out_h, out_w, cout, kh, kw, stride_h, stride_w, 1, 1, Padding::kSame);
  if (g.out_h != h || g.out_w != wd) throw Error("tconv2d: geometry does not invert");
  Var wm = reshape(permute(w, {2, 0, 1, 3}), {cin, kh * kw * cout});
  Var cols = matmul(reshape(x, {b * h * wd, cin}), wm);
  return col2im2d(cols, g);
}

Var maxpool2d(const Var& x, Eigen::Index kh, Eigen::Index kw, Eigen::Index stride_h,
              Eigen::Index stride_w) {
  if (x.value().rank() != 4) throw Error("maxpool2d: rank must be 4");
  const Eigen::Index b = x.value().dim(0), h = x.value().dim(1), w = x.value().dim(2),
                     c = x.value().dim(3);
  if (h < kh || w < kw) throw Error("maxpool2d: input smaller than kernel");
  const Eigen::Index oh = (h - kh) / stride_h + 1, ow = (w - kw) / stride_w + 1;

  auto idx = std::make_shared<std::vector<Eigen::Index>>();
  idx->resize(static_cast<std::size_t>(b * oh * ow * c));
  const Tensor& xv = x.value();
  std::size_t out_i = 0;
  for (Eigen::Index bb = 0; bb < b; ++bb)
    for (Eigen::Index i = 0; i < oh; ++i)
      for (Eigen::Index j = 0; j < ow; ++j)
        for (Eigen::Index ch = 0; ch < c; ++ch) {
          Eigen::Index best = -1;
          double best_v = -std::numeric_limits<double>::infinity();
          for (Eigen::Index di = 0; di < kh; ++di)
            for (Eigen::Index dj = 0; dj < kw; ++dj) {
              Eigen::Index flat =
                  ((bb * h + i * stride_h + di) * w + j * stride_w + dj) * c + ch;
              if (xv[flat] > best_v) {
                best_v = xv[flat];
                best = flat;
              }
            }
          (*idx)[out_i++] = best;
        }
  return gather_flat(x, idx, {b, oh, ow, c});
}

Var dense(const Var& x, const Var& w, const Var& b) {
  const Eigen::Index f = w.value().dim(0), u = w.value().dim(1);
  if (x.value().last_dim() != f) throw Error("dense: feature dimension mismatch");
  const Eigen::Index n = x.size() / f;
  Var y = add_rowvec(matmul(reshape(x, {n, f}), w), b);
  Shape out_shape = x.shape();
  out_shape.back() = u;
  return reshape(y, std::move(out_shape));
}

Var softmax(const Var& a) {
  const Eigen::Index n = a.value().last_dim();
  const Eigen::Index rows = a.size() / n;
  // Shift by the row max; softmax is invariant to it so the constant shift
  // does not alter gradients.
  Tensor mx(Shape{rows});
  auto am = a.value().m(rows, n);
  for (Eigen::Index r = 0; r < rows; ++r) mx[r] = am.row(r).maxCoeff();
  Shape row_shape = a.shape();
  row_shape.pop_back();
  Var shift = expand(constant(mx.reshaped(row_shape)), a.value().rank() - 1, n);
  Var e = exp_v(sub(a, shift));
  Var s = sum_axis(e, a.value().rank() - 1);
  return div(e, expand(s, a.value().rank() - 1, n));
}

Var phase_shuffle(const Var& x, const std::vector<Eigen::Index>& shifts) {
  if (x.value().rank() != 3) throw Error("phase_shuffle: rank must be 3");
  const Eigen::Index b = x.value().dim(0), l = x.value().dim(1), c = x.value().dim(2);
  if (static_cast<Eigen::Index>(shifts.size()) != b)
    throw Error("phase_shuffle: one shift per example required");
  auto idx = std::make_shared<std::vector<Eigen::Index>>();
  idx->reserve(static_cast<std::size_t>(b * l * c));
  for (Eigen::Index bb = 0; bb < b; ++bb) {
    const Eigen::Index s = shifts[static_cast<std::size_t>(bb)];
    for (Eigen::Index t = 0; t < l; ++t) {
      Eigen::Index u = t - s;
      if (u < 0) u = -u;                     // reflect left edge
      if (u >= l) u = 2 * l - 2 - u;         // reflect right edge
      for (Eigen::Index ch = 0; ch < c; ++ch) idx->push_back((bb * l + u) * c + ch);
    }
  }
  return gather_flat(x, idx, {b, l, c});
}

Var attention_weights(const Var& h, const Var& z) {
  if (h.value().rank() != 3) throw Error("attention: h must be (B, T, H)");
  const Eigen::Index b = h.value().dim(0), t = h.value().dim(1), f = h.value().dim(2);
  if (z.size() != f) throw Error("attention: weight size mismatch");
  Var scores = reshape(matmul(reshape(h, {b * t, f}), reshape(z, {f, 1})), {b, t});
  return softmax(scores);
}

Var attention_pool(const Var& h, const Var& z) {
  const Eigen::Index f = h.value().dim(2);
  Var alpha = attention_weights(h, z);
  return sum_axis(mul(h, expand(alpha, 2, f)), 1);
}

}  // namespace evf::nn
