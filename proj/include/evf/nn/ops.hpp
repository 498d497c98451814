// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "evf/nn/autodiff.hpp"

namespace evf::nn {

using IndexList = std::shared_ptr<const std::vector<Eigen::Index>>;

// ---- leaves ----------------------------------------------------------------

Var constant(Tensor t);
Var detach(const Var& a);

// ---- elementwise -----------------------------------------------------------

Var add(const Var& a, const Var& b);
// x: (N, F) plus a length-F row vector broadcast over rows.
Var add_rowvec(const Var& x, const Var& b);
Var sub(const Var& a, const Var& b);
Var neg(const Var& a);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var scale(const Var& a, double c);
Var add_scalar(const Var& a, double c);
Var exp_v(const Var& a);
Var log_v(const Var& a);
Var sqrt_v(const Var& a);
Var recip(const Var& a);
Var tanh_v(const Var& a);
Var sigmoid_v(const Var& a);
Var relu(const Var& a);
Var leaky_relu(const Var& a, double alpha);

// Multiplies by a fixed mask (dropout with an externally drawn mask).
Var apply_mask(const Var& a, Tensor mask);

// ---- shape -----------------------------------------------------------------

Var reshape(const Var& a, Shape shape);
// Inserts a new axis of length n at `axis` and tiles along it.
Var expand(const Var& a, Eigen::Index axis, Eigen::Index n);
Var sum_axis(const Var& a, Eigen::Index axis);
Var sum_all(const Var& a);   // -> scalar (shape {})
Var mean_all(const Var& a);  // -> scalar
Var bcast_scalar(const Var& a, Shape shape);
Var narrow(const Var& a, Eigen::Index axis, Eigen::Index start, Eigen::Index len);
Var pad_axis(const Var& a, Eigen::Index axis, Eigen::Index before, Eigen::Index after);
Var cat(const std::vector<Var>& parts, Eigen::Index axis);
Var permute(const Var& a, std::vector<Eigen::Index> axes);
Var flip(const Var& a, Eigen::Index axis);

// ---- linear algebra --------------------------------------------------------

Var transpose2d(const Var& a);
Var matmul(const Var& a, const Var& b);

// ---- indexed ---------------------------------------------------------------

// out.flat[i] = a.flat[idx[i]]; every index must be in range.
Var gather_flat(const Var& a, IndexList idx, Shape out_shape);
// out.flat[idx[i]] += a.flat[i]; adjoint of gather_flat.
Var scatter_flat(const Var& a, IndexList idx, Shape out_shape);

// ---- convolution plumbing --------------------------------------------------

enum class Padding { kValid, kSame };

struct Conv1dGeom {
  Eigen::Index batch, in_len, channels;
  Eigen::Index k, stride, dilation;
  Eigen::Index pad_l, pad_r;
  Eigen::Index out_len;

  static Conv1dGeom make(Eigen::Index batch, Eigen::Index in_len, Eigen::Index channels,
                         Eigen::Index k, Eigen::Index stride, Eigen::Index dilation, Padding pad);
};

struct Conv2dGeom {
  Eigen::Index batch, in_h, in_w, channels;
  Eigen::Index kh, kw, stride_h, stride_w, dil_h, dil_w;
  Eigen::Index pad_t, pad_b, pad_l, pad_r;
  Eigen::Index out_h, out_w;

  static Conv2dGeom make(Eigen::Index batch, Eigen::Index in_h, Eigen::Index in_w,
                         Eigen::Index channels, Eigen::Index kh, Eigen::Index kw,
                         Eigen::Index stride_h, Eigen::Index stride_w, Eigen::Index dil_h,
                         Eigen::Index dil_w, Padding pad);
};

// (B, L, C) -> (B*out_len, K*C) patch matrix; padding reads as zero.
Var im2col1d(const Var& a, const Conv1dGeom& g);
// Adjoint of im2col1d: (B*out_len, K*C) -> (B, L, C), scatter-add.
Var col2im1d(const Var& a, const Conv1dGeom& g);
Var im2col2d(const Var& a, const Conv2dGeom& g);
Var col2im2d(const Var& a, const Conv2dGeom& g);

// ---- composite layers (functional form) ------------------------------------

// x: (B, L, Cin), w: (K, Cin, Cout) -> (B, out_len, Cout).
Var conv1d(const Var& x, const Var& w, Eigen::Index stride, Padding pad = Padding::kValid,
           Eigen::Index dilation = 1);
// Transposed 1-D convolution, output length = L * stride (adjoint of the
// same-padded forward convolution). w: (K, Cin, Cout).
Var tconv1d(const Var& x, const Var& w, Eigen::Index stride);
// x: (B, H, W, Cin), w: (KH, KW, Cin, Cout).
Var conv2d(const Var& x, const Var& w, Eigen::Index stride_h, Eigen::Index stride_w,
           Padding pad = Padding::kValid, Eigen::Index dil_h = 1, Eigen::Index dil_w = 1);
// Transposed 2-D convolution, output (B, H*sh, W*sw, Cout).
Var tconv2d(const Var& x, const Var& w, Eigen::Index stride_h, Eigen::Index stride_w);
// Valid max pooling with kernel (kh, kw) and matching stride.
Var maxpool2d(const Var& x, Eigen::Index kh, Eigen::Index kw, Eigen::Index stride_h,
              Eigen::Index stride_w);
// x: (..., F) row-batched dense layer; w: (F, U), b: (U).
Var dense(const Var& x, const Var& w, const Var& b);
// Softmax over the last axis.
Var softmax(const Var& a);

// Time shift per example with reflection at the exposed edge.
// x: (B, L, C); shifts: one value in [-n, n] per example.
Var phase_shuffle(const Var& x, const std::vector<Eigen::Index>& shifts);

// Attention pooling: h (B, T, H) with score weights z (H) -> (B, H).
Var attention_pool(const Var& h, const Var& z);
// The normalized attention weights alpha (B, T) for inspection/tests.
Var attention_weights(const Var& h, const Var& z);

}  // namespace evf::nn
