// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <initializer_list>
#include <memory>
#include <numeric>
#include <vector>

#include "evf/common.hpp"

namespace evf {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Shape = std::vector<Eigen::Index>;

inline Eigen::Index shape_size(const Shape& s) {
  Eigen::Index n = 1;
  for (Eigen::Index d : s) n *= d;
  return n;
}

// Dense N-d array of doubles, row-major. Value semantics with copy-on-write
// storage, so reshapes and copies are cheap until someone mutates.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(Shape shape)
      : shape_(std::move(shape)),
        data_(std::make_shared<Eigen::ArrayXd>(Eigen::ArrayXd::Zero(shape_size(shape_)))) {}

  Tensor(Shape shape, Eigen::ArrayXd values)
      : shape_(std::move(shape)), data_(std::make_shared<Eigen::ArrayXd>(std::move(values))) {
    if (data_->size() != shape_size(shape_)) throw Error("Tensor: value count does not match shape");
  }

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }

  static Tensor full(Shape shape, double v) {
    Tensor t(std::move(shape));
    t.data_->setConstant(v);
    return t;
  }

  static Tensor scalar(double v) { return full({}, v); }

  static Tensor from(Shape shape, std::initializer_list<double> vals) {
    Tensor t(std::move(shape));
    if (static_cast<Eigen::Index>(vals.size()) != t.size())
      throw Error("Tensor::from: value count does not match shape");
    Eigen::Index i = 0;
    for (double v : vals) (*t.data_)[i++] = v;
    return t;
  }

  static Tensor uniform(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    for (Eigen::Index i = 0; i < t.size(); ++i) (*t.data_)[i] = rng.uniform(lo, hi);
    return t;
  }

  const Shape& shape() const { return shape_; }
  Eigen::Index rank() const { return static_cast<Eigen::Index>(shape_.size()); }
  Eigen::Index dim(Eigen::Index i) const { return shape_[static_cast<std::size_t>(i)]; }
  Eigen::Index size() const { return data_ ? data_->size() : 0; }

  double* data() {
    ensure_unique();
    return data_->data();
  }
  const double* data() const { return data_->data(); }

  double& operator[](Eigen::Index i) {
    ensure_unique();
    return (*data_)[i];
  }
  double operator[](Eigen::Index i) const { return (*data_)[i]; }

  // Flat array view.
  Eigen::Map<Eigen::ArrayXd> a() {
    ensure_unique();
    return {data_->data(), data_->size()};
  }
  Eigen::Map<const Eigen::ArrayXd> a() const { return {data_->data(), data_->size()}; }

  // 2-D matrix view of the flat storage; rows*cols must equal size().
  Eigen::Map<RowMat> m(Eigen::Index rows, Eigen::Index cols) {
    if (rows * cols != size()) throw Error("Tensor::m: bad view shape");
    ensure_unique();
    return {data_->data(), rows, cols};
  }
  Eigen::Map<const RowMat> m(Eigen::Index rows, Eigen::Index cols) const {
    if (rows * cols != size()) throw Error("Tensor::m: bad view shape");
    return {data_->data(), rows, cols};
  }

  // View with all leading axes folded together: (d0*...*dn-2, dn-1).
  Eigen::Map<RowMat> m2() { return m(size() / last_dim(), last_dim()); }
  Eigen::Map<const RowMat> m2() const { return m(size() / last_dim(), last_dim()); }

  Eigen::Index last_dim() const { return shape_.empty() ? 1 : shape_.back(); }

  double& at(std::initializer_list<Eigen::Index> idx) {
    ensure_unique();
    return (*data_)[flat_index(idx)];
  }
  double at(std::initializer_list<Eigen::Index> idx) const { return (*data_)[flat_index(idx)]; }

  // Shares storage; O(1).
  Tensor reshaped(Shape shape) const {
    if (shape_size(shape) != size()) throw Error("Tensor::reshaped: element count mismatch");
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = data_;
    return t;
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool all_finite() const { return data_ == nullptr || data_->isFinite().all(); }

 private:
  void ensure_unique() {
    if (data_ && data_.use_count() > 1) data_ = std::make_shared<Eigen::ArrayXd>(*data_);
  }

  Eigen::Index flat_index(std::initializer_list<Eigen::Index> idx) const {
    if (static_cast<Eigen::Index>(idx.size()) != rank()) throw Error("Tensor::at: rank mismatch");
    Eigen::Index flat = 0;
    std::size_t k = 0;
    for (Eigen::Index i : idx) {
      flat = flat * shape_[k] + i;
      ++k;
    }
    return flat;
  }

  Shape shape_;
  std::shared_ptr<Eigen::ArrayXd> data_;
};

}  // namespace evf
