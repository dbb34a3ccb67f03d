// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "fmfog/core/error.hpp"

namespace fmfog {

// Dense row-major n-dimensional value. float for training, double for
// gradient verification; kernels operate on the raw buffer.
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int64_t> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<size_t>(count(shape_)), T(0));
  }

  Tensor(std::initializer_list<int64_t> shape) : Tensor(std::vector<int64_t>(shape)) {}

  static Tensor zeros(std::vector<int64_t> shape) { return Tensor(std::move(shape)); }

  const std::vector<int64_t>& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int64_t dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  const T& operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  T& at(int64_t i, int64_t j) { return data_[static_cast<size_t>(i * dim(1) + j)]; }
  const T& at(int64_t i, int64_t j) const { return data_[static_cast<size_t>(i * dim(1) + j)]; }

  T& at(int64_t i, int64_t j, int64_t k) {
    return data_[static_cast<size_t>((i * dim(1) + j) * dim(2) + k)];
  }
  const T& at(int64_t i, int64_t j, int64_t k) const {
    return data_[static_cast<size_t>((i * dim(1) + j) * dim(2) + k)];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  void zero() { fill(T(0)); }

  // Same buffer, new shape header; element count must match.
  Tensor reshaped(std::vector<int64_t> shape) const {
    if (count(shape) != size()) {
      throw ShapeError("reshape: element count mismatch");
    }
    Tensor out;
    out.shape_ = std::move(shape);
    out.data_ = data_;
    return out;
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  static int64_t count(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) n *= d;
    return n;
  }

  static std::string shape_str(const std::vector<int64_t>& shape) {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }

 private:
  std::vector<int64_t> shape_;
  std::vector<T> data_;
};

template <typename T>
void require_shape(const Tensor<T>& t, const std::vector<int64_t>& shape, const char* what) {
  if (t.shape() != shape) {
    throw ShapeError(std::string(what) + ": expected " + Tensor<T>::shape_str(shape) + ", got " +
                     Tensor<T>::shape_str(t.shape()));
  }
}

// Trainable value paired with its accumulated gradient.
template <typename T>
struct Param {
  Tensor<T> value;
  Tensor<T> grad;

  Param() = default;
  explicit Param(std::vector<int64_t> shape) : value(shape), grad(std::move(shape)) {}

  void zero_grad() { grad.zero(); }
  int64_t size() const { return value.size(); }
};

}  // namespace fmfog
