#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "gbre/errors.hpp"

namespace gbre {

// Dense row-major tensor of 64-bit floats. Shapes are small (rank <= 2 in
// practice) and sizes are desk scale, so everything is a plain vector.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> values;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)), values(count(shape), 0.0) {}
  Tensor(std::vector<int> s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {
    if (static_cast<std::size_t>(count(shape)) != values.size()) {
      throw ShapeError("tensor: values length " + std::to_string(values.size()) +
                       " does not match shape " + shape_str(shape));
    }
  }

  static Tensor scalar(double v) { return Tensor({1}, {v}); }
  static Tensor vec(std::vector<double> v) {
    const int n = static_cast<int>(v.size());
    return Tensor({n}, std::move(v));
  }
  static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }

  static long count(const std::vector<int>& s) {
    long n = 1;
    for (int e : s) {
      if (e <= 0) throw ShapeError("tensor: nonpositive extent in shape " + shape_str(s));
      n *= e;
    }
    return n;
  }

  static std::string shape_str(const std::vector<int>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += "x";
      out += std::to_string(s[i]);
    }
    return out + "]";
  }

  long size() const { return static_cast<long>(values.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int rows() const { return shape.empty() ? 1 : shape[0]; }
  int cols() const { return rank() < 2 ? 1 : shape[1]; }
  bool is_scalar() const { return size() == 1; }

  double& at(int i) { return values[static_cast<std::size_t>(i)]; }
  double at(int i) const { return values[static_cast<std::size_t>(i)]; }
  double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols() + c]; }

  double* data() { return values.data(); }
  const double* data() const { return values.data(); }

  void fill(double v) { std::fill(values.begin(), values.end(), v); }

  bool all_finite() const {
    for (double v : values) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

inline bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

// Trainable parameter: value plus accumulated gradient of identical shape.
struct Param {
  Tensor tensor;
  Tensor grad;
  bool trainable = true;
  std::string name;

  Param() = default;
  explicit Param(Tensor t, std::string n = "", bool train = true)
      : tensor(std::move(t)), grad(tensor.shape), trainable(train), name(std::move(n)) {}

  void reset_grad() { grad.fill(0.0); }
};

}  // namespace gbre
