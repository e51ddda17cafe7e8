#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "kmgr/util/error.hpp"

namespace kmgr::nn {

/// Dense n-dimensional array, row-major. Value-semantic; float for the
/// training runtime, double for gradient-check mode.
template <typename T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)), data(count(shape), T{0}) {}
  Tensor(std::vector<std::size_t> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != count(shape)) throw DataError("Tensor: data does not match shape");
  }

  static std::size_t count(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }

  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  /// Row-major reshape; element count must be preserved.
  Tensor reshaped(std::vector<std::size_t> new_shape) const {
    if (count(new_shape) != numel()) throw DataError("Tensor: reshape changes element count");
    return Tensor(std::move(new_shape), data);
  }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    return out;
  }
};

std::string shape_str(const std::vector<std::size_t>& shape);

}  // namespace kmgr::nn
