#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "sentiment/errors.hpp"

namespace sentiment {

/// Dense row-major array of doubles with an optional same-shape gradient.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, bool with_grad = false)
      : shape_(std::move(shape)), data_(count(shape_), 0.0) {
    if (with_grad) grad_.assign(data_.size(), 0.0);
  }
  Tensor(std::vector<std::size_t> shape, std::vector<double> data) : shape_(std::move(shape)) {
    if (data.size() != count(shape_)) throw DomainError("tensor data does not match its shape");
    data_ = std::move(data);
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  bool has_grad() const { return !grad_.empty() || data_.empty(); }
  void enable_grad() { grad_.assign(data_.size(), 0.0); }
  std::span<double> grad() { return grad_; }
  std::span<const double> grad() const { return grad_; }
  void zero_grad() { std::fill(grad_.begin(), grad_.end(), 0.0); }

  /// Contiguous slice along the leading axis.
  std::span<double> row(std::size_t i) {
    const auto w = row_width();
    return std::span<double>(data_).subspan(i * w, w);
  }
  std::span<const double> row(std::size_t i) const {
    const auto w = row_width();
    return std::span<const double>(data_).subspan(i * w, w);
  }
  std::span<double> grad_row(std::size_t i) {
    const auto w = row_width();
    return std::span<double>(grad_).subspan(i * w, w);
  }

 private:
  static std::size_t count(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }
  std::size_t row_width() const { return shape_.empty() ? 1 : data_.size() / std::max<std::size_t>(shape_[0], 1); }

  std::vector<std::size_t> shape_;
  std::vector<double> data_;
  std::vector<double> grad_;
};

}  // namespace sentiment
