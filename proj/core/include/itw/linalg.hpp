#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace itw {

using Vec = std::vector<double>;

/// Dense row-major matrix, sized once and indexed with operator().
/// Dimensions here are tiny (state and mark dimensions are <= a few),
/// so no BLAS backing is warranted.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Mat(std::size_t rows, std::size_t cols, Vec data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    assert(data_.size() == rows_ * cols_);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  Vec& data() { return data_; }
  const Vec& data() const { return data_; }

  bool operator==(const Mat&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

/// Axis-aligned box used for state-excursion checks and Lipschitz bounds.
struct Box {
  Vec lo;
  Vec hi;

  std::size_t dim() const { return lo.size(); }
  bool contains(std::span<const double> x) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
  Box inflated(double margin) const {
    Box out = *this;
    for (auto& v : out.lo) v -= margin;
    for (auto& v : out.hi) v += margin;
    return out;
  }
  bool operator==(const Box&) const = default;
};

}  // namespace itw
