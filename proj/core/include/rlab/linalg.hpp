#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>

#include "rlab/jet.hpp"

namespace rlab {

/// Dense matrices and vectors of size at most 4, stored inline.
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

inline std::span<const double> as_span(const SmallVec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

inline SmallVec to_vec(std::span<const double> p) {
  SmallVec v(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) v[static_cast<Eigen::Index>(i)] = p[i];
  return v;
}

/// Rank-3 array with each index in [0, dim).
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  double& operator()(int a, int b, int c) { return data_[(a * kMaxDim + b) * kMaxDim + c]; }
  double operator()(int a, int b, int c) const { return data_[(a * kMaxDim + b) * kMaxDim + c]; }

 private:
  int dim_ = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> data_{};
};

/// Rank-4 array with each index in [0, dim).
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  double& operator()(int a, int b, int c, int d) { return data_[((a * kMaxDim + b) * kMaxDim + c) * kMaxDim + d]; }
  double operator()(int a, int b, int c, int d) const {
    return data_[((a * kMaxDim + b) * kMaxDim + c) * kMaxDim + d];
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  int dim_ = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim * kMaxDim> data_{};
};

}  // namespace rlab
