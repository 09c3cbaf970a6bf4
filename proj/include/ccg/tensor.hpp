#pragma once

// Dense N-dimensional tensors and the multilinear contractions used to
// evaluate expected costs and constraint satisfaction of mixed strategies.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ccg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One mixing vector per tensor axis.
using VectorList = std::vector<Vector>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxAxes = 8;

// A joint pure-strategy index: one entry per axis.
using JointIndex = std::vector<std::size_t>;

class DenseTensor {
 public:
  DenseTensor() = default;

  // Zero-filled tensor of the given shape.
  explicit DenseTensor(std::vector<std::size_t> shape);
  DenseTensor(std::vector<std::size_t> shape, std::vector<double> data);

  static DenseTensor Constant(std::vector<std::size_t> shape, double value);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t num_axes() const { return shape_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }

  double operator[](std::size_t flat) const { return data_[flat]; }
  double& operator[](std::size_t flat) { return data_[flat]; }

  double at(const JointIndex& index) const { return data_[FlatIndex(index)]; }
  double& at(const JointIndex& index) { return data_[FlatIndex(index)]; }

  // Row-major offset; throws ShapeError on a malformed index.
  std::size_t FlatIndex(const JointIndex& index) const;

  // this += alpha * other (shapes must agree).
  void AddScaled(double alpha, const DenseTensor& other);

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Calls visit(index, flat) for every joint index in row-major order.
void ForEachIndex(const std::vector<std::size_t>& shape,
                  const std::function<void(const JointIndex&, std::size_t)>& visit);

// T[.]x: contraction of every axis with its vector.
double FullContract(const DenseTensor& t, const VectorList& x);

// Gradient of FullContract with respect to x[axis].
Vector ContractExcept(const DenseTensor& t, const VectorList& x, std::size_t axis);

// Mixed second derivative block with respect to x[row_axis] and x[col_axis].
Matrix ContractExceptPair(const DenseTensor& t, const VectorList& x,
                          std::size_t row_axis, std::size_t col_axis);

// Tensor whose element K is fn(joint), where joint concatenates the K_i-th
// row of strategies[i] for every player i.
DenseTensor FillFrom(const std::function<double(const Vector&)>& fn,
                     const std::vector<Matrix>& strategies);

}  // namespace ccg
