#include "ccg/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ccg {
namespace {

std::string ShapeString(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

std::size_t ElementCount(const std::vector<std::size_t>& shape) {
  if (shape.empty() || shape.size() > kMaxAxes) {
    throw ShapeError("tensor must have between 1 and " + std::to_string(kMaxAxes) +
                     " axes, got " + std::to_string(shape.size()));
  }
  std::size_t count = 1;
  for (std::size_t extent : shape) {
    if (extent == 0) throw ShapeError("tensor extents must be positive: " + ShapeString(shape));
    count *= extent;
  }
  return count;
}

void CheckVectors(const DenseTensor& t, const VectorList& x) {
  if (x.size() != t.num_axes()) {
    throw ShapeError("expected " + std::to_string(t.num_axes()) +
                     " vectors for tensor of shape " + ShapeString(t.shape()) + ", got " +
                     std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (static_cast<std::size_t>(x[i].size()) != t.extent(i)) {
      throw ShapeError("vector " + std::to_string(i) + " has length " +
                       std::to_string(x[i].size()) + " but axis extent is " +
                       std::to_string(t.extent(i)) + " in shape " + ShapeString(t.shape()));
    }
  }
}

// Working buffer for progressive axis reduction. Axes that have been
// contracted away are dropped from `shape`; `axes` maps remaining positions
// back to original axis ids.
struct Partial {
  std::vector<std::size_t> shape;
  std::vector<std::size_t> axes;
  std::vector<double> data;
};

Partial ToPartial(const DenseTensor& t) {
  Partial p;
  p.shape = t.shape();
  p.axes.resize(t.num_axes());
  std::iota(p.axes.begin(), p.axes.end(), std::size_t{0});
  p.data.assign(t.data().begin(), t.data().end());
  return p;
}

// Contracts position `pos` of the partial tensor with v.
void ContractPosition(Partial& p, std::size_t pos, const Vector& v) {
  std::size_t pre = 1, post = 1;
  for (std::size_t a = 0; a < pos; ++a) pre *= p.shape[a];
  for (std::size_t a = pos + 1; a < p.shape.size(); ++a) post *= p.shape[a];
  const std::size_t m = p.shape[pos];
  std::vector<double> out(pre * post, 0.0);
  for (std::size_t a = 0; a < pre; ++a) {
    const double* block = p.data.data() + a * m * post;
    double* dst = out.data() + a * post;
    for (std::size_t k = 0; k < m; ++k) {
      const double w = v[static_cast<Eigen::Index>(k)];
      if (w == 0.0) continue;
      const double* row = block + k * post;
      for (std::size_t b = 0; b < post; ++b) dst[b] += w * row[b];
    }
  }
  p.data = std::move(out);
  p.shape.erase(p.shape.begin() + static_cast<std::ptrdiff_t>(pos));
  p.axes.erase(p.axes.begin() + static_cast<std::ptrdiff_t>(pos));
}

// Contracts every axis except those in `keep`, last axis first so that the
// largest reduction happens on contiguous memory.
Partial ContractAllBut(const DenseTensor& t, const VectorList& x,
                       std::initializer_list<std::size_t> keep) {
  Partial p = ToPartial(t);
  for (std::size_t pos = p.shape.size(); pos-- > 0;) {
    const std::size_t axis = p.axes[pos];
    if (std::find(keep.begin(), keep.end(), axis) != keep.end()) continue;
    ContractPosition(p, pos, x[axis]);
  }
  return p;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(ElementCount(shape_), 0.0) {}

DenseTensor::DenseTensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  const std::size_t expected = ElementCount(shape_);
  if (data_.size() != expected) {
    throw ShapeError("tensor of shape " + ShapeString(shape_) + " needs " +
                     std::to_string(expected) + " values, got " + std::to_string(data_.size()));
  }
}

DenseTensor DenseTensor::Constant(std::vector<std::size_t> shape, double value) {
  DenseTensor t(std::move(shape));
  std::fill(t.data_.begin(), t.data_.end(), value);
  return t;
}

std::size_t DenseTensor::FlatIndex(const JointIndex& index) const {
  if (index.size() != shape_.size()) {
    throw ShapeError("index has " + std::to_string(index.size()) + " entries for tensor of shape " +
                     ShapeString(shape_));
  }
  std::size_t flat = 0;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (index[a] >= shape_[a]) {
      throw ShapeError("index " + std::to_string(index[a]) + " out of range on axis " +
                       std::to_string(a) + " of shape " + ShapeString(shape_));
    }
    flat = flat * shape_[a] + index[a];
  }
  return flat;
}

void DenseTensor::AddScaled(double alpha, const DenseTensor& other) {
  if (other.shape_ != shape_) {
    throw ShapeError("cannot add tensor of shape " + ShapeString(other.shape_) + " to " +
                     ShapeString(shape_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += alpha * other.data_[i];
}

void ForEachIndex(const std::vector<std::size_t>& shape,
                  const std::function<void(const JointIndex&, std::size_t)>& visit) {
  const std::size_t count = ElementCount(shape);
  JointIndex index(shape.size(), 0);
  for (std::size_t flat = 0; flat < count; ++flat) {
    visit(index, flat);
    for (std::size_t a = shape.size(); a-- > 0;) {
      if (++index[a] < shape[a]) break;
      index[a] = 0;
    }
  }
}

double FullContract(const DenseTensor& t, const VectorList& x) {
  CheckVectors(t, x);
  return ContractAllBut(t, x, {}).data.front();
}

Vector ContractExcept(const DenseTensor& t, const VectorList& x, std::size_t axis) {
  CheckVectors(t, x);
  if (axis >= t.num_axes()) {
    throw std::out_of_range("axis " + std::to_string(axis) + " out of range for " +
                            std::to_string(t.num_axes()) + "-axis tensor");
  }
  Partial p = ContractAllBut(t, x, {axis});
  return Eigen::Map<const Vector>(p.data.data(), static_cast<Eigen::Index>(p.data.size()));
}

Matrix ContractExceptPair(const DenseTensor& t, const VectorList& x, std::size_t row_axis,
                          std::size_t col_axis) {
  CheckVectors(t, x);
  if (row_axis >= t.num_axes() || col_axis >= t.num_axes()) {
    throw std::out_of_range("axis pair out of range for " + std::to_string(t.num_axes()) +
                            "-axis tensor");
  }
  if (row_axis == col_axis) {
    throw std::invalid_argument(
        "ContractExceptPair needs distinct axes; the same-axis block of a multilinear form is zero");
  }
  Partial p = ContractAllBut(t, x, {row_axis, col_axis});
  // Remaining axes keep their original order.
  const auto rows = static_cast<Eigen::Index>(t.extent(row_axis));
  const auto cols = static_cast<Eigen::Index>(t.extent(col_axis));
  Matrix m(rows, cols);
  const bool row_first = row_axis < col_axis;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = row_first ? p.data[static_cast<std::size_t>(r * cols + c)]
                          : p.data[static_cast<std::size_t>(c * rows + r)];
    }
  }
  return m;
}

DenseTensor FillFrom(const std::function<double(const Vector&)>& fn,
                     const std::vector<Matrix>& strategies) {
  std::vector<std::size_t> shape;
  std::vector<Eigen::Index> offsets;
  Eigen::Index dim = 0;
  for (const Matrix& s : strategies) {
    shape.push_back(static_cast<std::size_t>(s.rows()));
    offsets.push_back(dim);
    dim += s.cols();
  }
  DenseTensor out(shape);
  Vector joint(dim);
  ForEachIndex(shape, [&](const JointIndex& index, std::size_t flat) {
    for (std::size_t p = 0; p < strategies.size(); ++p) {
      joint.segment(offsets[p], strategies[p].cols()) =
          strategies[p].row(static_cast<Eigen::Index>(index[p])).transpose();
    }
    out[flat] = fn(joint);
  });
  return out;
}

}  // namespace ccg
