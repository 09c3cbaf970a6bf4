#include <gtest/gtest.h>

#include "ccg/tensor.hpp"
#include "test_util.hpp"

namespace ccg {
namespace {

using testing::EnumerateJoint;
using testing::RandomMix;
using testing::RandomTensor;

double BruteForceContract(const DenseTensor& t, const VectorList& x) {
  double total = 0.0;
  EnumerateJoint(t.shape(), [&](const std::vector<std::size_t>& k) {
    double w = t.at(k);
    for (std::size_t a = 0; a < k.size(); ++a) w *= x[a][static_cast<Eigen::Index>(k[a])];
    total += w;
  });
  return total;
}

// All shapes with the given axis count and extents in [1, max_extent].
std::vector<std::vector<std::size_t>> Shapes(std::size_t axes, std::size_t max_extent) {
  std::vector<std::vector<std::size_t>> out;
  EnumerateJoint(std::vector<std::size_t>(axes, max_extent), [&](const std::vector<std::size_t>& k) {
    std::vector<std::size_t> shape;
    for (std::size_t e : k) shape.push_back(e + 1);
    out.push_back(shape);
  });
  return out;
}

TEST(FullContract, SpecExamples) {
  const DenseTensor t({2, 2}, {1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(FullContract(t, {Vector::Unit(2, 0), Vector::Unit(2, 1)}), 2.0);
  EXPECT_DOUBLE_EQ(FullContract(t, {Vector::Constant(2, 0.5), Vector::Constant(2, 0.5)}), 2.5);
}

TEST(FullContract, MatchesEnumerationUpToFiveAxes) {
  Rng rng(11);
  for (std::size_t axes = 1; axes <= 5; ++axes) {
    for (const auto& shape : Shapes(axes, axes <= 3 ? 4 : 3)) {
      const DenseTensor t = RandomTensor(rng, shape);
      const MixProfile x = RandomMix(rng, shape);
      EXPECT_NEAR(FullContract(t, x), BruteForceContract(t, x), 1e-12);
    }
  }
}

TEST(FullContract, AcceptsVectorsOffTheSimplex) {
  Rng rng(3);
  const DenseTensor t = RandomTensor(rng, {3, 2, 4});
  VectorList x = {testing::RandomVector(rng, 3, -2, 2), testing::RandomVector(rng, 2, -2, 2),
                  testing::RandomVector(rng, 4, -2, 2)};
  EXPECT_NEAR(FullContract(t, x), BruteForceContract(t, x), 1e-12);
}

TEST(FullContract, IsLinearInEachArgument) {
  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const DenseTensor t = RandomTensor(rng, {2, 3, 2});
    MixProfile x = RandomMix(rng, t.shape());
    const std::size_t axis = rep % 3;
    const Vector a = x[axis];
    const Vector b = SampleSimplex(rng, static_cast<Eigen::Index>(t.extent(axis)));
    const double alpha = UnitUniform(rng);
    const double fa = FullContract(t, x);
    x[axis] = b;
    const double fb = FullContract(t, x);
    x[axis] = alpha * a + (1.0 - alpha) * b;
    EXPECT_NEAR(FullContract(t, x), alpha * fa + (1.0 - alpha) * fb, 1e-12);
  }
}

TEST(FullContract, RejectsMismatchedDimensions) {
  const DenseTensor t({2, 3});
  EXPECT_THROW(FullContract(t, {Vector::Ones(2)}), ShapeError);
  EXPECT_THROW(FullContract(t, {Vector::Ones(2), Vector::Ones(2)}), ShapeError);
}

TEST(ContractExcept, SelectsColumn) {
  const DenseTensor t({2, 2}, {1, 2, 3, 4});
  const Vector v = ContractExcept(t, {Vector::Constant(2, 0.3), Vector::Unit(2, 1)}, 0);
  EXPECT_DOUBLE_EQ(v[0], 2.0);
  EXPECT_DOUBLE_EQ(v[1], 4.0);
}

TEST(ContractExcept, EulerIdentityAndFiniteDifferences) {
  Rng rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    const DenseTensor t = RandomTensor(rng, {2, 3, 2});
    const MixProfile x = RandomMix(rng, t.shape());
    for (std::size_t axis = 0; axis < 3; ++axis) {
      const Vector v = ContractExcept(t, x, axis);
      EXPECT_NEAR(v.dot(x[axis]), FullContract(t, x), 1e-12);
      const Vector fd = testing::NumericGradient(
          [&](const Vector& xi) {
            MixProfile y = x;
            y[axis] = xi;
            return FullContract(t, y);
          },
          x[axis]);
      EXPECT_LE(testing::RelativeError(v, fd), 1e-6);
    }
  }
}

TEST(ContractExcept, MatchesEnumeration) {
  Rng rng(8);
  for (const auto& shape : Shapes(3, 3)) {
    const DenseTensor t = RandomTensor(rng, shape);
    const MixProfile x = RandomMix(rng, shape);
    for (std::size_t axis = 0; axis < 3; ++axis) {
      Vector oracle = Vector::Zero(static_cast<Eigen::Index>(shape[axis]));
      EnumerateJoint(shape, [&](const std::vector<std::size_t>& k) {
        double w = t.at(k);
        for (std::size_t a = 0; a < 3; ++a) {
          if (a != axis) w *= x[a][static_cast<Eigen::Index>(k[a])];
        }
        oracle[static_cast<Eigen::Index>(k[axis])] += w;
      });
      EXPECT_LE((ContractExcept(t, x, axis) - oracle).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(ContractExcept, RejectsAxisOutOfRange) {
  const DenseTensor t({2, 2});
  EXPECT_THROW(ContractExcept(t, {Vector::Ones(2), Vector::Ones(2)}, 2), std::out_of_range);
}

TEST(ContractExceptPair, TwoAxesReturnTensorItself) {
  const DenseTensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  const Matrix m = ContractExceptPair(t, {Vector::Ones(2), Vector::Ones(3)}, 0, 1);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(m(r, c), t.at({r, c}));
  }
  EXPECT_TRUE(ContractExceptPair(t, {Vector::Ones(2), Vector::Ones(3)}, 1, 0).isApprox(m.transpose()));
}

TEST(ContractExceptPair, OneHotSliceMatchesContractExcept) {
  Rng rng(9);
  const DenseTensor t = RandomTensor(rng, {2, 3, 2});
  MixProfile x = RandomMix(rng, t.shape());
  const Matrix m = ContractExceptPair(t, x, 0, 1);
  for (Eigen::Index l = 0; l < 3; ++l) {
    x[1] = Vector::Unit(3, l);
    EXPECT_LE((m.col(l) - ContractExcept(t, x, 0)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ContractExceptPair, MatchesFiniteDifferences) {
  Rng rng(10);
  for (int rep = 0; rep < 100; ++rep) {
    const DenseTensor t = RandomTensor(rng, {2, 2, 2});
    const MixProfile x = RandomMix(rng, t.shape());
    const std::size_t i = rep % 3, j = (rep + 1) % 3;
    const Matrix fd = testing::NumericJacobian(
        [&](const Vector& xj) {
          MixProfile y = x;
          y[j] = xj;
          return Vector(ContractExcept(t, y, i));
        },
        x[j]);
    EXPECT_LE(testing::RelativeError(ContractExceptPair(t, x, i, j), fd), 1e-6);
  }
}

TEST(ContractExceptPair, RejectsEqualAxes) {
  const DenseTensor t({2, 2});
  EXPECT_THROW(ContractExceptPair(t, {Vector::Ones(2), Vector::Ones(2)}, 1, 1),
               std::invalid_argument);
}

TEST(FillFrom, ConstantAndHandEvaluated) {
  const std::vector<Matrix> s = {Matrix::Zero(2, 1), Matrix::Ones(3, 1)};
  const DenseTensor sevens = FillFrom([](const Vector&) { return 7.0; }, s);
  EXPECT_EQ(sevens.shape(), (std::vector<std::size_t>{2, 3}));
  for (double v : sevens.data()) EXPECT_EQ(v, 7.0);

  Matrix s1(1, 2), s2(2, 2);
  s1 << 0, 0;
  s2 << 1, 0, 0, 2;
  const DenseTensor t = FillFrom(
      [](const Vector& j) { return -(j.head<2>() - j.tail<2>()).squaredNorm(); }, {s1, s2});
  EXPECT_DOUBLE_EQ(t.at({0, 0}), -1.0);
  EXPECT_DOUBLE_EQ(t.at({0, 1}), -4.0);
}

TEST(FillFrom, MatchesPerIndexEvaluation) {
  Rng rng(12);
  const std::vector<Matrix> s = {Matrix::Random(3, 2), Matrix::Random(2, 1), Matrix::Random(4, 3)};
  const Matrix quad = Matrix::Random(6, 6);
  const auto fn = [&](const Vector& j) { return j.dot(quad * j) + j.sum(); };
  const DenseTensor t = FillFrom(fn, s);
  EnumerateJoint({3, 2, 4}, [&](const std::vector<std::size_t>& k) {
    Vector joint(6);
    joint << s[0].row(k[0]).transpose(), s[1].row(k[1]).transpose(), s[2].row(k[2]).transpose();
    EXPECT_EQ(t.at(k), fn(joint));
  });
}

TEST(DenseTensor, IndexingAndShapeErrors) {
  DenseTensor t({2, 3});
  t.at({1, 2}) = 5.0;
  EXPECT_EQ(t[5], 5.0);
  EXPECT_THROW(t.at({2, 0}), ShapeError);
  EXPECT_THROW(t.at({0}), ShapeError);
  EXPECT_THROW(DenseTensor({2, 0}), ShapeError);
  EXPECT_THROW(DenseTensor({2, 2}, {1.0, 2.0}), ShapeError);
  EXPECT_THROW(t.AddScaled(1.0, DenseTensor({3, 2})), ShapeError);
}

}  // namespace
}  // namespace ccg
