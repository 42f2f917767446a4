#include "doctest.h"
#include "frc/blockgrid.hpp"
#include "frc/rng.hpp"

using frc::Matrix;

namespace {

Matrix random_matrix(int rows, int cols, frc::Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
  }
  return m;
}

Matrix hcat(const std::vector<Matrix>& blocks) {
  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  Matrix out(blocks.front().rows(), cols);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

}  // namespace

TEST_CASE("split_columns on the identity") {
  const Matrix eye = Matrix::Identity(2, 2);
  const auto blocks = frc::split_columns(eye, 2);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0] == Matrix(eye.col(0)));
  CHECK(blocks[1] == Matrix(eye.col(1)));
}

TEST_CASE("split_columns into three named blocks") {
  frc::Rng rng(1);
  const Matrix x = random_matrix(4, 6, rng);
  const auto blocks = frc::split_columns(x, 3);
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[0] == Matrix(x.middleCols(0, 2)));
  CHECK(blocks[1] == Matrix(x.middleCols(2, 2)));
  CHECK(blocks[2] == Matrix(x.middleCols(4, 2)));
}

TEST_CASE("split then concatenate is the identity") {
  frc::Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(5));
    const int cols = k * (1 + static_cast<int>(rng.below(4)));
    const Matrix x = random_matrix(1 + static_cast<int>(rng.below(6)), cols, rng);
    CHECK(hcat(frc::split_columns(x, k)) == x);
  }
}

TEST_CASE("split_columns rejects non-divisors") {
  CHECK_THROWS_AS(frc::split_columns(Matrix::Zero(2, 5), 3), frc::NonDivisibleError);
}

TEST_CASE("flat_index is row-major and bijective") {
  frc::PartitionSpec spec{.r = 3, .s = 1, .t = 3, .m = 3, .n = 3, .m_tilde = 3, .n_tilde = 3};
  CHECK(frc::flat_index(0, 0, spec) == 0);
  CHECK(frc::flat_index(1, 0, spec) == 3);  // one full row ahead
  std::vector<char> seen(9, 0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int k = frc::flat_index(i, j, spec);
      CHECK(!seen[k]);
      seen[k] = 1;
      const auto [bi, bj] = frc::grid_index(k, spec);
      CHECK(bi == i);
      CHECK(bj == j);
    }
  }
  CHECK_THROWS_AS(frc::flat_index(3, 0, spec), frc::OutOfRangeError);
  CHECK_THROWS_AS(frc::grid_index(9, spec), frc::OutOfRangeError);
}

TEST_CASE("assemble_product returns the lone block") {
  frc::PartitionSpec spec{.r = 2, .s = 2, .t = 2, .m = 1, .n = 1, .m_tilde = 1, .n_tilde = 1};
  frc::Rng rng(3);
  const Matrix m = random_matrix(2, 2, rng);
  frc::BlockGrid grid(1, 1);
  grid.set(0, 0, m);
  CHECK(frc::assemble_product(grid, spec) == m);
}

TEST_CASE("assemble_product equals the dense product") {
  frc::Rng rng(4);
  frc::PartitionSpec spec{.r = 6, .s = 6, .t = 6, .m = 2, .n = 2, .m_tilde = 2, .n_tilde = 2};
  const Matrix a = random_matrix(6, 6, rng);
  const Matrix b = random_matrix(6, 6, rng);
  const auto blocks_a = frc::split_columns(a, 2);
  const auto blocks_b = frc::split_columns(b, 2);
  frc::BlockGrid grid(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) grid.set(i, j, blocks_a[i].transpose() * blocks_b[j]);
  }
  // block copies reorder nothing, so this is exact
  CHECK(frc::assemble_product(grid, spec) == Matrix(a.transpose() * b));
}

TEST_CASE("assemble_product reports the missing cell") {
  frc::PartitionSpec spec{.r = 4, .s = 2, .t = 4, .m = 2, .n = 2, .m_tilde = 2, .n_tilde = 2};
  frc::BlockGrid grid(2, 2);
  grid.set(0, 0, Matrix::Zero(2, 2));
  grid.set(1, 0, Matrix::Zero(2, 2));
  grid.set(1, 1, Matrix::Zero(2, 2));
  try {
    frc::assemble_product(grid, spec);
    FAIL("expected MissingBlockError");
  } catch (const frc::MissingBlockError& e) {
    CHECK(e.row == 0);
    CHECK(e.col == 1);
  }
}
