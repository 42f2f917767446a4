#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "frc/errors.hpp"

namespace frc {

using Matrix = Eigen::MatrixXd;

// Shape contract for a partitioned multiply C = A^T B. A is s x r split into
// m column blocks, B is s x t split into n column blocks; the outer code
// widens the block grid to m_tilde x n_tilde. Indices are 0-based throughout.
struct PartitionSpec {
  int r = 0;
  int s = 0;
  int t = 0;
  int m = 1;
  int n = 1;
  int m_tilde = 1;
  int n_tilde = 1;

  int block_cols_a() const { return r / m; }
  int block_cols_b() const { return t / n; }
  int grid_cells() const { return m_tilde * n_tilde; }
  int source_cells() const { return m * n; }

  void validate() const;
};

// Row-major cell id of grid position (i, j); the column ordering of the
// coefficient matrix follows this enumeration.
int flat_index(int i, int j, const PartitionSpec& spec);
std::pair<int, int> grid_index(int k, const PartitionSpec& spec);

// m_tilde x n_tilde grid of block products; absent cells are erasures.
class BlockGrid {
 public:
  BlockGrid(int rows, int cols) : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows) * cols) {}

  static BlockGrid for_spec(const PartitionSpec& spec) { return BlockGrid(spec.m_tilde, spec.n_tilde); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool present(int i, int j) const { return cells_[slot(i, j)].has_value(); }
  const Matrix& cell(int i, int j) const;
  void set(int i, int j, Matrix value) { cells_[slot(i, j)] = std::move(value); }
  void erase(int i, int j) { cells_[slot(i, j)].reset(); }

 private:
  std::size_t slot(int i, int j) const;

  int rows_;
  int cols_;
  std::vector<std::optional<Matrix>> cells_;
};

// Splits X into k equal column blocks; concatenating them back is the
// identity. Throws NonDivisibleError when k does not divide the width.
std::vector<Matrix> split_columns(const Matrix& x, int k);

// Reassembles the r x t product from the systematic cells of the grid.
// Outer-parity cells are ignored; a missing systematic cell is an error.
Matrix assemble_product(const BlockGrid& grid, const PartitionSpec& spec);

}  // namespace frc
