#include "frc/blockgrid.hpp"

namespace frc {

void PartitionSpec::validate() const {
  if (r <= 0 || s <= 0 || t <= 0 || m <= 0 || n <= 0 || m_tilde <= 0 || n_tilde <= 0) {
    throw Error("partition dimensions must be positive");
  }
  if (r % m != 0) throw NonDivisibleError(m, r);
  if (t % n != 0) throw NonDivisibleError(n, t);
  if (m_tilde < m) throw Error("m_tilde must be at least m");
  if (n_tilde < n) throw Error("n_tilde must be at least n");
}

int flat_index(int i, int j, const PartitionSpec& spec) {
  if (i < 0 || i >= spec.m_tilde || j < 0 || j >= spec.n_tilde) {
    throw OutOfRangeError("grid position (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
  }
  return i * spec.n_tilde + j;
}

std::pair<int, int> grid_index(int k, const PartitionSpec& spec) {
  if (k < 0 || k >= spec.grid_cells()) {
    throw OutOfRangeError("cell id " + std::to_string(k) + " out of range");
  }
  return {k / spec.n_tilde, k % spec.n_tilde};
}

std::size_t BlockGrid::slot(int i, int j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) {
    throw OutOfRangeError("grid position (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
  }
  return static_cast<std::size_t>(i) * cols_ + j;
}

const Matrix& BlockGrid::cell(int i, int j) const {
  const auto& c = cells_[slot(i, j)];
  if (!c.has_value()) throw MissingBlockError(i, j);
  return *c;
}

std::vector<Matrix> split_columns(const Matrix& x, int k) {
  if (k <= 0 || x.cols() % k != 0) throw NonDivisibleError(k, static_cast<int>(x.cols()));
  const Eigen::Index width = x.cols() / k;
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(k));
  for (int b = 0; b < k; ++b) blocks.push_back(x.middleCols(b * width, width));
  return blocks;
}

Matrix assemble_product(const BlockGrid& grid, const PartitionSpec& spec) {
  const int bh = spec.block_cols_a();
  const int bw = spec.block_cols_b();
  Matrix out(spec.r, spec.t);
  for (int i = 0; i < spec.m; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      if (!grid.present(i, j)) throw MissingBlockError(i, j);
      const Matrix& block = grid.cell(i, j);
      if (block.rows() != bh || block.cols() != bw) {
        throw ShapeMismatchError("grid cell has wrong block shape");
      }
      out.block(i * bh, j * bw, bh, bw) = block;
    }
  }
  return out;
}

}  // namespace frc
