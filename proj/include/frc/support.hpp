#pragma once

#include <span>
#include <vector>

#include "frc/decoder.hpp"

namespace frc {

// Grid dimensions of the outer product code, all the structural decoder
// needs to know about it.
struct OuterShape {
  int m_tilde = 1;
  int m = 1;
  int n_tilde = 1;
  int n = 1;

  int cells() const { return m_tilde * n_tilde; }
  int source_cells() const { return m * n; }
  int row_parity() const { return n_tilde - n; }
  int col_parity() const { return m_tilde - m; }
};

struct SupportOutcome {
  bool success = false;
  DecodeReport report;
};

// Coefficient-free mirror of the iterative decoder, valid because Gaussian
// coefficients make every peel and every line solve succeed whenever the
// support pattern permits. This is what Monte Carlo runs at scale.
//
// Reusable workspace: one instance per thread, run() per trial. Rows arrive
// as CSR (row_offsets has R+1 entries indexing into edges).
class SupportDecoder {
 public:
  explicit SupportDecoder(const OuterShape& shape) : shape_(shape) {}

  SupportOutcome run(std::span<const int> row_offsets, std::span<const int> edges,
                     bool enable_fills = true);

 private:
  void resolve(int cell);

  OuterShape shape_;
  std::vector<int> adj_offsets_;
  std::vector<int> adj_rows_;
  std::vector<int> cursor_;
  std::vector<int> row_live_;
  std::vector<int> row_xor_;
  std::vector<char> resolved_;
  std::vector<int> line_row_missing_;
  std::vector<int> line_col_missing_;
  std::vector<int> queue_;
  int resolved_total_ = 0;
  int resolved_systematic_ = 0;
  long long edge_ops_ = 0;
};

SupportOutcome support_decode(const std::vector<std::vector<int>>& row_supports,
                              const OuterShape& shape, bool enable_fills = true);

// Support-level inactivation decoder. Structure drives the peeling, the
// fills and the choice of inactivated cells; the actual coefficients (FLT
// products and outer parity entries) are carried through the affine
// bookkeeping so that the final success test is the true rank of the
// deferred system, exactly as the block decoder computes it.
class InactivationCounter {
 public:
  explicit InactivationCounter(const OuterShape& shape) : shape_(shape) {}

  // coeffs aligns with edges; col_parity is (m_tilde - m) x m and row_parity
  // (n_tilde - n) x n, the parity blocks of the two component codes.
  SupportOutcome run(std::span<const int> row_offsets, std::span<const int> edges,
                     std::span<const double> coeffs, const Matrix& col_parity,
                     const Matrix& row_parity);

 private:
  void resolve(int cell, std::vector<double> dep, std::span<const int> row_offsets,
               std::span<const int> edges, std::span<const double> coeffs);
  int fill_line(bool is_grid_row, int line, const Matrix& col_parity, const Matrix& row_parity,
                std::span<const int> row_offsets, std::span<const int> edges,
                std::span<const double> coeffs);
  bool deferred_system_full_rank(const Matrix& col_parity, const Matrix& row_parity);

  OuterShape shape_;
  std::vector<int> adj_offsets_;
  std::vector<int> adj_rows_;
  std::vector<int> row_live_;
  std::vector<int> row_xor_;
  std::vector<char> row_consumed_;
  std::vector<char> resolved_;
  std::vector<std::vector<double>> cell_dep_;
  std::vector<std::vector<double>> row_dep_;
  std::vector<char> row_rel_used_;
  std::vector<char> col_rel_used_;
  std::vector<int> line_row_missing_;
  std::vector<int> line_col_missing_;
  std::vector<int> queue_;
  std::vector<std::vector<double>> deferred_;
  int y_count_ = 0;
  int resolved_total_ = 0;
  int resolved_systematic_ = 0;
  int peeled_ = 0;
  int filled_ = 0;
  long long edge_ops_ = 0;
};

}  // namespace frc
