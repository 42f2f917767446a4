#include "frc/support.hpp"

#include <algorithm>
#include <cmath>

namespace frc {

namespace {

constexpr double kPivotRelTolerance = 1e-10;

void axpy(std::vector<double>& acc, double scale, const std::vector<double>& x) {
  if (x.empty() || scale == 0.0) return;
  if (acc.size() < x.size()) acc.resize(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) acc[i] += scale * x[i];
}

bool all_zero(const std::vector<double>& v) {
  for (double x : v) {
    if (x != 0.0) return false;
  }
  return true;
}

}  // namespace

void SupportDecoder::resolve(int cell) {
  resolved_[cell] = 1;
  ++resolved_total_;
  const int gi = cell / shape_.n_tilde;
  const int gj = cell % shape_.n_tilde;
  if (gi < shape_.m && gj < shape_.n) ++resolved_systematic_;
  --line_row_missing_[gi];
  --line_col_missing_[gj];
  for (int a = adj_offsets_[cell]; a < adj_offsets_[cell + 1]; ++a) {
    const int row = adj_rows_[a];
    --row_live_[row];
    row_xor_[row] ^= cell;
    ++edge_ops_;
    if (row_live_[row] == 1) queue_.push_back(row);
  }
}

SupportOutcome SupportDecoder::run(std::span<const int> row_offsets, std::span<const int> edges,
                                   bool enable_fills) {
  const int rows = static_cast<int>(row_offsets.size()) - 1;
  const int cells = shape_.cells();

  adj_offsets_.assign(cells + 1, 0);
  for (int e : edges) ++adj_offsets_[e + 1];
  for (int c = 0; c < cells; ++c) adj_offsets_[c + 1] += adj_offsets_[c];
  adj_rows_.resize(edges.size());
  cursor_.assign(adj_offsets_.begin(), adj_offsets_.end() - 1);
  for (int r = 0; r < rows; ++r) {
    for (int e = row_offsets[r]; e < row_offsets[r + 1]; ++e) adj_rows_[cursor_[edges[e]]++] = r;
  }

  row_live_.resize(rows);
  row_xor_.assign(rows, 0);
  for (int r = 0; r < rows; ++r) {
    row_live_[r] = row_offsets[r + 1] - row_offsets[r];
    for (int e = row_offsets[r]; e < row_offsets[r + 1]; ++e) row_xor_[r] ^= edges[e];
  }
  resolved_.assign(cells, 0);
  line_row_missing_.assign(shape_.m_tilde, shape_.n_tilde);
  line_col_missing_.assign(shape_.n_tilde, shape_.m_tilde);
  resolved_total_ = 0;
  resolved_systematic_ = 0;
  edge_ops_ = 0;
  int peeled = 0;
  int filled = 0;

  queue_.clear();
  for (int r = 0; r < rows; ++r) {
    if (row_live_[r] == 1) queue_.push_back(r);
  }

  std::size_t head = 0;
  while (true) {
    while (head < queue_.size()) {
      const int row = queue_[head++];
      if (row_live_[row] != 1) continue;
      resolve(row_xor_[row]);
      ++peeled;
    }
    if (resolved_total_ == cells || !enable_fills) break;
    int fills = 0;
    while (true) {
      int round = 0;
      for (int i = 0; i < shape_.m_tilde; ++i) {
        const int missing = line_row_missing_[i];
        if (missing == 0 || missing > shape_.row_parity()) continue;
        for (int j = 0; j < shape_.n_tilde; ++j) {
          const int cell = i * shape_.n_tilde + j;
          if (!resolved_[cell]) {
            resolve(cell);
            ++round;
            ++filled;
          }
        }
      }
      for (int j = 0; j < shape_.n_tilde; ++j) {
        const int missing = line_col_missing_[j];
        if (missing == 0 || missing > shape_.col_parity()) continue;
        for (int i = 0; i < shape_.m_tilde; ++i) {
          const int cell = i * shape_.n_tilde + j;
          if (!resolved_[cell]) {
            resolve(cell);
            ++round;
            ++filled;
          }
        }
      }
      fills += round;
      if (round == 0) break;
    }
    if (fills == 0) break;
  }

  SupportOutcome out;
  out.success = resolved_systematic_ == shape_.source_cells();
  out.report.success = out.success;
  out.report.peeled = peeled;
  out.report.product_filled = filled;
  out.report.inactivated = 0;
  out.report.edge_operations = edge_ops_;
  return out;
}

SupportOutcome support_decode(const std::vector<std::vector<int>>& row_supports,
                              const OuterShape& shape, bool enable_fills) {
  std::vector<int> offsets(1, 0);
  std::vector<int> edges;
  for (const auto& support : row_supports) {
    edges.insert(edges.end(), support.begin(), support.end());
    offsets.push_back(static_cast<int>(edges.size()));
  }
  SupportDecoder decoder(shape);
  return decoder.run(offsets, edges, enable_fills);
}

void InactivationCounter::resolve(int cell, std::vector<double> dep, std::span<const int> row_offsets,
                                  std::span<const int> edges, std::span<const double> coeffs) {
  resolved_[cell] = 1;
  cell_dep_[cell] = std::move(dep);
  ++resolved_total_;
  const int gi = cell / shape_.n_tilde;
  const int gj = cell % shape_.n_tilde;
  if (gi < shape_.m && gj < shape_.n) ++resolved_systematic_;
  --line_row_missing_[gi];
  --line_col_missing_[gj];
  const std::vector<double>& d = cell_dep_[cell];
  for (int a = adj_offsets_[cell]; a < adj_offsets_[cell + 1]; ++a) {
    const int row = adj_rows_[a];
    if (!d.empty()) {
      double coeff = 0.0;
      for (int e = row_offsets[row]; e < row_offsets[row + 1]; ++e) {
        if (edges[e] == cell) {
          coeff = coeffs[e];
          break;
        }
      }
      axpy(row_dep_[row], coeff, d);
    }
    --row_live_[row];
    row_xor_[row] ^= cell;
    ++edge_ops_;
    if (row_live_[row] == 1 && !row_consumed_[row]) queue_.push_back(row);
  }
}

int InactivationCounter::fill_line(bool is_grid_row, int line, const Matrix& col_parity,
                                   const Matrix& row_parity, std::span<const int> row_offsets,
                                   std::span<const int> edges, std::span<const double> coeffs) {
  const Matrix& parity = is_grid_row ? row_parity : col_parity;
  const int k = is_grid_row ? shape_.n : shape_.m;
  const int length = is_grid_row ? shape_.n_tilde : shape_.m_tilde;
  const int missing = is_grid_row ? line_row_missing_[line] : line_col_missing_[line];
  if (missing == 0 || missing > length - k) return 0;

  auto cell_at = [&](int pos) {
    return is_grid_row ? line * shape_.n_tilde + pos : pos * shape_.n_tilde + line;
  };
  // relation q (a parity position) reads: u_q - sum_{c<k} parity(q-k,c) u_c = 0
  auto relation_coeff = [&](int q, int pos) -> double {
    if (pos < k) return -parity(q - k, pos);
    return pos == q ? 1.0 : 0.0;
  };

  std::vector<int> unknown;
  for (int pos = 0; pos < length; ++pos) {
    if (!resolved_[cell_at(pos)]) unknown.push_back(pos);
  }
  const int e = static_cast<int>(unknown.size());
  std::vector<int> relations;
  for (int pos : unknown) {
    if (pos >= k) relations.push_back(pos);
  }
  for (int q = k; q < length && static_cast<int>(relations.size()) < e; ++q) {
    if (std::find(relations.begin(), relations.end(), q) == relations.end()) relations.push_back(q);
  }

  std::vector<std::vector<double>> a(e, std::vector<double>(e, 0.0));
  std::vector<std::vector<double>> rhs(e);
  for (int r = 0; r < e; ++r) {
    const int q = relations[r];
    for (int u = 0; u < e; ++u) a[r][u] = relation_coeff(q, unknown[u]);
    for (int pos = 0; pos < length; ++pos) {
      const int cell = cell_at(pos);
      if (!resolved_[cell] || cell_dep_[cell].empty()) continue;
      const double coeff = relation_coeff(q, pos);
      if (coeff != 0.0) axpy(rhs[r], -coeff, cell_dep_[cell]);
    }
  }
  // forward elimination with partial pivoting on the e x e system
  for (int col = 0; col < e; ++col) {
    int pivot = col;
    for (int r = col + 1; r < e; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-300) {
      throw IllConditionedError("grid line fill hit a singular subsystem");
    }
    std::swap(a[pivot], a[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (int r = 0; r < e; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (int c = col; c < e; ++c) a[r][c] -= factor * a[col][c];
      axpy(rhs[r], -factor, rhs[col]);
    }
  }
  std::vector<char>& used = is_grid_row ? row_rel_used_ : col_rel_used_;
  const std::size_t used_base = static_cast<std::size_t>(line) * (length - k);
  for (int r = 0; r < e; ++r) used[used_base + (relations[r] - k)] = 1;
  for (int u = 0; u < e; ++u) {
    for (auto& v : rhs[u]) v /= a[u][u];
    resolve(cell_at(unknown[u]), std::move(rhs[u]), row_offsets, edges, coeffs);
    ++filled_;
  }
  return e;
}

bool InactivationCounter::deferred_system_full_rank(const Matrix& col_parity, const Matrix& row_parity) {
  if (y_count_ == 0) return true;
  deferred_.clear();
  for (std::size_t r = 0; r < row_dep_.size(); ++r) {
    if (row_consumed_[r] || all_zero(row_dep_[r])) continue;
    deferred_.push_back(row_dep_[r]);
  }
  auto emit_line = [&](bool is_grid_row, int line) {
    const Matrix& parity = is_grid_row ? row_parity : col_parity;
    const int k = is_grid_row ? shape_.n : shape_.m;
    const int length = is_grid_row ? shape_.n_tilde : shape_.m_tilde;
    const std::vector<char>& used = is_grid_row ? row_rel_used_ : col_rel_used_;
    const std::size_t used_base = static_cast<std::size_t>(line) * (length - k);
    for (int q = k; q < length; ++q) {
      if (used[used_base + (q - k)]) continue;
      std::vector<double> dep;
      for (int pos = 0; pos < length; ++pos) {
        const int cell = is_grid_row ? line * shape_.n_tilde + pos : pos * shape_.n_tilde + line;
        if (cell_dep_[cell].empty()) continue;
        const double coeff = (pos < k) ? -parity(q - k, pos) : (pos == q ? 1.0 : 0.0);
        if (coeff != 0.0) axpy(dep, coeff, cell_dep_[cell]);
      }
      if (!all_zero(dep)) deferred_.push_back(std::move(dep));
    }
  };
  for (int i = 0; i < shape_.m_tilde; ++i) emit_line(true, i);
  for (int j = 0; j < shape_.n_tilde; ++j) emit_line(false, j);

  const int eq_count = static_cast<int>(deferred_.size());
  if (eq_count < y_count_) return false;
  double global_max = 0.0;
  for (auto& dep : deferred_) {
    dep.resize(y_count_, 0.0);
    for (double v : dep) global_max = std::max(global_max, std::abs(v));
  }
  const double tol = kPivotRelTolerance * global_max;
  int next_row = 0;
  for (int col = 0; col < y_count_; ++col) {
    int pivot = -1;
    double best = tol;
    for (int r = next_row; r < eq_count; ++r) {
      if (std::abs(deferred_[r][col]) > best) {
        best = std::abs(deferred_[r][col]);
        pivot = r;
      }
    }
    if (pivot < 0) return false;
    std::swap(deferred_[pivot], deferred_[next_row]);
    for (int r = next_row + 1; r < eq_count; ++r) {
      const double factor = deferred_[r][col] / deferred_[next_row][col];
      if (factor == 0.0) continue;
      for (int c = col; c < y_count_; ++c) deferred_[r][c] -= factor * deferred_[next_row][c];
    }
    ++next_row;
  }
  return true;
}

SupportOutcome InactivationCounter::run(std::span<const int> row_offsets, std::span<const int> edges,
                                        std::span<const double> coeffs, const Matrix& col_parity,
                                        const Matrix& row_parity) {
  const int rows = static_cast<int>(row_offsets.size()) - 1;
  const int cells = shape_.cells();

  adj_offsets_.assign(cells + 1, 0);
  for (int e : edges) ++adj_offsets_[e + 1];
  for (int c = 0; c < cells; ++c) adj_offsets_[c + 1] += adj_offsets_[c];
  adj_rows_.resize(edges.size());
  {
    std::vector<int> cursor(adj_offsets_.begin(), adj_offsets_.end() - 1);
    for (int r = 0; r < rows; ++r) {
      for (int e = row_offsets[r]; e < row_offsets[r + 1]; ++e) adj_rows_[cursor[edges[e]]++] = r;
    }
  }

  row_live_.resize(rows);
  row_xor_.assign(rows, 0);
  row_consumed_.assign(rows, 0);
  for (int r = 0; r < rows; ++r) {
    row_live_[r] = row_offsets[r + 1] - row_offsets[r];
    for (int e = row_offsets[r]; e < row_offsets[r + 1]; ++e) row_xor_[r] ^= edges[e];
  }
  resolved_.assign(cells, 0);
  if (static_cast<int>(cell_dep_.size()) < cells) cell_dep_.resize(cells);
  for (auto& d : cell_dep_) d.clear();
  if (static_cast<int>(row_dep_.size()) < rows) row_dep_.resize(rows);
  for (int r = 0; r < rows; ++r) row_dep_[r].clear();
  row_dep_.resize(rows);
  row_rel_used_.assign(static_cast<std::size_t>(shape_.m_tilde) * shape_.row_parity(), 0);
  col_rel_used_.assign(static_cast<std::size_t>(shape_.n_tilde) * shape_.col_parity(), 0);
  line_row_missing_.assign(shape_.m_tilde, shape_.n_tilde);
  line_col_missing_.assign(shape_.n_tilde, shape_.m_tilde);
  y_count_ = 0;
  resolved_total_ = 0;
  resolved_systematic_ = 0;
  peeled_ = 0;
  filled_ = 0;
  edge_ops_ = 0;

  queue_.clear();
  for (int r = 0; r < rows; ++r) {
    if (row_live_[r] == 1) queue_.push_back(r);
  }

  std::size_t head = 0;
  while (resolved_total_ < cells) {
    bool acted = false;
    while (head < queue_.size()) {
      const int row = queue_[head++];
      if (row_live_[row] != 1 || row_consumed_[row]) continue;
      const int cell = row_xor_[row];
      double coeff = 0.0;
      for (int e = row_offsets[row]; e < row_offsets[row + 1]; ++e) {
        if (edges[e] == cell) {
          coeff = coeffs[e];
          break;
        }
      }
      if (std::abs(coeff) < 1e-300) throw NumericUnderflowError("zero coefficient on a degree-1 row");
      row_consumed_[row] = 1;
      std::vector<double> dep = row_dep_[row];
      for (auto& v : dep) v = -v / coeff;
      resolve(cell, std::move(dep), row_offsets, edges, coeffs);
      ++peeled_;
      acted = true;
    }
    if (resolved_total_ == cells) break;
    int fills = 0;
    while (true) {
      int round = 0;
      for (int i = 0; i < shape_.m_tilde; ++i) {
        round += fill_line(true, i, col_parity, row_parity, row_offsets, edges, coeffs);
      }
      for (int j = 0; j < shape_.n_tilde; ++j) {
        round += fill_line(false, j, col_parity, row_parity, row_offsets, edges, coeffs);
      }
      fills += round;
      if (round == 0) break;
    }
    if (fills > 0) continue;
    if (acted) continue;

    // stalled: defer the unresolved cell of maximum residual degree
    int best = -1;
    int best_degree = -1;
    for (int cell = 0; cell < cells; ++cell) {
      if (resolved_[cell]) continue;
      const int degree = adj_offsets_[cell + 1] - adj_offsets_[cell];
      if (degree > best_degree) {
        best = cell;
        best_degree = degree;
      }
    }
    std::vector<double> unit(static_cast<std::size_t>(y_count_) + 1, 0.0);
    unit.back() = 1.0;
    ++y_count_;
    resolve(best, std::move(unit), row_offsets, edges, coeffs);
  }

  SupportOutcome out;
  out.success = deferred_system_full_rank(col_parity, row_parity) &&
                resolved_systematic_ == shape_.source_cells();
  out.report.success = out.success;
  out.report.peeled = peeled_;
  out.report.product_filled = filled_;
  out.report.inactivated = y_count_;
  out.report.edge_operations = edge_ops_;
  return out;
}

}  // namespace frc
