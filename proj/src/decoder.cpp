#include "frc/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace frc {

namespace {

constexpr double kPeelCoeffFloor = 1e-12;
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

// Small dense solve with partial pivoting; A is overwritten. Returns false
// on a (structurally impossible, numerically conceivable) singular system.
bool solve_small(std::vector<std::vector<double>>& a, std::vector<Matrix>& rhs_x,
                 std::vector<std::vector<double>>& rhs_d) {
  const int e = static_cast<int>(a.size());
  for (int col = 0; col < e; ++col) {
    int pivot = col;
    for (int r = col + 1; r < e; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[pivot], a[col]);
    std::swap(rhs_x[pivot], rhs_x[col]);
    std::swap(rhs_d[pivot], rhs_d[col]);
    for (int r = 0; r < e; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (int c = col; c < e; ++c) a[r][c] -= factor * a[col][c];
      rhs_x[r] -= factor * rhs_x[col];
      axpy(rhs_d[r], -factor, rhs_d[col]);
    }
  }
  for (int r = 0; r < e; ++r) {
    const double d = a[r][r];
    rhs_x[r] /= d;
    for (auto& v : rhs_d[r]) v /= d;
  }
  return true;
}

}  // namespace

std::string DecodeReport::csv_line() const {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%lld", success ? "SUCCESS" : "FAILURE", peeled,
                product_filled, inactivated, edge_operations);
  return buf;
}

DecodeState::DecodeState(const PartitionSpec& spec, std::vector<WorkerResult> results)
    : spec_(spec), grid_(spec.m_tilde, spec.n_tilde) {
  spec_.validate();
  block_rows_ = spec_.block_cols_a();
  block_cols_ = spec_.block_cols_b();

  cells_.resize(spec_.grid_cells());
  cell_rows_.resize(spec_.grid_cells());
  grid_row_missing_.assign(spec_.m_tilde, spec_.n_tilde);
  grid_col_missing_.assign(spec_.n_tilde, spec_.m_tilde);
  row_relation_used_.assign(static_cast<std::size_t>(spec_.m_tilde) * (spec_.n_tilde - spec_.n), 0);
  col_relation_used_.assign(static_cast<std::size_t>(spec_.n_tilde) * (spec_.m_tilde - spec_.m), 0);

  rows_.reserve(results.size());
  for (auto& res : results) {
    if (res.value.rows() != block_rows_ || res.value.cols() != block_cols_) {
      throw ShapeMismatchError("worker result has wrong block shape");
    }
    Row row;
    row.residual = std::move(res.value);
    const auto& task = res.task;
    row.cells.reserve(task.index_a.size() * task.index_b.size());
    row.coeff.reserve(task.index_a.size() * task.index_b.size());
    for (std::size_t i = 0; i < task.index_a.size(); ++i) {
      for (std::size_t j = 0; j < task.index_b.size(); ++j) {
        const int cell = flat_index(task.index_a[i], task.index_b[j], spec_);
        row.cells.push_back(cell);
        row.coeff.push_back(task.coeff_a[i] * task.coeff_b[j]);
        row.xor_cells ^= cell;
      }
    }
    row.live = static_cast<int>(row.cells.size());
    const int row_id = static_cast<int>(rows_.size());
    for (int cell : row.cells) cell_rows_[cell].push_back(row_id);
    rows_.push_back(std::move(row));
  }
  for (int p = 0; p < static_cast<int>(rows_.size()); ++p) {
    if (rows_[p].live == 1) peel_queue_.push_back(p);
  }
}

void DecodeState::resolve_cell(int cell, Matrix x_part, std::vector<double> d_part,
                               RecoveryEvent::Kind kind) {
  Cell& c = cells_[cell];
  c.resolved = true;
  c.value = std::move(x_part);
  c.ydep = std::move(d_part);

  ++resolved_total_;
  const auto [gi, gj] = grid_index(cell, spec_);
  if (gi < spec_.m && gj < spec_.n) ++resolved_systematic_;
  --grid_row_missing_[gi];
  --grid_col_missing_[gj];
  if (c.ydep.empty()) grid_.set(gi, gj, c.value);  // exact value known already
  trace_.push_back({kind, cell});
  switch (kind) {
    case RecoveryEvent::Kind::kPeel:
      ++peeled_;
      break;
    case RecoveryEvent::Kind::kFill:
      ++filled_;
      break;
    case RecoveryEvent::Kind::kInactivate:
      ++inactivated_count_;
      break;
  }

  for (int row_id : cell_rows_[cell]) {
    Row& row = rows_[row_id];
    // locate the coefficient; supports are small
    double coeff = 0.0;
    for (std::size_t e = 0; e < row.cells.size(); ++e) {
      if (row.cells[e] == cell) {
        coeff = row.coeff[e];
        break;
      }
    }
    row.residual.noalias() -= coeff * c.value;
    axpy(row.ydep, coeff, c.ydep);
    row.xor_cells ^= cell;
    --row.live;
    ++edge_ops_;
    if (row.live == 1 && !row.consumed) peel_queue_.push_back(row_id);
  }
}

bool DecodeState::peel_step() {
  while (peel_head_ < peel_queue_.size()) {
    const int row_id = peel_queue_[peel_head_++];
    Row& row = rows_[row_id];
    if (row.live != 1 || row.consumed) continue;  // stale entry
    const int cell = row.xor_cells;
    double coeff = 0.0;
    for (std::size_t e = 0; e < row.cells.size(); ++e) {
      if (row.cells[e] == cell) {
        coeff = row.coeff[e];
        break;
      }
    }
    if (std::abs(coeff) < kPeelCoeffFloor) {
      throw NumericUnderflowError("degree-1 coefficient too small to divide by");
    }
    row.consumed = true;
    Matrix x_part = row.residual / coeff;
    std::vector<double> d_part = row.ydep;
    for (auto& v : d_part) v = -v / coeff;
    resolve_cell(cell, std::move(x_part), std::move(d_part), RecoveryEvent::Kind::kPeel);
    return true;
  }
  return false;
}

// Erasure-fills one grid line through the parity relations of its component
// code, so that exactly the consumed relations drop out of the final solve.
int DecodeState::fill_line(bool is_grid_row, int line, const OuterProductCode& outer) {
  const MdsCode& code = is_grid_row ? outer.row_code : outer.col_code;
  const int length = code.n();
  const int k = code.k();
  const int missing = is_grid_row ? grid_row_missing_[line] : grid_col_missing_[line];
  if (missing == 0 || missing > code.parity()) return 0;

  auto cell_at = [&](int pos) { return is_grid_row ? flat_index(line, pos, spec_) : flat_index(pos, line, spec_); };
  std::vector<char>& used =
      is_grid_row ? row_relation_used_ : col_relation_used_;
  const std::size_t used_base = static_cast<std::size_t>(line) * code.parity();

  std::vector<int> unknown;
  for (int pos = 0; pos < length; ++pos) {
    if (!cells_[cell_at(pos)].resolved) unknown.push_back(pos);
  }
  const int e = static_cast<int>(unknown.size());

  // Relations: one per erased parity position, topped up with the
  // lowest-indexed unused parity relations.
  std::vector<int> relations;
  for (int pos : unknown) {
    if (pos >= k) relations.push_back(pos);
  }
  for (int q = k; q < length && static_cast<int>(relations.size()) < e; ++q) {
    if (std::find(relations.begin(), relations.end(), q) == relations.end()) relations.push_back(q);
  }

  const Matrix& g = code.generator();
  auto relation_coeff = [&](int q, int pos) -> double {
    if (pos < k) return -g(q, pos);
    return pos == q ? 1.0 : 0.0;
  };

  std::vector<std::vector<double>> a(e, std::vector<double>(e, 0.0));
  std::vector<Matrix> rhs_x(e, Matrix::Zero(block_rows_, block_cols_));
  std::vector<std::vector<double>> rhs_d(e);
  for (int r = 0; r < e; ++r) {
    const int q = relations[r];
    for (int u = 0; u < e; ++u) a[r][u] = relation_coeff(q, unknown[u]);
    for (int pos = 0; pos < length; ++pos) {
      const Cell& c = cells_[cell_at(pos)];
      if (!c.resolved) continue;
      const double coeff = relation_coeff(q, pos);
      if (coeff == 0.0) continue;
      rhs_x[r].noalias() -= coeff * c.value;
      axpy(rhs_d[r], -coeff, c.ydep);
    }
  }
  if (!solve_small(a, rhs_x, rhs_d)) {
    throw IllConditionedError("grid line fill hit a singular subsystem");
  }
  for (int r = 0; r < e; ++r) used[used_base + (relations[r] - k)] = 1;
  for (int u = 0; u < e; ++u) {
    resolve_cell(cell_at(unknown[u]), std::move(rhs_x[u]), std::move(rhs_d[u]),
                 RecoveryEvent::Kind::kFill);
  }
  return e;
}

int DecodeState::product_fill_pass(const OuterProductCode& outer) {
  if (outer.row_code.parity() == 0 && outer.col_code.parity() == 0) return 0;
  int total = 0;
  while (true) {
    int round = 0;
    for (int i = 0; i < spec_.m_tilde; ++i) round += fill_line(true, i, outer);
    for (int j = 0; j < spec_.n_tilde; ++j) round += fill_line(false, j, outer);
    total += round;
    if (round == 0) break;
  }
  return total;
}

void DecodeState::inactivate_one() {
  int best = -1;
  std::size_t best_degree = 0;
  for (int cell = 0; cell < spec_.grid_cells(); ++cell) {
    if (cells_[cell].resolved) continue;
    const std::size_t degree = cell_rows_[cell].size();
    if (best < 0 || degree > best_degree) {
      best = cell;
      best_degree = degree;
    }
  }
  if (best < 0) throw Error("inactivation requested with no unresolved cell");
  const int y_index = inactivated_count_;
  cells_[best].y_index = y_index;
  std::vector<double> unit(static_cast<std::size_t>(y_index) + 1, 0.0);
  unit.back() = 1.0;
  resolve_cell(best, Matrix::Zero(block_rows_, block_cols_), std::move(unit),
               RecoveryEvent::Kind::kInactivate);
}

void DecodeState::add_parity_equations(const OuterProductCode& outer,
                                       std::vector<std::vector<double>>& lhs,
                                       std::vector<Matrix>& rhs) const {
  auto emit_line = [&](bool is_grid_row, int line, const MdsCode& code, const std::vector<char>& used) {
    const int k = code.k();
    const std::size_t used_base = static_cast<std::size_t>(line) * code.parity();
    for (int q = k; q < code.n(); ++q) {
      if (used[used_base + (q - k)]) continue;
      std::vector<double> dep;
      Matrix value = Matrix::Zero(block_rows_, block_cols_);
      for (int pos = 0; pos < code.n(); ++pos) {
        const double coeff = (pos < k) ? -code.generator()(q, pos) : (pos == q ? 1.0 : 0.0);
        if (coeff == 0.0) continue;
        const Cell& c =
            cells_[is_grid_row ? flat_index(line, pos, spec_) : flat_index(pos, line, spec_)];
        value.noalias() += coeff * c.value;
        axpy(dep, coeff, c.ydep);
      }
      if (all_zero(dep)) continue;  // satisfied consequence of consumed equations
      lhs.push_back(std::move(dep));
      rhs.push_back(-value);  // dep * Y = -value
    }
  };
  for (int i = 0; i < spec_.m_tilde; ++i) emit_line(true, i, outer.row_code, row_relation_used_);
  for (int j = 0; j < spec_.n_tilde; ++j) emit_line(false, j, outer.col_code, col_relation_used_);
}

bool DecodeState::solve_inactivated(const OuterProductCode& outer, bool with_parity_rows) {
  const int y_count = inactivated_count_;
  if (y_count == 0) return true;

  // Every unconsumed equation, written over Y. Row equations read
  // ydep * Y = residual once the support is empty.
  std::vector<std::vector<double>> lhs;
  std::vector<Matrix> rhs;
  for (const Row& row : rows_) {
    if (row.consumed || row.live != 0) continue;
    if (all_zero(row.ydep)) continue;
    lhs.push_back(row.ydep);
    rhs.push_back(row.residual);
  }
  if (with_parity_rows) add_parity_equations(outer, lhs, rhs);

  const int eq_count = static_cast<int>(lhs.size());
  if (eq_count < y_count) return false;
  double global_max = 0.0;
  for (auto& dep : lhs) {
    dep.resize(y_count, 0.0);
    for (double v : dep) global_max = std::max(global_max, std::abs(v));
  }
  // Pivots are judged against the scale of the whole system: a column whose
  // entries are pure cancellation residue must not certify itself.
  const double tol = kPivotRelTolerance * global_max;
  if (global_max == 0.0) return false;

  std::vector<int> pivot_row_of(y_count, -1);
  int next_row = 0;
  for (int col = 0; col < y_count; ++col) {
    int pivot = -1;
    double best = tol;
    for (int r = next_row; r < eq_count; ++r) {
      if (std::abs(lhs[r][col]) > best) {
        best = std::abs(lhs[r][col]);
        pivot = r;
      }
    }
    if (pivot < 0) return false;  // rank deficient
    std::swap(lhs[pivot], lhs[next_row]);
    std::swap(rhs[pivot], rhs[next_row]);
    for (int r = 0; r < eq_count; ++r) {
      if (r == next_row) continue;
      const double factor = lhs[r][col] / lhs[next_row][col];
      if (factor == 0.0) continue;
      for (int c = col; c < y_count; ++c) lhs[r][c] -= factor * lhs[next_row][c];
      rhs[r].noalias() -= factor * rhs[next_row];
    }
    pivot_row_of[col] = next_row;
    ++next_row;
  }

  std::vector<Matrix> y_values(y_count);
  for (int col = 0; col < y_count; ++col) {
    const int r = pivot_row_of[col];
    y_values[col] = rhs[r] / lhs[r][col];
  }

  // Back-substitute into every affine cell and refresh the grid.
  for (int cell = 0; cell < spec_.grid_cells(); ++cell) {
    Cell& c = cells_[cell];
    if (!c.resolved || c.ydep.empty()) continue;
    for (std::size_t y = 0; y < c.ydep.size(); ++y) {
      if (c.ydep[y] != 0.0) c.value.noalias() += c.ydep[y] * y_values[y];
    }
    c.ydep.clear();
    const auto [gi, gj] = grid_index(cell, spec_);
    grid_.set(gi, gj, c.value);
  }
  return true;
}

DecodeReport DecodeState::report() const {
  DecodeReport rep;
  rep.success = all_systematic_resolved();
  rep.peeled = peeled_;
  rep.product_filled = filled_;
  rep.inactivated = inactivated_count_;
  rep.edge_operations = edge_ops_;
  return rep;
}

std::vector<std::pair<int, double>> DecodeState::residual_support(int row) const {
  std::vector<std::pair<int, double>> out;
  const Row& r = rows_[row];
  for (std::size_t e = 0; e < r.cells.size(); ++e) {
    if (!cells_[r.cells[e]].resolved) out.emplace_back(r.cells[e], r.coeff[e]);
  }
  return out;
}

DecodeResult decode(const PartitionSpec& spec, const OuterProductCode& outer,
                    std::vector<WorkerResult> results) {
  DecodeState state(spec, std::move(results));
  while (true) {
    while (state.peel_step()) {
    }
    if (state.all_cells_resolved()) break;
    if (state.product_fill_pass(outer) == 0) break;
  }
  DecodeResult out;
  out.report = state.report();
  out.trace = state.trace();
  if (out.report.success) out.product = assemble_product(state.grid(), spec);
  return out;
}

DecodeResult inactivation_decode(const PartitionSpec& spec, const OuterProductCode& outer,
                                 std::vector<WorkerResult> results, bool parity_rows_in_solve) {
  DecodeState state(spec, std::move(results));
  while (!state.all_cells_resolved()) {
    while (state.peel_step()) {
    }
    if (state.all_cells_resolved()) break;
    if (state.product_fill_pass(outer) > 0) continue;
    state.inactivate_one();
  }
  const bool solved = state.solve_inactivated(outer, parity_rows_in_solve);
  DecodeResult out;
  out.report = state.report();
  out.report.success = solved && state.all_systematic_resolved();
  out.trace = state.trace();
  if (out.report.success) out.product = assemble_product(state.grid(), spec);
  return out;
}

}  // namespace frc
