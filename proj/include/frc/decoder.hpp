#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frc/blockgrid.hpp"
#include "frc/flt.hpp"
#include "frc/outer.hpp"

namespace frc {

struct DecodeReport {
  bool success = false;
  int peeled = 0;
  int product_filled = 0;
  int inactivated = 0;
  long long edge_operations = 0;

  // "outcome,peeled,product_filled,inactivated,edge_ops"
  std::string csv_line() const;
};

struct RecoveryEvent {
  enum class Kind { kPeel, kFill, kInactivate };
  Kind kind;
  int cell;  // flat grid index
};

// One worker's computed product paired with the task that produced it.
struct WorkerResult {
  WorkerTask task;
  Matrix value;
};

// Master-side recovery state over the residual bipartite graph between grid
// cells and received rows.
//
// Every resolved cell carries an affine form  value = X + D * Y  over the
// ordered list Y of inactivated cells; D stays empty until an inactivation
// happens, so the plain peel/fill decoder pays nothing for the machinery.
// Rows maintain the matching residual: sum_k c_k * cell_k + ydep * Y = value.
class DecodeState {
 public:
  DecodeState(const PartitionSpec& spec, std::vector<WorkerResult> results);

  // Consumes one degree-1 row: divides out the coefficient, substitutes the
  // recovered cell into every incident row. Returns false when no degree-1
  // row exists.
  bool peel_step();

  // Grid-line erasure fills, row sweeps before column sweeps, repeated to a
  // fixed point; every filled cell is substituted into the residual rows
  // exactly like a peeled one. Returns the number of cells filled.
  int product_fill_pass(const OuterProductCode& outer);

  // Marks the unresolved cell of maximum residual degree (lowest id on
  // ties) as inactivated: it becomes the next coordinate of Y.
  void inactivate_one();

  // Solves for the inactivated cells by Gaussian elimination over every
  // equation not consumed as a definition (residual rows, plus outer parity
  // relations when with_parity_rows is set), then back-substitutes into the
  // affine cells. False when the system is rank-deficient.
  bool solve_inactivated(const OuterProductCode& outer, bool with_parity_rows);

  bool all_cells_resolved() const { return resolved_total_ == spec_.grid_cells(); }
  bool all_systematic_resolved() const { return resolved_systematic_ == spec_.source_cells(); }

  const PartitionSpec& spec() const { return spec_; }
  const BlockGrid& grid() const { return grid_; }
  const std::vector<RecoveryEvent>& trace() const { return trace_; }
  DecodeReport report() const;

  // Residual inspection, used by tests that replay the algebra from scratch.
  int row_count() const { return static_cast<int>(rows_.size()); }
  std::vector<std::pair<int, double>> residual_support(int row) const;
  const Matrix& residual_value(int row) const { return rows_[row].residual; }
  bool cell_resolved(int cell) const { return cells_[cell].resolved; }

 private:
  struct Row {
    std::vector<int> cells;      // original support, ascending
    std::vector<double> coeff;   // aligned
    Matrix residual;
    std::vector<double> ydep;    // accumulated coefficients over Y
    int live = 0;                // unresolved cells remaining
    int xor_cells = 0;           // xor of unresolved cell ids
    bool consumed = false;       // served as a peeling definition
  };
  struct Cell {
    bool resolved = false;
    int y_index = -1;            // >= 0 when inactivated
    Matrix value;                // X part; meaningful once resolved
    std::vector<double> ydep;    // D part; empty means zero
  };

  void resolve_cell(int cell, Matrix x_part, std::vector<double> d_part, RecoveryEvent::Kind kind);
  int fill_line(bool is_grid_row, int line, const OuterProductCode& outer);
  void add_parity_equations(const OuterProductCode& outer, std::vector<std::vector<double>>& lhs,
                            std::vector<Matrix>& rhs) const;

  PartitionSpec spec_;
  std::vector<Row> rows_;
  std::vector<Cell> cells_;
  std::vector<std::vector<int>> cell_rows_;  // cell -> incident row ids
  std::vector<int> peel_queue_;
  std::size_t peel_head_ = 0;
  std::vector<int> grid_row_missing_;
  std::vector<int> grid_col_missing_;
  std::vector<char> row_relation_used_;  // (m_tilde x parity) fills along grid rows
  std::vector<char> col_relation_used_;  // (n_tilde x parity) fills along grid columns
  BlockGrid grid_;
  std::vector<RecoveryEvent> trace_;
  int resolved_total_ = 0;
  int resolved_systematic_ = 0;
  int inactivated_count_ = 0;
  int peeled_ = 0;
  int filled_ = 0;
  long long edge_ops_ = 0;
  int block_rows_ = 0;
  int block_cols_ = 0;
};

struct DecodeResult {
  DecodeReport report;
  std::optional<Matrix> product;  // set on success
  std::vector<RecoveryEvent> trace;
};

// Iterative recovery: peeling to exhaustion, then grid-line fills, looping
// back to peeling whenever filling makes progress. Succeeds when every
// systematic cell is recovered.
DecodeResult decode(const PartitionSpec& spec, const OuterProductCode& outer,
                    std::vector<WorkerResult> results);

// Maximum-likelihood recovery: on every stall one more cell is inactivated
// and peeling resumes symbolically; the deferred cells are then solved by
// Gaussian elimination. Rank deficiency of that solve is the only failure.
DecodeResult inactivation_decode(const PartitionSpec& spec, const OuterProductCode& outer,
                                 std::vector<WorkerResult> results, bool parity_rows_in_solve = true);

}  // namespace frc
