#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "frc/blockgrid.hpp"
#include "frc/degrees.hpp"
#include "frc/rng.hpp"

namespace frc {

// Unit coefficients exist to make worked instances hand-checkable; Gaussian
// is the operating mode.
enum class CoeffMode { kGaussian, kUnit };

// One worker's assignment: which blocks of each input it combines and with
// what weights. Coefficients are nonzero exactly on the index sets, so the
// worker's product covers the Cartesian product index_a x index_b of grid
// cells.
struct WorkerTask {
  int worker = 0;
  std::vector<int> index_a;      // sorted block indices into [0, m_tilde)
  std::vector<double> coeff_a;   // aligned with index_a
  std::vector<int> index_b;      // sorted block indices into [0, n_tilde)
  std::vector<double> coeff_b;

  int degree() const { return static_cast<int>(index_a.size() * index_b.size()); }

  // Line record "p; i:a,... ; j:b,..." used by fixture files.
  std::string to_record() const;
  static WorkerTask from_record(const std::string& line);
};

// Draw order per task is fixed for reproducibility: degree, split, index
// set A, index set B, then coefficients for A and B (Gaussian mode only).
// The same routine backs both the public API and the simulation hot path.
struct TaskDraw {
  int d1 = 0;
  int d2 = 0;
  std::vector<int> index_a;
  std::vector<int> index_b;
  std::vector<double> coeff_a;
  std::vector<double> coeff_b;
};

void draw_task(const PartitionSpec& spec, const DegreeDistribution& dist, const SplitTable& splits,
               SplitScheme scheme, CoeffMode mode, Rng& rng, TaskDraw& out);

// Tasks for worker_count workers drawn sequentially from one stream.
// The distribution must validate against (m_tilde, n_tilde).
std::vector<WorkerTask> generate_tasks(const PartitionSpec& spec, const DegreeDistribution& dist,
                                       SplitScheme scheme, int worker_count, CoeffMode mode, Rng& rng);

// Weighted block sums sent to a worker: (sum a_i A_i, sum b_j B_j).
std::pair<Matrix, Matrix> encode_inputs(const WorkerTask& task, std::span<const Matrix> blocks_a,
                                        std::span<const Matrix> blocks_b);

// The worker-side product.
Matrix worker_compute(const Matrix& a_tilde, const Matrix& b_tilde);

// Dense coefficient row of length m_tilde * n_tilde: the flattened outer
// product of the task's coefficient vectors.
Eigen::VectorXd coefficient_row(const WorkerTask& task, const PartitionSpec& spec);

// Sparse N x (m_tilde * n_tilde) coefficient matrix; one row per task, row
// support the Cartesian product of the task's index sets.
struct CoefficientMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<int>> support;     // per row: sorted cell ids
  std::vector<std::vector<double>> values;   // aligned coefficients

  Matrix dense() const;
};

CoefficientMatrix coefficient_matrix(std::span<const WorkerTask> tasks, const PartitionSpec& spec);

}  // namespace frc
