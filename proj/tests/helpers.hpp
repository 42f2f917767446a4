#pragma once

#include <cmath>
#include <vector>

#include "frc/blockgrid.hpp"
#include "frc/decoder.hpp"
#include "frc/degrees.hpp"
#include "frc/outer.hpp"
#include "frc/rng.hpp"

namespace testutil {

inline frc::Matrix random_matrix(int rows, int cols, frc::Rng& rng) {
  frc::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
  }
  return m;
}

// Degree distribution used by the large straggler-sweep experiments.
inline frc::DegreeDistribution sweep_distribution() {
  return frc::DegreeDistribution::from_mass({{1, 0.013},
                                             {2, 0.5},
                                             {3, 0.1661},
                                             {4, 0.0726},
                                             {5, 0.0826},
                                             {8, 0.0581},
                                             {9, 0.0340},
                                             {18, 0.0576},
                                             {66, 0.0160}});
}

// The matching partition: an 80x80 source grid widened to 82x82. Block
// dimensions are placeholders; support-level simulation never touches them.
inline frc::PartitionSpec sweep_spec() {
  return frc::PartitionSpec{.r = 80, .s = 1, .t = 80, .m = 80, .n = 80, .m_tilde = 82, .n_tilde = 82};
}

struct Instance {
  frc::Matrix a;
  frc::Matrix b;
  std::vector<frc::Matrix> coded_a;
  std::vector<frc::Matrix> coded_b;
  std::vector<frc::WorkerResult> results;  // one per task, worker order
};

inline Instance build_instance(const frc::PartitionSpec& spec, const frc::OuterProductCode& outer,
                               const std::vector<frc::WorkerTask>& tasks, frc::Rng& rng) {
  Instance inst;
  inst.a = random_matrix(spec.s, spec.r, rng);
  inst.b = random_matrix(spec.s, spec.t, rng);
  inst.coded_a = frc::mds_encode(frc::split_columns(inst.a, spec.m), outer.col_code);
  inst.coded_b = frc::mds_encode(frc::split_columns(inst.b, spec.n), outer.row_code);
  for (const auto& task : tasks) {
    const auto [at, bt] = frc::encode_inputs(task, inst.coded_a, inst.coded_b);
    inst.results.push_back({task, frc::worker_compute(at, bt)});
  }
  return inst;
}

inline std::vector<frc::WorkerResult> pick_results(const Instance& inst, const std::vector<int>& workers) {
  std::vector<frc::WorkerResult> out;
  for (int w : workers) out.push_back(inst.results[w]);
  return out;
}

inline double relative_error(const frc::Matrix& got, const frc::Matrix& truth) {
  const double scale = truth.cwiseAbs().maxCoeff();
  return (got - truth).cwiseAbs().maxCoeff() / (scale > 0 ? scale : 1.0);
}

// Independent elimination-based rank oracle with a global-scale tolerance.
inline int rank_by_elimination(frc::Matrix m) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  if (rows == 0 || cols == 0) return 0;
  const double tol = 1e-10 * std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    double best = tol;
    for (int r = rank; r < rows; ++r) {
      if (std::abs(m(r, col)) > best) {
        best = std::abs(m(r, col));
        pivot = r;
      }
    }
    if (pivot < 0) continue;
    m.row(pivot).swap(m.row(rank));
    for (int r = rank + 1; r < rows; ++r) {
      const double factor = m(r, col) / m(rank, col);
      if (factor != 0.0) m.row(r).tail(cols - col) -= factor * m.row(rank).tail(cols - col);
    }
    ++rank;
  }
  return rank;
}

}  // namespace testutil
