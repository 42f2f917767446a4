#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frc/blockgrid.hpp"
#include "frc/degrees.hpp"
#include "frc/flt.hpp"
#include "frc/rng.hpp"

namespace frc {

// Real-valued systematic MDS code: generator is n_out x k_in with an
// identity on top and dense parity rows below. Any k_in rows of the
// generator must be invertible; random Gaussian parity achieves this with
// probability one and is verified at construction.
class MdsCode {
 public:
  static MdsCode identity(int k);
  static MdsCode make(int k_in, int n_out, Rng& rng);
  static MdsCode from_generator(Matrix generator);

  int k() const { return static_cast<int>(generator_.cols()); }
  int n() const { return static_cast<int>(generator_.rows()); }
  int parity() const { return n() - k(); }
  const Matrix& generator() const { return generator_; }

  // Text form: one generator row per line, comma-separated, full precision.
  std::string to_table() const;
  static MdsCode from_table(std::istream& in);

 private:
  explicit MdsCode(Matrix generator) : generator_(std::move(generator)) {}
  Matrix generator_;
};

std::vector<Matrix> mds_encode(std::span<const Matrix> blocks, const MdsCode& code);

// Fills every erased cell from any k_in present ones (the lowest-indexed
// k_in are used). Present cells are returned unchanged.
std::vector<Matrix> mds_erasure_decode(const std::vector<std::optional<Matrix>>& cells, const MdsCode& code);

// Weights expressing erased positions of a codeword as combinations of
// present ones; shared by the block decoder and the inactivation engines.
struct ErasureWeights {
  std::vector<int> sources;  // the k_in present positions used
  Matrix weights;            // |erased| x k_in
};
ErasureWeights erasure_weights(const MdsCode& code, const std::vector<int>& present_sorted,
                               const std::vector<int>& erased);

// (m_tilde, m) code on grid columns x (n_tilde, n) code on grid rows.
struct OuterProductCode {
  MdsCode col_code;  // codes each column of the grid, length m_tilde
  MdsCode row_code;  // codes each row of the grid, length n_tilde

  static OuterProductCode rate_one(const PartitionSpec& spec) {
    return {MdsCode::identity(spec.m), MdsCode::identity(spec.n)};
  }
  static OuterProductCode make(const PartitionSpec& spec, Rng& rng) {
    MdsCode col = MdsCode::make(spec.m, spec.m_tilde, rng);
    MdsCode row = MdsCode::make(spec.n, spec.n_tilde, rng);
    return {std::move(col), std::move(row)};
  }
};

struct FrEncoding {
  std::vector<WorkerTask> tasks;
  OuterProductCode codes;
  std::vector<Matrix> coded_a;  // m_tilde blocks
  std::vector<Matrix> coded_b;  // n_tilde blocks
};

// Outer-encode both inputs, then run task generation over the coded blocks.
// With rate-one outer codes this reduces to plain task generation.
FrEncoding fr_encode(std::span<const Matrix> blocks_a, std::span<const Matrix> blocks_b,
                     const OuterProductCode& outer, const PartitionSpec& spec,
                     const DegreeDistribution& dist, SplitScheme scheme, int worker_count,
                     CoeffMode mode, Rng& rng);

}  // namespace frc
