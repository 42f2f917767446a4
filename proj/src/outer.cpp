#include "frc/outer.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cstdio>
#include <istream>
#include <sstream>

namespace frc {

namespace {

constexpr int kExhaustiveCheckLimit = 12;  // n_out up to this: test all row subsets
constexpr int kProbabilisticChecks = 32;
constexpr int kMakeAttempts = 8;
constexpr double kResidualTolerance = 1e-6;

bool rows_invertible(const Matrix& generator, const std::vector<int>& rows) {
  const int k = static_cast<int>(generator.cols());
  Matrix sub(k, k);
  for (int r = 0; r < k; ++r) sub.row(r) = generator.row(rows[r]);
  Eigen::FullPivLU<Matrix> lu(sub);
  lu.setThreshold(1e-10);
  return lu.isInvertible();
}

bool verify_mds(const Matrix& generator, Rng* rng) {
  const int n = static_cast<int>(generator.rows());
  const int k = static_cast<int>(generator.cols());
  if (n <= kExhaustiveCheckLimit) {
    std::vector<int> rows(k);
    // enumerate all k-subsets of [0, n)
    for (int i = 0; i < k; ++i) rows[i] = i;
    while (true) {
      if (!rows_invertible(generator, rows)) return false;
      int pos = k - 1;
      while (pos >= 0 && rows[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++rows[pos];
      for (int i = pos + 1; i < k; ++i) rows[i] = rows[i - 1] + 1;
    }
    return true;
  }
  Rng fallback(0x5eedu);
  Rng& r = rng ? *rng : fallback;
  std::vector<int> rows;
  for (int trial = 0; trial < kProbabilisticChecks; ++trial) {
    sample_subset_floyd(r, n, k, rows);
    if (!rows_invertible(generator, rows)) return false;
  }
  return true;
}

}  // namespace

MdsCode MdsCode::identity(int k) {
  if (k < 1) throw Error("identity code needs k >= 1");
  return MdsCode(Matrix::Identity(k, k));
}

MdsCode MdsCode::make(int k_in, int n_out, Rng& rng) {
  if (k_in < 1 || n_out < k_in) throw Error("MDS code needs n_out >= k_in >= 1");
  for (int attempt = 0; attempt < kMakeAttempts; ++attempt) {
    Matrix generator = Matrix::Zero(n_out, k_in);
    generator.topRows(k_in) = Matrix::Identity(k_in, k_in);
    for (int r = k_in; r < n_out; ++r) {
      for (int c = 0; c < k_in; ++c) generator(r, c) = rng.gaussian();
    }
    if (verify_mds(generator, &rng)) return MdsCode(std::move(generator));
  }
  throw SingularGeneratorError("could not draw an MDS generator");
}

MdsCode MdsCode::from_generator(Matrix generator) {
  const int k = static_cast<int>(generator.cols());
  if (k < 1 || generator.rows() < k) throw Error("generator must be n_out x k_in with n_out >= k_in");
  if (!generator.topRows(k).isApprox(Matrix::Identity(k, k))) {
    throw Error("generator must be systematic");
  }
  if (!verify_mds(generator, nullptr)) throw SingularGeneratorError("generator is not MDS");
  return MdsCode(std::move(generator));
}

std::string MdsCode::to_table() const {
  std::string out;
  char buf[48];
  for (int r = 0; r < n(); ++r) {
    for (int c = 0; c < k(); ++c) {
      std::snprintf(buf, sizeof(buf), "%s%.17g", c ? "," : "", generator_(r, c));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

MdsCode MdsCode::from_table(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError("ragged generator table");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("empty generator table");
  Matrix generator(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) generator(r, c) = rows[r][c];
  }
  return from_generator(std::move(generator));
}

std::vector<Matrix> mds_encode(std::span<const Matrix> blocks, const MdsCode& code) {
  if (static_cast<int>(blocks.size()) != code.k()) {
    throw ShapeMismatchError("block count does not match the code dimension");
  }
  const Matrix& first = blocks[0];
  for (const auto& b : blocks) {
    if (b.rows() != first.rows() || b.cols() != first.cols()) {
      throw ShapeMismatchError("input blocks disagree in shape");
    }
  }
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(code.n()));
  const Matrix& g = code.generator();
  for (int r = 0; r < code.n(); ++r) {
    if (r < code.k()) {
      out.push_back(blocks[r]);  // systematic prefix
      continue;
    }
    Matrix acc = Matrix::Zero(first.rows(), first.cols());
    for (int c = 0; c < code.k(); ++c) acc += g(r, c) * blocks[c];
    out.push_back(std::move(acc));
  }
  return out;
}

ErasureWeights erasure_weights(const MdsCode& code, const std::vector<int>& present_sorted,
                               const std::vector<int>& erased) {
  if (static_cast<int>(present_sorted.size()) < code.k()) {
    throw TooManyErasuresError("fewer present cells than the code dimension");
  }
  ErasureWeights out;
  out.sources.assign(present_sorted.begin(), present_sorted.begin() + code.k());
  Matrix sel(code.k(), code.k());
  for (int r = 0; r < code.k(); ++r) sel.row(r) = code.generator().row(out.sources[r]);
  Matrix target(erased.size(), code.k());
  for (std::size_t r = 0; r < erased.size(); ++r) target.row(r) = code.generator().row(erased[r]);
  // W * sel = target  =>  sel^T W^T = target^T
  Eigen::PartialPivLU<Matrix> lu(sel.transpose());
  out.weights = lu.solve(target.transpose()).transpose();
  const double scale = std::max(1.0, target.cwiseAbs().maxCoeff());
  if (((out.weights * sel - target).cwiseAbs().maxCoeff()) > kResidualTolerance * scale) {
    throw IllConditionedError("erasure weight solve failed the residual check");
  }
  return out;
}

std::vector<Matrix> mds_erasure_decode(const std::vector<std::optional<Matrix>>& cells, const MdsCode& code) {
  if (static_cast<int>(cells.size()) != code.n()) {
    throw ShapeMismatchError("cell count does not match the code length");
  }
  std::vector<int> present, erased;
  for (int i = 0; i < code.n(); ++i) (cells[i].has_value() ? present : erased).push_back(i);
  if (static_cast<int>(erased.size()) > code.parity()) {
    throw TooManyErasuresError("erasures exceed the parity budget");
  }

  std::vector<Matrix> out(cells.size());
  for (int i : present) out[i] = *cells[i];
  if (erased.empty()) return out;

  const ErasureWeights ew = erasure_weights(code, present, erased);
  const Matrix& sample = *cells[present.front()];
  for (std::size_t e = 0; e < erased.size(); ++e) {
    Matrix acc = Matrix::Zero(sample.rows(), sample.cols());
    for (int c = 0; c < code.k(); ++c) {
      const Matrix& src = *cells[ew.sources[c]];
      if (src.rows() != sample.rows() || src.cols() != sample.cols()) {
        throw ShapeMismatchError("codeword cells disagree in shape");
      }
      acc += ew.weights(e, c) * src;
    }
    out[erased[e]] = std::move(acc);
  }
  return out;
}

FrEncoding fr_encode(std::span<const Matrix> blocks_a, std::span<const Matrix> blocks_b,
                     const OuterProductCode& outer, const PartitionSpec& spec,
                     const DegreeDistribution& dist, SplitScheme scheme, int worker_count,
                     CoeffMode mode, Rng& rng) {
  spec.validate();
  if (outer.col_code.k() != spec.m || outer.col_code.n() != spec.m_tilde ||
      outer.row_code.k() != spec.n || outer.row_code.n() != spec.n_tilde) {
    throw ShapeMismatchError("outer code dimensions disagree with the partition spec");
  }
  FrEncoding enc{.tasks = {}, .codes = outer, .coded_a = {}, .coded_b = {}};
  enc.coded_a = mds_encode(blocks_a, outer.col_code);
  enc.coded_b = mds_encode(blocks_b, outer.row_code);
  enc.tasks = generate_tasks(spec, dist, scheme, worker_count, mode, rng);
  return enc;
}

}  // namespace frc
