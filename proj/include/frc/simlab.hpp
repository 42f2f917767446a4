#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frc/blockgrid.hpp"
#include "frc/degrees.hpp"
#include "frc/flt.hpp"
#include "frc/support.hpp"

namespace frc {

enum class DecoderKind { kPeelingOnly, kAlgorithm1, kInactivation, kSupportFast };
const char* to_string(DecoderKind kind);
DecoderKind decoder_kind_from_string(const std::string& name);

// Axis-wise (n_i, k_i) dimensions of the 3-D product-code baseline.
struct Product3dParams {
  int n[3] = {1, 1, 1};
  int k[3] = {1, 1, 1};

  int total_cells() const { return n[0] * n[1] * n[2]; }
  int source_cells() const { return k[0] * k[1] * k[2]; }
  void validate() const;
};

struct SimConfig {
  PartitionSpec spec;
  DegreeDistribution dist;
  std::vector<SplitScheme> schemes;
  int workers = 0;
  std::vector<int> straggler_counts;
  int trials = 1;
  std::uint64_t seed = 1;
  DecoderKind decoder = DecoderKind::kSupportFast;
  std::optional<Product3dParams> baseline;
  int threads = 1;

  void validate() const;
};

struct SimPoint {
  std::string scheme;  // "I", "II", "III" or "3D" for the baseline
  int stragglers = 0;
  int received = 0;
  int trials = 0;
  int failures = 0;
  long long inactivated_sum = 0;  // integer sums so aggregation order cannot matter
  long long edge_ops_sum = 0;

  double failure_probability() const { return trials ? static_cast<double>(failures) / trials : 0.0; }
  double mean_inactivated() const { return trials ? static_cast<double>(inactivated_sum) / trials : 0.0; }
  double mean_edge_ops() const { return trials ? static_cast<double>(edge_ops_sum) / trials : 0.0; }
};

struct SimResult {
  std::vector<SimPoint> points;
  // "scheme,S,N,trials,failures,failure_prob,mean_inactivated,mean_edge_ops"
  std::string csv() const;
};

// Straggler sweep: for every scheme and straggler count, `trials` fresh
// codes are drawn, a uniformly random straggler set is erased, and the
// configured decoder runs on the survivors. Bit-reproducible for a fixed
// seed at any thread count. When a baseline is configured its points are
// appended with scheme label "3D".
SimResult run_trials(const SimConfig& config);

// One baseline trial: erase `stragglers` random cells of the 3-D grid and
// run iterative axis-line erasure filling to a fixed point.
bool product3d_trial(const Product3dParams& params, int stragglers, Rng& rng);

struct ThresholdEstimate {
  int received = 0;     // smallest N meeting the target
  double failure_at = 0.0;
  int probes = 0;
};

// Binary search for the smallest number of results N whose empirical
// failure rate over confidence_trials trials is at or below the target.
// Searches the baseline when one is configured, otherwise the first
// configured scheme. Throws NotFoundError if even N = P misses the target.
ThresholdEstimate estimate_threshold(const SimConfig& config, double target_failure,
                                     int confidence_trials);

struct CostReport {
  double chunks_per_worker = 0.0;       // one encoded A and one encoded B
  double products_per_worker = 0.0;     // each worker multiplies once
  double mean_input_coefficients = 0.0; // d1 + d2 per task
};

CostReport cost_report(std::span<const WorkerTask> tasks);

}  // namespace frc
