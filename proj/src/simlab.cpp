#include "frc/simlab.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <numeric>
#include <thread>

#include "frc/decoder.hpp"
#include "frc/outer.hpp"

namespace frc {

namespace {

// Substream purposes; combined with (seed, purpose, tag, key, trial) so that
// every trial of every experiment owns an independent stream. The straggler
// stream does not depend on the scheme, so paired runs of different schemes
// see the same straggler patterns.
constexpr std::uint64_t kTagTasks = 0x7461736b;
constexpr std::uint64_t kTagStragglers = 0x73747261;
constexpr std::uint64_t kTagData = 0x64617461;
constexpr std::uint64_t kTagCodes = 0x636f6465;
constexpr std::uint64_t kTagBaseline = 0x62617365;
constexpr std::uint64_t kPurposeCurve = 1;
constexpr std::uint64_t kPurposeThreshold = 2;

struct TrialOut {
  unsigned char failed = 0;
  int inactivated = 0;
  long long edge_ops = 0;
};

Rng stream(const SimConfig& cfg, std::uint64_t purpose, std::uint64_t tag, std::uint64_t key,
           std::uint64_t trial) {
  return Rng(derive_seed({cfg.seed, purpose, tag, key, trial}));
}

// Straggler draw: first `count` entries of a partial Fisher-Yates shuffle.
void draw_stragglers(Rng& rng, int total, int count, std::vector<int>& pool, std::vector<char>& flag) {
  pool.resize(total);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(total - i)));
    std::swap(pool[i], pool[j]);
  }
  flag.assign(total, 0);
  for (int i = 0; i < count; ++i) flag[pool[i]] = 1;
}

// Per-thread workspace for support-level FR trials.
class FrTrialRunner {
 public:
  FrTrialRunner(const SimConfig& cfg, SplitScheme scheme, const SplitTable& splits)
      : cfg_(cfg),
        scheme_(scheme),
        splits_(splits),
        shape_{cfg.spec.m_tilde, cfg.spec.m, cfg.spec.n_tilde, cfg.spec.n},
        support_(shape_),
        counter_(shape_) {}

  TrialOut run(std::uint64_t purpose, int stragglers, long trial) {
    const auto key = static_cast<std::uint64_t>(stragglers);
    const auto t = static_cast<std::uint64_t>(trial);
    const int workers = cfg_.workers;
    const int n_tilde = cfg_.spec.n_tilde;

    Rng task_rng = stream(cfg_, purpose, kTagTasks, key, t);
    all_offsets_.clear();
    all_offsets_.push_back(0);
    all_edges_.clear();
    all_coeffs_.clear();
    for (int p = 0; p < workers; ++p) {
      draw_task(cfg_.spec, cfg_.dist, splits_, scheme_, CoeffMode::kGaussian, task_rng, draw_);
      for (std::size_t i = 0; i < draw_.index_a.size(); ++i) {
        for (std::size_t j = 0; j < draw_.index_b.size(); ++j) {
          all_edges_.push_back(draw_.index_a[i] * n_tilde + draw_.index_b[j]);
          all_coeffs_.push_back(draw_.coeff_a[i] * draw_.coeff_b[j]);
        }
      }
      all_offsets_.push_back(static_cast<int>(all_edges_.size()));
    }

    Rng straggler_rng = stream(cfg_, purpose, kTagStragglers, key, t);
    draw_stragglers(straggler_rng, workers, stragglers, pool_, straggler_);

    offsets_.clear();
    offsets_.push_back(0);
    edges_.clear();
    coeffs_.clear();
    for (int p = 0; p < workers; ++p) {
      if (straggler_[p]) continue;
      for (int e = all_offsets_[p]; e < all_offsets_[p + 1]; ++e) {
        edges_.push_back(all_edges_[e]);
        coeffs_.push_back(all_coeffs_[e]);
      }
      offsets_.push_back(static_cast<int>(edges_.size()));
    }

    TrialOut out;
    if (cfg_.decoder == DecoderKind::kInactivation) {
      Rng codes_rng = stream(cfg_, purpose, kTagCodes, key, t);
      Matrix col_parity(shape_.col_parity(), shape_.m);
      for (int r = 0; r < col_parity.rows(); ++r) {
        for (int c = 0; c < col_parity.cols(); ++c) col_parity(r, c) = codes_rng.gaussian();
      }
      Matrix row_parity(shape_.row_parity(), shape_.n);
      for (int r = 0; r < row_parity.rows(); ++r) {
        for (int c = 0; c < row_parity.cols(); ++c) row_parity(r, c) = codes_rng.gaussian();
      }
      const SupportOutcome res = counter_.run(offsets_, edges_, coeffs_, col_parity, row_parity);
      out.failed = res.success ? 0 : 1;
      out.inactivated = res.report.inactivated;
      out.edge_ops = res.report.edge_operations;
    } else {
      const bool fills = cfg_.decoder != DecoderKind::kPeelingOnly;
      const SupportOutcome res = support_.run(offsets_, edges_, fills);
      out.failed = res.success ? 0 : 1;
      out.edge_ops = res.report.edge_operations;
    }
    return out;
  }

 private:
  const SimConfig& cfg_;
  SplitScheme scheme_;
  const SplitTable& splits_;
  OuterShape shape_;
  SupportDecoder support_;
  InactivationCounter counter_;
  TaskDraw draw_;
  std::vector<int> all_offsets_;
  std::vector<int> all_edges_;
  std::vector<double> all_coeffs_;
  std::vector<int> offsets_;
  std::vector<int> edges_;
  std::vector<double> coeffs_;
  std::vector<int> pool_;
  std::vector<char> straggler_;
};

// Full numeric trial: real data, real outer codes, block arithmetic. Meant
// for small instances where it cross-validates the structural decoder.
TrialOut numeric_trial(const SimConfig& cfg, SplitScheme scheme, std::uint64_t purpose,
                       int stragglers, long trial) {
  const auto key = static_cast<std::uint64_t>(stragglers);
  const auto t = static_cast<std::uint64_t>(trial);
  const PartitionSpec& spec = cfg.spec;

  Rng data_rng = stream(cfg, purpose, kTagData, key, t);
  Matrix a(spec.s, spec.r), b(spec.s, spec.t);
  for (int i = 0; i < spec.s; ++i) {
    for (int j = 0; j < spec.r; ++j) a(i, j) = data_rng.gaussian();
  }
  for (int i = 0; i < spec.s; ++i) {
    for (int j = 0; j < spec.t; ++j) b(i, j) = data_rng.gaussian();
  }

  Rng codes_rng = stream(cfg, purpose, kTagCodes, key, t);
  const OuterProductCode outer = OuterProductCode::make(spec, codes_rng);

  Rng task_rng = stream(cfg, purpose, kTagTasks, key, t);
  const auto tasks = generate_tasks(spec, cfg.dist, scheme, cfg.workers, CoeffMode::kGaussian, task_rng);

  Rng straggler_rng = stream(cfg, purpose, kTagStragglers, key, t);
  std::vector<int> pool;
  std::vector<char> straggler;
  draw_stragglers(straggler_rng, cfg.workers, stragglers, pool, straggler);

  const auto blocks_a = split_columns(a, spec.m);
  const auto blocks_b = split_columns(b, spec.n);
  const auto coded_a = mds_encode(blocks_a, outer.col_code);
  const auto coded_b = mds_encode(blocks_b, outer.row_code);

  std::vector<WorkerResult> results;
  results.reserve(cfg.workers - stragglers);
  for (const auto& task : tasks) {
    if (straggler[task.worker]) continue;
    const auto [at, bt] = encode_inputs(task, coded_a, coded_b);
    results.push_back({task, worker_compute(at, bt)});
  }
  const DecodeResult res = decode(spec, outer, std::move(results));

  TrialOut out;
  out.failed = res.report.success ? 0 : 1;
  out.inactivated = res.report.inactivated;
  out.edge_ops = res.report.edge_operations;
  return out;
}

// Static partition over trial indices; identical output at any thread count.
template <typename MakeRunner>
std::vector<TrialOut> run_point_trials(int trials, int threads, MakeRunner&& make_runner) {
  std::vector<TrialOut> outs(static_cast<std::size_t>(trials));
  const int nthreads = std::max(1, std::min(threads, trials));
  if (nthreads == 1) {
    auto runner = make_runner();
    for (long t = 0; t < trials; ++t) outs[t] = runner(t);
    return outs;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const long chunk = (trials + nthreads - 1) / nthreads;
  for (int th = 0; th < nthreads; ++th) {
    const long lo = th * chunk;
    const long hi = std::min<long>(trials, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &outs, &make_runner]() {
      auto runner = make_runner();
      for (long t = lo; t < hi; ++t) outs[t] = runner(t);
    });
  }
  for (auto& th : pool) th.join();
  return outs;
}

SimPoint aggregate(std::string scheme, int stragglers, int received, const std::vector<TrialOut>& outs) {
  SimPoint point;
  point.scheme = std::move(scheme);
  point.stragglers = stragglers;
  point.received = received;
  point.trials = static_cast<int>(outs.size());
  for (const auto& o : outs) {
    point.failures += o.failed;
    point.inactivated_sum += o.inactivated;
    point.edge_ops_sum += o.edge_ops;
  }
  return point;
}

SimPoint fr_point(const SimConfig& cfg, SplitScheme scheme, const SplitTable& splits,
                  std::uint64_t purpose, int stragglers, int trials) {
  std::vector<TrialOut> outs;
  if (cfg.decoder == DecoderKind::kAlgorithm1) {
    outs = run_point_trials(trials, cfg.threads, [&]() {
      return [&cfg, scheme, purpose, stragglers](long t) {
        return numeric_trial(cfg, scheme, purpose, stragglers, t);
      };
    });
  } else {
    outs = run_point_trials(trials, cfg.threads, [&]() {
      return [runner = std::make_shared<FrTrialRunner>(cfg, scheme, splits), purpose,
              stragglers](long t) { return runner->run(purpose, stragglers, t); };
    });
  }
  return aggregate(to_string(scheme), stragglers, cfg.workers - stragglers, outs);
}

SimPoint baseline_point(const SimConfig& cfg, std::uint64_t purpose, int stragglers, int trials) {
  const Product3dParams params = *cfg.baseline;
  auto outs = run_point_trials(trials, cfg.threads, [&]() {
    return [&cfg, params, purpose, stragglers](long t) {
      Rng rng = stream(cfg, purpose, kTagBaseline, static_cast<std::uint64_t>(stragglers),
                       static_cast<std::uint64_t>(t));
      TrialOut out;
      out.failed = product3d_trial(params, stragglers, rng) ? 0 : 1;
      return out;
    };
  });
  return aggregate("3D", stragglers, params.total_cells() - stragglers, outs);
}

}  // namespace

const char* to_string(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::kPeelingOnly:
      return "peeling_only";
    case DecoderKind::kAlgorithm1:
      return "algorithm1";
    case DecoderKind::kInactivation:
      return "inactivation";
    case DecoderKind::kSupportFast:
      return "support_fast";
  }
  return "?";
}

DecoderKind decoder_kind_from_string(const std::string& name) {
  if (name == "peeling_only") return DecoderKind::kPeelingOnly;
  if (name == "algorithm1") return DecoderKind::kAlgorithm1;
  if (name == "inactivation") return DecoderKind::kInactivation;
  if (name == "support_fast") return DecoderKind::kSupportFast;
  throw ConfigError("unknown decoder kind: " + name);
}

void Product3dParams::validate() const {
  for (int axis = 0; axis < 3; ++axis) {
    if (k[axis] < 1 || n[axis] < k[axis]) throw ConfigError("baseline needs n >= k >= 1 on every axis");
  }
}

void SimConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (!schemes.empty()) {
    spec.validate();
    if (workers < 1) throw ConfigError("worker count must be positive");
    const auto violations = frc::validate(dist, spec.m_tilde, spec.n_tilde);
    if (!violations.empty()) {
      throw ConfigError("degree distribution invalid: " + violations.front().to_string());
    }
    for (int s : straggler_counts) {
      if (s < 0 || s >= workers) throw ConfigError("straggler counts must lie in [0, workers)");
    }
  }
  if (baseline) {
    baseline->validate();
    for (int s : straggler_counts) {
      if (s < 0 || s >= baseline->total_cells()) {
        throw ConfigError("straggler counts must lie in [0, baseline cells)");
      }
    }
  }
  if (schemes.empty() && !baseline) throw ConfigError("nothing to simulate");
}

std::string SimResult::csv() const {
  std::string out = "scheme,S,N,trials,failures,failure_prob,mean_inactivated,mean_edge_ops\n";
  char line[192];
  for (const auto& p : points) {
    std::snprintf(line, sizeof(line), "%s,%d,%d,%d,%d,%.10g,%.10g,%.10g\n", p.scheme.c_str(),
                  p.stragglers, p.received, p.trials, p.failures, p.failure_probability(),
                  p.mean_inactivated(), p.mean_edge_ops());
    out += line;
  }
  return out;
}

SimResult run_trials(const SimConfig& config) {
  config.validate();
  SimResult result;
  if (!config.schemes.empty()) {
    const SplitTable splits(config.dist, config.spec.m_tilde, config.spec.n_tilde);
    for (SplitScheme scheme : config.schemes) {
      for (int s : config.straggler_counts) {
        result.points.push_back(fr_point(config, scheme, splits, kPurposeCurve, s, config.trials));
      }
    }
  }
  if (config.baseline) {
    for (int s : config.straggler_counts) {
      result.points.push_back(baseline_point(config, kPurposeCurve, s, config.trials));
    }
  }
  return result;
}

bool product3d_trial(const Product3dParams& params, int stragglers, Rng& rng) {
  params.validate();
  const int n0 = params.n[0], n1 = params.n[1], n2 = params.n[2];
  const int total = params.total_cells();
  if (stragglers < 0 || stragglers >= total) throw Error("straggler count out of range");

  std::vector<char> erased(total, 0);
  {
    std::vector<int> pool(total);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < stragglers; ++i) {
      const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(total - i)));
      std::swap(pool[i], pool[j]);
      erased[pool[i]] = 1;
    }
  }

  // missing counts per axis line
  std::vector<int> miss0(n1 * n2, 0), miss1(n0 * n2, 0), miss2(n0 * n1, 0);
  auto cell_id = [&](int i, int j, int l) { return (i * n1 + j) * n2 + l; };
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      for (int l = 0; l < n2; ++l) {
        if (!erased[cell_id(i, j, l)]) continue;
        ++miss0[j * n2 + l];
        ++miss1[i * n2 + l];
        ++miss2[i * n1 + j];
      }
    }
  }
  const int parity[3] = {params.n[0] - params.k[0], params.n[1] - params.k[1], params.n[2] - params.k[2]};

  // queue of (axis, line) pairs encoded as axis * max_lines + line
  std::vector<long> queue;
  auto enqueue = [&](int axis, int line) { queue.push_back(static_cast<long>(axis) * total + line); };
  for (int line = 0; line < n1 * n2; ++line) {
    if (miss0[line] >= 1 && miss0[line] <= parity[0]) enqueue(0, line);
  }
  for (int line = 0; line < n0 * n2; ++line) {
    if (miss1[line] >= 1 && miss1[line] <= parity[1]) enqueue(1, line);
  }
  for (int line = 0; line < n0 * n1; ++line) {
    if (miss2[line] >= 1 && miss2[line] <= parity[2]) enqueue(2, line);
  }

  int remaining = stragglers;
  auto restore = [&](int i, int j, int l) {
    erased[cell_id(i, j, l)] = 0;
    --remaining;
    if (--miss0[j * n2 + l] == parity[0]) enqueue(0, j * n2 + l);
    if (--miss1[i * n2 + l] == parity[1]) enqueue(1, i * n2 + l);
    if (--miss2[i * n1 + j] == parity[2]) enqueue(2, i * n1 + j);
  };

  std::size_t head = 0;
  while (head < queue.size()) {
    const long item = queue[head++];
    const int axis = static_cast<int>(item / total);
    const int line = static_cast<int>(item % total);
    if (axis == 0) {
      if (miss0[line] == 0 || miss0[line] > parity[0]) continue;
      const int j = line / n2, l = line % n2;
      for (int i = 0; i < n0; ++i) {
        if (erased[cell_id(i, j, l)]) restore(i, j, l);
      }
    } else if (axis == 1) {
      if (miss1[line] == 0 || miss1[line] > parity[1]) continue;
      const int i = line / n2, l = line % n2;
      for (int j = 0; j < n1; ++j) {
        if (erased[cell_id(i, j, l)]) restore(i, j, l);
      }
    } else {
      if (miss2[line] == 0 || miss2[line] > parity[2]) continue;
      const int i = line / n1, j = line % n1;
      for (int l = 0; l < n2; ++l) {
        if (erased[cell_id(i, j, l)]) restore(i, j, l);
      }
    }
  }
  return remaining == 0;
}

ThresholdEstimate estimate_threshold(const SimConfig& config, double target_failure,
                                     int confidence_trials) {
  if (target_failure <= 0.0 || target_failure >= 1.0) throw ConfigError("target failure must be in (0,1)");
  if (confidence_trials < 1) throw ConfigError("confidence_trials must be positive");
  config.validate();

  const bool use_baseline = config.baseline.has_value();
  const int max_n = use_baseline ? config.baseline->total_cells() : config.workers;
  std::optional<SplitTable> splits;
  if (!use_baseline) {
    if (config.schemes.empty()) throw ConfigError("threshold search needs a scheme or a baseline");
    splits.emplace(config.dist, config.spec.m_tilde, config.spec.n_tilde);
  }

  std::map<int, double> cache;
  int probes = 0;
  auto rate_at = [&](int received) {
    auto it = cache.find(received);
    if (it != cache.end()) return it->second;
    const int stragglers = max_n - received;
    const SimPoint point =
        use_baseline
            ? baseline_point(config, kPurposeThreshold, stragglers, confidence_trials)
            : fr_point(config, config.schemes.front(), *splits, kPurposeThreshold, stragglers,
                       confidence_trials);
    ++probes;
    return cache[received] = point.failure_probability();
  };

  if (rate_at(max_n) > target_failure) {
    throw NotFoundError("even the full set of workers misses the failure target");
  }
  int lo = 1, hi = max_n;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (rate_at(mid) <= target_failure) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return {lo, rate_at(lo), probes};
}

CostReport cost_report(std::span<const WorkerTask> tasks) {
  if (tasks.empty()) throw Error("cost report needs at least one task");
  CostReport report;
  report.chunks_per_worker = 2.0;
  report.products_per_worker = 1.0;
  double coeffs = 0.0;
  for (const auto& task : tasks) {
    coeffs += static_cast<double>(task.index_a.size() + task.index_b.size());
  }
  report.mean_input_coefficients = coeffs / static_cast<double>(tasks.size());
  return report;
}

}  // namespace frc
