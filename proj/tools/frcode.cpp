// Command-line front end: validate degree distributions, run demo
// encode/decode round trips, sweep straggler counts, estimate recovery
// thresholds. One JSON config drives everything; all randomness flows from
// a single 64-bit seed so every run can be reproduced bit-exactly.
//
// Exit codes: 0 success, 1 domain failure, 2 configuration error, 3 I/O.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "frc/decoder.hpp"
#include "frc/degrees.hpp"
#include "frc/fixture.hpp"
#include "frc/outer.hpp"
#include "frc/simlab.hpp"

using nlohmann::json;

namespace {

enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

struct Options {
  std::string config_path;
  std::string output_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads_override;
  LogLevel log = LogLevel::kInfo;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw frc::ConfigError("cannot open config: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw frc::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

frc::PartitionSpec parse_spec(const json& j) {
  if (!j.is_object()) throw frc::ConfigError("spec section must be an object");
  frc::PartitionSpec spec;
  try {
    spec.r = j.at("r").get<int>();
    spec.s = j.at("s").get<int>();
    spec.t = j.at("t").get<int>();
    spec.m = j.at("m").get<int>();
    spec.n = j.at("n").get<int>();
    spec.m_tilde = j.value("m_tilde", spec.m);
    spec.n_tilde = j.value("n_tilde", spec.n);
  } catch (const json::exception& e) {
    throw frc::ConfigError(std::string("bad spec section: ") + e.what());
  }
  try {
    spec.validate();
  } catch (const frc::Error& e) {
    throw frc::ConfigError(std::string("bad spec section: ") + e.what());
  }
  return spec;
}

frc::DegreeDistribution parse_distribution(const json& j, const std::string& config_path) {
  if (!j.is_object()) throw frc::ConfigError("distribution section must be an object");
  if (j.contains("inline")) {
    std::map<int, double> mass;
    for (const auto& [key, value] : j.at("inline").items()) {
      try {
        mass[std::stoi(key)] = value.get<double>();
      } catch (const std::exception&) {
        throw frc::ConfigError("bad inline distribution entry: " + key);
      }
    }
    return frc::DegreeDistribution::from_mass(mass);
  }
  if (j.contains("path")) {
    std::string path = j.at("path").get<std::string>();
    // resolve relative to the config file
    if (!path.empty() && path.front() != '/') {
      const auto slash = config_path.find_last_of('/');
      if (slash != std::string::npos) path = config_path.substr(0, slash + 1) + path;
    }
    return frc::DegreeDistribution::from_table_file(path);
  }
  throw frc::ConfigError("distribution section needs either 'inline' or 'path'");
}

std::vector<frc::SplitScheme> parse_schemes(const json& config) {
  std::vector<frc::SplitScheme> schemes;
  if (config.contains("schemes")) {
    for (const auto& name : config.at("schemes")) {
      schemes.push_back(frc::split_scheme_from_string(name.get<std::string>()));
    }
  } else if (config.contains("scheme")) {
    schemes.push_back(frc::split_scheme_from_string(config.at("scheme").get<std::string>()));
  }
  return schemes;
}

std::uint64_t parse_seed(const json& config, const Options& opt) {
  if (opt.seed_override) return *opt.seed_override;
  return config.value("seed", std::uint64_t{1});
}

void draw_straggler_flags(frc::Rng& rng, int total, int count, std::vector<char>& flag) {
  std::vector<int> pool(total);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(total - i)));
    std::swap(pool[i], pool[j]);
  }
  flag.assign(total, 0);
  for (int i = 0; i < count; ++i) flag[pool[i]] = 1;
}

void print_trace(const std::vector<frc::RecoveryEvent>& trace, const frc::PartitionSpec& spec) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto [gi, gj] = frc::grid_index(trace[i].cell, spec);
    const char* kind = trace[i].kind == frc::RecoveryEvent::Kind::kPeel      ? "peel"
                       : trace[i].kind == frc::RecoveryEvent::Kind::kFill    ? "fill"
                                                                             : "inactivate";
    std::printf("iter %zu: %s -> block (%d,%d)\n", i, kind, gi + 1, gj + 1);
  }
}

int cmd_validate_dist(const json& config, const Options& opt) {
  const frc::PartitionSpec spec = parse_spec(config.at("spec"));
  const frc::DegreeDistribution dist = parse_distribution(config.at("distribution"), opt.config_path);
  const auto violations = frc::validate(dist, spec.m_tilde, spec.n_tilde);
  if (violations.empty()) {
    std::printf("ok\n");
    return 0;
  }
  for (const auto& v : violations) std::printf("%s\n", v.to_string().c_str());
  return 1;
}

int cmd_demo(const json& config, const Options& opt) {
  const std::uint64_t seed = parse_seed(config, opt);
  const json demo = config.value("demo", json::object());
  const bool fixture = demo.value("fixture", false);

  frc::PartitionSpec spec;
  frc::OuterProductCode outer{frc::MdsCode::identity(1), frc::MdsCode::identity(1)};
  std::vector<frc::WorkerTask> tasks;
  std::vector<char> straggler;

  frc::Rng data_rng(frc::derive_seed({seed, 1}));
  frc::Rng codes_rng(frc::derive_seed({seed, 2}));
  frc::Rng task_rng(frc::derive_seed({seed, 3}));
  frc::Rng straggler_rng(frc::derive_seed({seed, 4}));

  if (fixture) {
    frc::DemoFixture fx = frc::demo_fixture();
    spec = fx.spec;
    outer = fx.codes;
    tasks = fx.tasks;
    straggler.assign(tasks.size(), 1);
    for (int p : fx.default_received) straggler[p] = 0;
  } else {
    spec = parse_spec(config.at("spec"));
    const auto dist = parse_distribution(config.at("distribution"), opt.config_path);
    const auto schemes = parse_schemes(config);
    if (schemes.empty()) throw frc::ConfigError("demo needs a scheme");
    const int workers = demo.value("workers", 0);
    const int stragglers = demo.value("stragglers", 0);
    if (workers < 1 || stragglers < 0 || stragglers >= workers) {
      throw frc::ConfigError("demo needs workers >= 1 and stragglers in [0, workers)");
    }
    const auto violations = frc::validate(dist, spec.m_tilde, spec.n_tilde);
    if (!violations.empty()) {
      throw frc::ConfigError("degree distribution invalid: " + violations.front().to_string());
    }
    const std::string mode_name = demo.value("coeff_mode", std::string("gaussian"));
    const frc::CoeffMode mode =
        mode_name == "unit" ? frc::CoeffMode::kUnit : frc::CoeffMode::kGaussian;
    outer = frc::OuterProductCode::make(spec, codes_rng);
    tasks = frc::generate_tasks(spec, dist, schemes.front(), workers, mode, task_rng);
    draw_straggler_flags(straggler_rng, workers, stragglers, straggler);
  }

  frc::Matrix a(spec.s, spec.r), b(spec.s, spec.t);
  for (int i = 0; i < spec.s; ++i) {
    for (int j = 0; j < spec.r; ++j) a(i, j) = data_rng.gaussian();
  }
  for (int i = 0; i < spec.s; ++i) {
    for (int j = 0; j < spec.t; ++j) b(i, j) = data_rng.gaussian();
  }
  const auto coded_a = frc::mds_encode(frc::split_columns(a, spec.m), outer.col_code);
  const auto coded_b = frc::mds_encode(frc::split_columns(b, spec.n), outer.row_code);

  std::vector<frc::WorkerResult> results;
  for (const auto& task : tasks) {
    if (straggler[task.worker]) continue;
    const auto [at, bt] = frc::encode_inputs(task, coded_a, coded_b);
    results.push_back({task, frc::worker_compute(at, bt)});
  }

  const std::string decoder = demo.value("decoder", std::string("algorithm1"));
  frc::DecodeResult res;
  if (decoder == "inactivation") {
    res = frc::inactivation_decode(spec, outer, std::move(results));
  } else if (decoder == "algorithm1") {
    res = frc::decode(spec, outer, std::move(results));
  } else {
    throw frc::ConfigError("demo decoder must be algorithm1 or inactivation");
  }

  if (opt.log >= LogLevel::kInfo) print_trace(res.trace, spec);
  std::printf("%s\n", res.report.csv_line().c_str());
  if (!res.report.success) {
    std::fprintf(stderr, "decode failed\n");
    return 1;
  }
  const frc::Matrix truth = a.transpose() * b;
  const double scale = truth.cwiseAbs().maxCoeff();
  const double err = (*res.product - truth).cwiseAbs().maxCoeff() / (scale > 0 ? scale : 1.0);
  std::printf("max relative error %.3e\n", err);
  if (err > 1e-6) {
    std::fprintf(stderr, "verification failed\n");
    return 1;
  }
  return 0;
}

frc::SimConfig parse_sim_config(const json& config, const Options& opt) {
  frc::SimConfig sim;
  const json& sj = config.at("simulation");
  sim.schemes = parse_schemes(config);
  if (!sim.schemes.empty()) {
    sim.spec = parse_spec(config.at("spec"));
    sim.dist = parse_distribution(config.at("distribution"), opt.config_path);
    sim.workers = sj.value("workers", 0);
  }
  for (const auto& s : sj.value("straggler_counts", std::vector<int>{})) sim.straggler_counts.push_back(s);
  sim.trials = sj.value("trials", 1);
  sim.seed = parse_seed(config, opt);
  sim.decoder = frc::decoder_kind_from_string(sj.value("decoder", std::string("support_fast")));
  sim.threads = opt.threads_override.value_or(sj.value("threads", 1));
  if (sj.contains("baseline")) {
    frc::Product3dParams params;
    const auto& dims = sj.at("baseline").at("dims");
    if (!dims.is_array() || dims.size() != 3) throw frc::ConfigError("baseline dims must be three (n,k) pairs");
    for (int axis = 0; axis < 3; ++axis) {
      params.n[axis] = dims[axis].at(0).get<int>();
      params.k[axis] = dims[axis].at(1).get<int>();
    }
    sim.baseline = params;
  }
  try {
    sim.validate();
  } catch (const frc::Error& e) {
    throw frc::ConfigError(e.what());
  }
  return sim;
}

int cmd_simulate(const json& config, const Options& opt) {
  const frc::SimConfig sim = parse_sim_config(config, opt);
  if (opt.log >= LogLevel::kInfo) {
    std::fprintf(stderr, "simulating %zu scheme(s) x %zu straggler count(s), %d trials each, %d thread(s)\n",
                 sim.schemes.size(), sim.straggler_counts.size(), sim.trials, sim.threads);
  }
  const frc::SimResult result = frc::run_trials(sim);
  const std::string csv = result.csv();
  if (opt.output_path.empty()) {
    std::fputs(csv.c_str(), stdout);
    return 0;
  }
  std::ofstream out(opt.output_path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "cannot open output file: %s\n", opt.output_path.c_str());
    return 3;
  }
  out << csv;
  out.flush();
  if (!out) {
    std::fprintf(stderr, "write failed: %s\n", opt.output_path.c_str());
    return 3;
  }
  return 0;
}

int cmd_threshold(const json& config, const Options& opt) {
  const frc::SimConfig sim = parse_sim_config(config, opt);
  const json& tj = config.at("threshold");
  const double target = tj.at("target_failure").get<double>();
  const int confidence = tj.value("confidence_trials", 200);
  try {
    const frc::ThresholdEstimate est = frc::estimate_threshold(sim, target, confidence);
    std::printf("threshold N=%d empirical_failure=%.10g probes=%d\n", est.received, est.failure_at,
                est.probes);
    return 0;
  } catch (const frc::NotFoundError& e) {
    std::fprintf(stderr, "threshold not found: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"factored rateless codes for distributed matrix multiplication"};
  app.require_subcommand(1);

  Options opt;
  std::string log_name = "info";
  std::uint64_t seed_value = 0;
  int threads_value = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "JSON config path")->required();
    cmd->add_option("--out", opt.output_path, "output file (default: stdout)");
    cmd->add_option("--seed", seed_value, "override the config seed")
        ->each([&](const std::string&) { opt.seed_override = seed_value; });
    cmd->add_option("--threads", threads_value, "override the thread count")
        ->each([&](const std::string&) { opt.threads_override = threads_value; });
    cmd->add_option("--log", log_name, "quiet|info|debug");
  };

  CLI::App* validate = app.add_subcommand("validate-dist", "check a degree distribution");
  CLI::App* demo = app.add_subcommand("demo", "encode/decode round trip on one instance");
  CLI::App* simulate = app.add_subcommand("simulate", "straggler sweep, CSV out");
  CLI::App* threshold = app.add_subcommand("threshold", "estimate the recovery threshold");
  for (CLI::App* cmd : {validate, demo, simulate, threshold}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  if (log_name == "quiet") {
    opt.log = LogLevel::kQuiet;
  } else if (log_name == "debug") {
    opt.log = LogLevel::kDebug;
  } else if (log_name == "info") {
    opt.log = LogLevel::kInfo;
  } else {
    std::fprintf(stderr, "unknown log level: %s\n", log_name.c_str());
    return 2;
  }

  try {
    const json config = load_config(opt.config_path);
    if (validate->parsed()) return cmd_validate_dist(config, opt);
    if (demo->parsed()) return cmd_demo(config, opt);
    if (simulate->parsed()) return cmd_simulate(config, opt);
    if (threshold->parsed()) return cmd_threshold(config, opt);
    return 2;
  } catch (const frc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const frc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
