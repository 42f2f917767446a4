#include "frc/flt.hpp"

#include <cstdio>
#include <sstream>

namespace frc {

namespace {

void parse_indexed_values(const std::string& field, std::vector<int>& indices, std::vector<double>& values) {
  std::stringstream ss(field);
  std::string entry;
  while (std::getline(ss, entry, ',')) {
    int index = 0;
    double value = 0.0;
    if (std::sscanf(entry.c_str(), " %d : %lf", &index, &value) != 2) {
      throw ConfigError("bad task record entry: " + entry);
    }
    indices.push_back(index);
    values.push_back(value);
  }
}

}  // namespace

std::string WorkerTask::to_record() const {
  std::string out = std::to_string(worker) + ";";
  char buf[48];
  for (std::size_t i = 0; i < index_a.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s%d:%.17g", i ? "," : " ", index_a[i], coeff_a[i]);
    out += buf;
  }
  out += " ;";
  for (std::size_t j = 0; j < index_b.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%s%d:%.17g", j ? "," : " ", index_b[j], coeff_b[j]);
    out += buf;
  }
  return out;
}

WorkerTask WorkerTask::from_record(const std::string& line) {
  WorkerTask task;
  const auto first = line.find(';');
  const auto second = line.find(';', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw ConfigError("bad task record: " + line);
  }
  task.worker = std::stoi(line.substr(0, first));
  parse_indexed_values(line.substr(first + 1, second - first - 1), task.index_a, task.coeff_a);
  parse_indexed_values(line.substr(second + 1), task.index_b, task.coeff_b);
  return task;
}

void draw_task(const PartitionSpec& spec, const DegreeDistribution& dist, const SplitTable& splits,
               SplitScheme scheme, CoeffMode mode, Rng& rng, TaskDraw& out) {
  const int d = dist.sample(rng);
  const SplitPair split = splits.sample(d, scheme, rng);
  out.d1 = split.d1;
  out.d2 = split.d2;
  sample_subset_floyd(rng, spec.m_tilde, split.d1, out.index_a);
  sample_subset_floyd(rng, spec.n_tilde, split.d2, out.index_b);
  out.coeff_a.resize(out.index_a.size());
  out.coeff_b.resize(out.index_b.size());
  if (mode == CoeffMode::kGaussian) {
    for (auto& c : out.coeff_a) c = rng.gaussian();
    for (auto& c : out.coeff_b) c = rng.gaussian();
  } else {
    for (auto& c : out.coeff_a) c = 1.0;
    for (auto& c : out.coeff_b) c = 1.0;
  }
}

std::vector<WorkerTask> generate_tasks(const PartitionSpec& spec, const DegreeDistribution& dist,
                                       SplitScheme scheme, int worker_count, CoeffMode mode, Rng& rng) {
  spec.validate();
  const auto violations = validate(dist, spec.m_tilde, spec.n_tilde);
  for (const auto& v : violations) {
    if (v.kind == DistributionViolation::Kind::kUnsplittableDegree) {
      throw NoValidSplitError(v.degree, "distribution contains an unsplittable degree");
    }
  }
  if (!violations.empty()) throw Error("degree distribution failed validation: " + violations.front().to_string());

  const SplitTable splits(dist, spec.m_tilde, spec.n_tilde);
  std::vector<WorkerTask> tasks;
  tasks.reserve(static_cast<std::size_t>(worker_count));
  TaskDraw draw;
  for (int p = 0; p < worker_count; ++p) {
    draw_task(spec, dist, splits, scheme, mode, rng, draw);
    WorkerTask task;
    task.worker = p;
    task.index_a = draw.index_a;
    task.coeff_a = draw.coeff_a;
    task.index_b = draw.index_b;
    task.coeff_b = draw.coeff_b;
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::pair<Matrix, Matrix> encode_inputs(const WorkerTask& task, std::span<const Matrix> blocks_a,
                                        std::span<const Matrix> blocks_b) {
  if (task.index_a.empty() || task.index_b.empty()) throw Error("task has empty index set");
  auto weighted_sum = [](const std::vector<int>& indices, const std::vector<double>& coeffs,
                         std::span<const Matrix> blocks) {
    const Matrix& first = blocks[indices.front()];
    Matrix acc = Matrix::Zero(first.rows(), first.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const int idx = indices[i];
      if (idx < 0 || idx >= static_cast<int>(blocks.size())) {
        throw OutOfRangeError("task references block " + std::to_string(idx));
      }
      const Matrix& block = blocks[idx];
      if (block.rows() != acc.rows() || block.cols() != acc.cols()) {
        throw ShapeMismatchError("input blocks disagree in shape");
      }
      acc += coeffs[i] * block;
    }
    return acc;
  };
  return {weighted_sum(task.index_a, task.coeff_a, blocks_a),
          weighted_sum(task.index_b, task.coeff_b, blocks_b)};
}

Matrix worker_compute(const Matrix& a_tilde, const Matrix& b_tilde) {
  if (a_tilde.rows() != b_tilde.rows()) {
    throw ShapeMismatchError("encoded inputs disagree on the inner dimension");
  }
  return a_tilde.transpose() * b_tilde;
}

Eigen::VectorXd coefficient_row(const WorkerTask& task, const PartitionSpec& spec) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(spec.grid_cells());
  for (std::size_t i = 0; i < task.index_a.size(); ++i) {
    for (std::size_t j = 0; j < task.index_b.size(); ++j) {
      row[flat_index(task.index_a[i], task.index_b[j], spec)] = task.coeff_a[i] * task.coeff_b[j];
    }
  }
  return row;
}

Matrix CoefficientMatrix::dense() const {
  Matrix out = Matrix::Zero(rows, cols);
  for (int p = 0; p < rows; ++p) {
    for (std::size_t e = 0; e < support[p].size(); ++e) out(p, support[p][e]) = values[p][e];
  }
  return out;
}

CoefficientMatrix coefficient_matrix(std::span<const WorkerTask> tasks, const PartitionSpec& spec) {
  CoefficientMatrix mat;
  mat.rows = static_cast<int>(tasks.size());
  mat.cols = spec.grid_cells();
  mat.support.resize(tasks.size());
  mat.values.resize(tasks.size());
  for (std::size_t p = 0; p < tasks.size(); ++p) {
    const auto& task = tasks[p];
    mat.support[p].reserve(task.index_a.size() * task.index_b.size());
    mat.values[p].reserve(task.index_a.size() * task.index_b.size());
    for (std::size_t i = 0; i < task.index_a.size(); ++i) {
      for (std::size_t j = 0; j < task.index_b.size(); ++j) {
        mat.support[p].push_back(flat_index(task.index_a[i], task.index_b[j], spec));
        mat.values[p].push_back(task.coeff_a[i] * task.coeff_b[j]);
      }
    }
  }
  return mat;
}

}  // namespace frc
