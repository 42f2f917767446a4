#include "doctest.h"
#include "frc/flt.hpp"
#include "helpers.hpp"

#include <cmath>
#include <map>
#include <set>

using frc::CoeffMode;
using frc::Matrix;
using frc::PartitionSpec;
using frc::SplitScheme;
using frc::WorkerTask;

namespace {

const PartitionSpec kSpec33{.r = 6, .s = 4, .t = 6, .m = 3, .n = 3, .m_tilde = 3, .n_tilde = 3};

WorkerTask unit_task(std::vector<int> ia, std::vector<int> ib) {
  WorkerTask t;
  t.index_a = std::move(ia);
  t.index_b = std::move(ib);
  t.coeff_a.assign(t.index_a.size(), 1.0);
  t.coeff_b.assign(t.index_b.size(), 1.0);
  return t;
}

}  // namespace

TEST_CASE("point-mass degree one with unit coefficients") {
  const auto dist = frc::DegreeDistribution::from_mass({{1, 1.0}});
  frc::Rng rng(3);
  const auto tasks = frc::generate_tasks(kSpec33, dist, SplitScheme::kSchemeIII, 50, CoeffMode::kUnit, rng);
  REQUIRE(tasks.size() == 50);
  for (const auto& t : tasks) {
    CHECK(t.index_a.size() == 1);
    CHECK(t.index_b.size() == 1);
    CHECK(t.coeff_a[0] == 1.0);
    CHECK(t.coeff_b[0] == 1.0);
  }
}

TEST_CASE("fixed index sets reproduce the worked degree-4 task") {
  // d=4 split (2,2) with I_A={1,2}, I_B={0,2} and unit coefficients
  const WorkerTask task = unit_task({1, 2}, {0, 2});
  frc::Rng rng(4);
  const Matrix a = testutil::random_matrix(4, 6, rng);
  const Matrix b = testutil::random_matrix(4, 6, rng);
  const auto blocks_a = frc::split_columns(a, 3);
  const auto blocks_b = frc::split_columns(b, 3);
  const auto [at, bt] = frc::encode_inputs(task, blocks_a, blocks_b);
  CHECK((at - (blocks_a[1] + blocks_a[2])).cwiseAbs().maxCoeff() == 0.0);
  CHECK((bt - (blocks_b[0] + blocks_b[2])).cwiseAbs().maxCoeff() == 0.0);

  const Matrix c = frc::worker_compute(at, bt);
  const Matrix expected = blocks_a[1].transpose() * blocks_b[0] + blocks_a[1].transpose() * blocks_b[2] +
                          blocks_a[2].transpose() * blocks_b[0] + blocks_a[2].transpose() * blocks_b[2];
  CHECK((c - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("index-set frequencies are uniform over pairs") {
  const auto dist = frc::DegreeDistribution::from_mass({{4, 1.0}});  // forces split (2,2)
  frc::Rng rng(9);
  std::map<std::pair<int, int>, int> counts;
  const int draws = 100000;
  const auto tasks = frc::generate_tasks(kSpec33, dist, SplitScheme::kSchemeIII, draws, CoeffMode::kUnit, rng);
  for (const auto& t : tasks) ++counts[{t.index_a[0], t.index_a[1]}];
  REQUIRE(counts.size() == 3);
  for (const auto& [pair, c] : counts) {
    const double p = 1.0 / 3.0;
    CHECK(std::abs(c - draws * p) < 3 * std::sqrt(draws * p * (1 - p)));
  }
}

TEST_CASE("encode_inputs identity on a single index") {
  frc::Rng rng(5);
  const Matrix a = testutil::random_matrix(4, 6, rng);
  const Matrix b = testutil::random_matrix(4, 6, rng);
  const auto blocks_a = frc::split_columns(a, 3);
  const auto blocks_b = frc::split_columns(b, 3);
  const auto [at, bt] = frc::encode_inputs(unit_task({2}, {1}), blocks_a, blocks_b);
  CHECK(at == blocks_a[2]);
  CHECK(bt == blocks_b[1]);
}

TEST_CASE("encode_inputs matches a scalar-loop oracle with gaussian weights") {
  frc::Rng rng(6);
  const Matrix a = testutil::random_matrix(5, 6, rng);
  const auto blocks_a = frc::split_columns(a, 3);
  WorkerTask task = unit_task({0, 2}, {0});
  task.coeff_a = {rng.gaussian(), rng.gaussian()};
  const auto [at, bt] = frc::encode_inputs(task, blocks_a, blocks_a);
  for (int i = 0; i < at.rows(); ++i) {
    for (int j = 0; j < at.cols(); ++j) {
      const double expect = task.coeff_a[0] * blocks_a[0](i, j) + task.coeff_a[1] * blocks_a[2](i, j);
      CHECK(at(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("worker_compute is the transpose product") {
  Matrix e1 = Matrix::Zero(5, 1);
  e1(0, 0) = 1.0;
  const Matrix c = frc::worker_compute(e1, e1);
  REQUIRE(c.rows() == 1);
  REQUIRE(c.cols() == 1);
  CHECK(c(0, 0) == 1.0);

  frc::Rng rng(7);
  const Matrix a = testutil::random_matrix(5, 2, rng);
  const Matrix b = testutil::random_matrix(5, 3, rng);
  const Matrix prod = frc::worker_compute(a, b);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 5; ++k) acc += a(k, i) * b(k, j);
      CHECK(prod(i, j) == doctest::Approx(acc).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(frc::worker_compute(Matrix::Zero(4, 2), Matrix::Zero(5, 2)), frc::ShapeMismatchError);
}

TEST_CASE("coefficient_row lays out the outer product row-major") {
  WorkerTask task = unit_task({1, 2}, {0, 2});
  const auto row = frc::coefficient_row(task, kSpec33);
  Eigen::VectorXd expected(9);
  expected << 0, 0, 0, 1, 0, 1, 1, 0, 1;
  CHECK(row == expected);

  // single index -> standard basis vector
  const auto basis = frc::coefficient_row(unit_task({1}, {2}), kSpec33);
  CHECK(basis.sum() == 1.0);
  CHECK(basis[5] == 1.0);

  // gaussian task equals the flattened outer product a b^T
  frc::Rng rng(8);
  task.coeff_a = {rng.gaussian(), rng.gaussian()};
  task.coeff_b = {rng.gaussian(), rng.gaussian()};
  const auto grow = frc::coefficient_row(task, kSpec33);
  for (std::size_t i = 0; i < task.index_a.size(); ++i) {
    for (std::size_t j = 0; j < task.index_b.size(); ++j) {
      CHECK(grow[task.index_a[i] * 3 + task.index_b[j]] == task.coeff_a[i] * task.coeff_b[j]);
    }
  }
}

TEST_CASE("coefficient_matrix rows have cartesian-product support") {
  frc::Rng rng(10);
  const auto dist = frc::DegreeDistribution::from_mass({{1, 0.2}, {2, 0.5}, {4, 0.3}});
  const auto tasks = frc::generate_tasks(kSpec33, dist, SplitScheme::kSchemeIII, 200, CoeffMode::kGaussian, rng);
  const auto mat = frc::coefficient_matrix(tasks, kSpec33);
  REQUIRE(mat.rows == 200);
  REQUIRE(mat.cols == 9);
  for (int p = 0; p < mat.rows; ++p) {
    const auto& task = tasks[p];
    std::set<int> expected;
    for (int i : task.index_a) {
      for (int j : task.index_b) expected.insert(i * 3 + j);
    }
    CHECK(std::set<int>(mat.support[p].begin(), mat.support[p].end()) == expected);
    CHECK(mat.support[p].size() == static_cast<std::size_t>(task.degree()));
    // gaussian coefficients are never exactly zero
    for (double v : mat.values[p]) CHECK(v != 0.0);
  }

  const auto empty = frc::coefficient_matrix(std::span<const WorkerTask>{}, kSpec33);
  CHECK(empty.rows == 0);
  CHECK(empty.cols == 9);
}

TEST_CASE("factorization identity against the block-sum oracle") {
  frc::Rng rng(11);
  const Matrix a = testutil::random_matrix(6, 6, rng);
  const Matrix b = testutil::random_matrix(6, 6, rng);
  const auto blocks_a = frc::split_columns(a, 3);
  const auto blocks_b = frc::split_columns(b, 3);
  const auto dist = frc::DegreeDistribution::from_mass({{2, 0.5}, {4, 0.3}, {6, 0.2}});
  const auto tasks = frc::generate_tasks(kSpec33, dist, SplitScheme::kSchemeIII, 100, CoeffMode::kGaussian, rng);
  for (const auto& task : tasks) {
    const auto [at, bt] = frc::encode_inputs(task, blocks_a, blocks_b);
    const Matrix direct = frc::worker_compute(at, bt);
    Matrix sum = Matrix::Zero(direct.rows(), direct.cols());
    for (std::size_t i = 0; i < task.index_a.size(); ++i) {
      for (std::size_t j = 0; j < task.index_b.size(); ++j) {
        sum += task.coeff_a[i] * task.coeff_b[j] *
               (blocks_a[task.index_a[i]].transpose() * blocks_b[task.index_b[j]]);
      }
    }
    const double scale = std::max(1.0, sum.cwiseAbs().maxCoeff());
    CHECK((direct - sum).cwiseAbs().maxCoeff() / scale < 1e-9);
  }
}

TEST_CASE("task record round trip") {
  WorkerTask task = unit_task({1, 2}, {0, 2});
  task.worker = 7;
  task.coeff_a = {0.5, -1.25};
  task.coeff_b = {2.0, 3.5};
  const auto parsed = WorkerTask::from_record(task.to_record());
  CHECK(parsed.worker == 7);
  CHECK(parsed.index_a == task.index_a);
  CHECK(parsed.index_b == task.index_b);
  CHECK(parsed.coeff_a == task.coeff_a);
  CHECK(parsed.coeff_b == task.coeff_b);
  CHECK_THROWS_AS(WorkerTask::from_record("garbage"), frc::ConfigError);
}

TEST_CASE("generate_tasks rejects an invalid distribution") {
  const auto dist = frc::DegreeDistribution::from_mass({{25, 1.0}});
  frc::Rng rng(12);
  PartitionSpec spec{.r = 4, .s = 4, .t = 4, .m = 4, .n = 4, .m_tilde = 4, .n_tilde = 4};
  CHECK_THROWS_AS(frc::generate_tasks(spec, dist, SplitScheme::kSchemeIII, 10, CoeffMode::kUnit, rng),
                  frc::NoValidSplitError);
}
