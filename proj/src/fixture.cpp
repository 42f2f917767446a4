#include "frc/fixture.hpp"

namespace frc {

namespace {

WorkerTask unit_task(int worker, std::vector<int> index_a, std::vector<int> index_b) {
  WorkerTask task;
  task.worker = worker;
  task.index_a = std::move(index_a);
  task.index_b = std::move(index_b);
  task.coeff_a.assign(task.index_a.size(), 1.0);
  task.coeff_b.assign(task.index_b.size(), 1.0);
  return task;
}

}  // namespace

DemoFixture demo_fixture() {
  Matrix generator(3, 2);
  generator << 1, 0, 0, 1, 1, 1;  // parity block all ones keeps traces integer-exact
  MdsCode component = MdsCode::from_generator(generator);

  return DemoFixture{
      PartitionSpec{.r = 4, .s = 4, .t = 4, .m = 2, .n = 2, .m_tilde = 3, .n_tilde = 3},
      OuterProductCode{component, component},
      {
          unit_task(0, {0}, {1}),
          unit_task(1, {0}, {2}),
          unit_task(2, {0, 1}, {0}),
          unit_task(3, {0, 2}, {0}),
          unit_task(4, {0, 1}, {2}),
          unit_task(5, {0, 2}, {2}),
          unit_task(6, {0}, {0, 1}),
          unit_task(7, {1}, {1, 2}),
          unit_task(8, {2}, {0, 1}),
          unit_task(9, {1, 2}, {1, 2}),
      },
      {0, 2, 4, 6},
  };
}

const std::vector<int>& demo_fixture_expected_order() {
  // peel (0,1), (0,0), (1,0); fill row 0 then column 0; peel (1,2);
  // fill (1,1); fill columns 1 and 2.
  static const std::vector<int> order = {1, 0, 3, 2, 6, 5, 4, 7, 8};
  return order;
}

}  // namespace frc
