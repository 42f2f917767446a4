#pragma once

#include <vector>

#include "frc/decoder.hpp"
#include "frc/outer.hpp"

namespace frc {

// Small hand-constructed FR instance with unit coefficients: a 2x2 source
// grid widened to 3x3 by all-ones-parity (3,2) component codes, and ten
// fixed worker tasks. With workers {0,2,4,6} received, its recovery walk
// exercises peeling and both fill directions and can be checked by hand.
struct DemoFixture {
  PartitionSpec spec;
  OuterProductCode codes;
  std::vector<WorkerTask> tasks;
  std::vector<int> default_received;
};

DemoFixture demo_fixture();

// The flat-index recovery order the fixture must produce with the default
// received set.
const std::vector<int>& demo_fixture_expected_order();

}  // namespace frc
