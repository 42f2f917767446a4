#include "doctest.h"
#include "frc/rng.hpp"

#include <cmath>
#include <map>

TEST_CASE("identical seeds give identical streams") {
  frc::Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived substreams differ by any word") {
  const auto base = frc::derive_seed({1, 2, 3});
  CHECK(base != frc::derive_seed({1, 2, 4}));
  CHECK(base != frc::derive_seed({1, 3, 3}));
  CHECK(base != frc::derive_seed({2, 2, 3}));
}

TEST_CASE("below is in range and roughly uniform") {
  frc::Rng rng(7);
  std::map<std::uint64_t, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++counts[rng.below(6)];
  for (const auto& [v, c] : counts) {
    CHECK(v < 6);
    // 5 sigma band around draws/6
    CHECK(std::abs(c - draws / 6.0) < 5.0 * std::sqrt(draws * (1.0 / 6) * (5.0 / 6)));
  }
}

TEST_CASE("gaussian moments") {
  frc::Rng rng(11);
  const int draws = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sq += g * g;
  }
  CHECK(std::abs(sum / draws) < 0.02);
  CHECK(std::abs(sq / draws - 1.0) < 0.02);
}

TEST_CASE("floyd subsets are sorted, distinct, in range") {
  frc::Rng rng(5);
  std::vector<int> subset;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(20));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    frc::sample_subset_floyd(rng, n, k, subset);
    REQUIRE(subset.size() == static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < subset.size(); ++i) {
      CHECK(subset[i] >= 0);
      CHECK(subset[i] < n);
      if (i) CHECK(subset[i] > subset[i - 1]);
    }
  }
}

TEST_CASE("floyd subsets are uniform over pairs") {
  // all C(4,2)=6 pairs should appear with equal frequency
  frc::Rng rng(123);
  std::map<std::pair<int, int>, int> counts;
  std::vector<int> subset;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    frc::sample_subset_floyd(rng, 4, 2, subset);
    ++counts[{subset[0], subset[1]}];
  }
  REQUIRE(counts.size() == 6);
  for (const auto& [pair, c] : counts) {
    CHECK(std::abs(c - draws / 6.0) < 5.0 * std::sqrt(draws * (1.0 / 6) * (5.0 / 6)));
  }
}
