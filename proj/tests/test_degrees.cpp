#include "doctest.h"
#include "frc/degrees.hpp"
#include "helpers.hpp"

#include <cmath>
#include <map>
#include <sstream>

using frc::DegreeDistribution;
using frc::SplitPair;
using frc::SplitScheme;

namespace {

// brute-force oracle: every ordered factor pair inside the bounds
std::vector<SplitPair> splits_by_enumeration(int d, int m, int n) {
  std::vector<SplitPair> out;
  for (int d1 = 1; d1 <= m; ++d1) {
    for (int d2 = 1; d2 <= n; ++d2) {
      if (d1 * d2 == d) out.push_back({d1, d2});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("valid_splits worked cases") {
  CHECK(frc::valid_splits(4, 3, 3) == std::vector<SplitPair>{{2, 2}});
  CHECK(frc::valid_splits(6, 3, 3) == std::vector<SplitPair>{{2, 3}, {3, 2}});
  // composite degree with no admissible factorization
  CHECK(frc::valid_splits(25, 4, 4).empty());
}

TEST_CASE("valid_splits equals brute-force enumeration") {
  for (int d = 1; d <= 40; ++d) {
    for (int m = 1; m <= 7; ++m) {
      for (int n = 1; n <= 7; ++n) {
        CHECK(frc::valid_splits(d, m, n) == splits_by_enumeration(d, m, n));
      }
    }
  }
}

TEST_CASE("validate accepts the sweep distribution on an 82x82 grid") {
  const auto dist = testutil::sweep_distribution();
  CHECK(frc::validate(dist, 82, 82).empty());
  CHECK(dist.mean_degree() == doctest::Approx(5.0783).epsilon(1e-9));
}

TEST_CASE("validate flags unsplittable degrees and bad mass") {
  const auto unsplittable = DegreeDistribution::from_mass({{25, 1.0}});
  auto violations = frc::validate(unsplittable, 4, 4);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].kind == frc::DistributionViolation::Kind::kUnsplittableDegree);
  CHECK(violations[0].degree == 25);
  CHECK(violations[0].to_string() == "UnsplittableDegree(25)");

  const auto short_mass = DegreeDistribution::from_mass({{1, 0.5}, {2, 0.4}});
  violations = frc::validate(short_mass, 4, 4);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].kind == frc::DistributionViolation::Kind::kMassNotOne);
  CHECK(violations[0].value == doctest::Approx(0.9));
}

TEST_CASE("sample_degree point mass") {
  const auto dist = DegreeDistribution::from_mass({{3, 1.0}});
  frc::Rng rng(9);
  for (int i = 0; i < 100; ++i) CHECK(frc::sample_degree(dist, rng) == 3);
}

TEST_CASE("sample_degree frequencies within 3-sigma") {
  const auto dist = DegreeDistribution::from_mass({{1, 0.2}, {2, 0.7}, {4, 0.1}});
  frc::Rng rng(20240901);
  std::map<int, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[frc::sample_degree(dist, rng)];
  const std::map<int, double> expected{{1, 0.2}, {2, 0.7}, {4, 0.1}};
  for (const auto& [d, p] : expected) {
    const double sigma = std::sqrt(draws * p * (1 - p));
    CHECK(std::abs(counts[d] - draws * p) < 3 * sigma);
  }
}

TEST_CASE("sample_degree is reproducible for a fixed seed") {
  const auto dist = DegreeDistribution::from_mass({{1, 0.2}, {2, 0.7}, {4, 0.1}});
  frc::Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(dist.sample(a) == dist.sample(b));
}

TEST_CASE("sample_split per scheme") {
  frc::Rng rng(5);
  // unique valid split
  CHECK(frc::sample_split(4, 3, 3, SplitScheme::kSchemeIII, rng) == SplitPair{2, 2});
  // scheme I out of bounds
  CHECK_THROWS_AS(frc::sample_split(4, 3, 3, SplitScheme::kSchemeI, rng), frc::NoValidSplitError);
  CHECK(frc::sample_split(3, 3, 3, SplitScheme::kSchemeI, rng) == SplitPair{3, 1});

  // scheme III uniform over {(2,3),(3,2)}
  int first = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto split = frc::sample_split(6, 3, 3, SplitScheme::kSchemeIII, rng);
    CHECK(split.d1 * split.d2 == 6);
    if (split == SplitPair{2, 3}) ++first;
  }
  CHECK(std::abs(first - draws / 2.0) < 3 * std::sqrt(draws * 0.25));

  // scheme II coin
  int row_side = 0;
  for (int i = 0; i < draws; ++i) {
    const auto split = frc::sample_split(2, 3, 3, SplitScheme::kSchemeII, rng);
    if (split == SplitPair{2, 1}) {
      ++row_side;
    } else {
      CHECK(split == SplitPair{1, 2});
    }
  }
  CHECK(std::abs(row_side - draws / 2.0) < 3 * std::sqrt(draws * 0.25));
}

TEST_CASE("scheme III split frequencies are uniform (chi-squared)") {
  // d=18 on the sweep grid has six valid splits
  const auto splits = frc::valid_splits(18, 82, 82);
  REQUIRE(splits.size() == 6);
  frc::Rng rng(77);
  std::map<int, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto s = frc::sample_split(18, 82, 82, SplitScheme::kSchemeIII, rng);
    ++counts[s.d1];
  }
  double chi2 = 0.0;
  const double expected = draws / 6.0;
  for (const auto& s : splits) {
    const double diff = counts[s.d1] - expected;
    chi2 += diff * diff / expected;
  }
  CHECK(chi2 < 20.5);  // df=5, far beyond the 0.999 quantile
}

TEST_CASE("split table matches sample_split draw for draw") {
  const auto dist = testutil::sweep_distribution();
  const frc::SplitTable table(dist, 82, 82);
  frc::Rng a(31), b(31);
  for (int i = 0; i < 2000; ++i) {
    const int d = dist.sample(a);
    (void)dist.sample(b);
    CHECK(table.sample(d, SplitScheme::kSchemeIII, a) ==
          frc::sample_split(d, 82, 82, SplitScheme::kSchemeIII, b));
  }
}

TEST_CASE("robust soliton basics") {
  CHECK(frc::robust_soliton(1, 0.1, 0.5).degrees() == std::vector<int>{1});

  const auto dist = frc::robust_soliton(10, 0.1, 0.5);
  double total = 0.0;
  for (double p : dist.probabilities()) total += p;
  CHECK(std::abs(total - 1.0) < 1e-9);
  for (int d : dist.degrees()) {
    CHECK(d >= 1);
    CHECK(d <= 10);
  }
  // direct formula oracle: unnormalized rho+tau recomputed here
  const double R = 0.1 * std::log(10.0 / 0.5) * std::sqrt(10.0);
  const int spike = static_cast<int>(std::floor(10.0 / R));
  auto weight = [&](int d) {
    double rho = d == 1 ? 0.1 : 1.0 / (static_cast<double>(d) * (d - 1));
    double tau = 0.0;
    if (d < spike) tau = R / (static_cast<double>(d) * 10.0);
    if (d == spike) tau = R * std::log(R / 0.5) / 10.0;
    return rho + tau;
  };
  double beta = 0.0;
  for (int d = 1; d <= 10; ++d) beta += weight(d);
  for (std::size_t i = 0; i < dist.degrees().size(); ++i) {
    CHECK(dist.probabilities()[i] == doctest::Approx(weight(dist.degrees()[i]) / beta).epsilon(1e-12));
  }
}

TEST_CASE("robust soliton filtered by splittability") {
  const auto dist = frc::robust_soliton(10, 0.1, 0.5, 2, 3);
  for (int d : dist.degrees()) CHECK(!frc::valid_splits(d, 2, 3).empty());
  for (int d : dist.degrees()) CHECK(d != 7);  // prime above max(2,3)
  double total = 0.0;
  for (double p : dist.probabilities()) total += p;
  CHECK(std::abs(total - 1.0) < 1e-9);

  CHECK_THROWS_AS(frc::restrict_to_splittable(DegreeDistribution::from_mass({{25, 1.0}}), 4, 4),
                  frc::DegenerateDistributionError);
}

TEST_CASE("degree table round trip") {
  const auto dist = testutil::sweep_distribution();
  std::stringstream ss(dist.to_table());
  const auto parsed = DegreeDistribution::from_table(ss);
  CHECK(parsed.degrees() == dist.degrees());
  for (std::size_t i = 0; i < dist.probabilities().size(); ++i) {
    CHECK(parsed.probabilities()[i] == dist.probabilities()[i]);
  }
  std::stringstream bad("1,0.5\noops\n");
  CHECK_THROWS_AS(DegreeDistribution::from_table(bad), frc::ConfigError);
}
