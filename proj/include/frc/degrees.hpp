#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "frc/errors.hpp"
#include "frc/rng.hpp"

namespace frc {

// How a sampled degree d is factored into d = d1 * d2 with d1 row blocks
// and d2 column blocks.
//   I:   always (d, 1)
//   II:  a fair coin picks (d, 1) or (1, d)
//   III: uniform over every admissible factor pair
enum class SplitScheme { kSchemeI, kSchemeII, kSchemeIII };

const char* to_string(SplitScheme scheme);
SplitScheme split_scheme_from_string(const std::string& name);

struct SplitPair {
  int d1 = 0;
  int d2 = 0;
  bool operator==(const SplitPair&) const = default;
};

// All ordered pairs (d1, d2) with d1 * d2 = d, d1 <= m, d2 <= n, sorted by
// d1 ascending. May be empty: a composite degree can still be unsplittable
// (d = 25 with m = n = 4).
std::vector<SplitPair> valid_splits(int d, int m, int n);

// Probability mass over output-symbol degrees, stored ascending.
class DegreeDistribution {
 public:
  DegreeDistribution() = default;
  static DegreeDistribution from_mass(const std::map<int, double>& mass);

  const std::vector<int>& degrees() const { return degrees_; }
  const std::vector<double>& probabilities() const { return probs_; }
  bool empty() const { return degrees_.empty(); }
  int max_degree() const { return degrees_.empty() ? 0 : degrees_.back(); }
  double mean_degree() const;

  // Inverse-CDF draw; consumes one uniform double.
  int sample(Rng& rng) const;

  // Text form: "degree,probability" per line, ascending degree.
  std::string to_table() const;
  static DegreeDistribution from_table(std::istream& in);
  static DegreeDistribution from_table_file(const std::string& path);

 private:
  std::vector<int> degrees_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

struct DistributionViolation {
  enum class Kind { kMassNotOne, kNegativeMass, kUnsplittableDegree };
  Kind kind;
  int degree = 0;    // for kUnsplittableDegree / kNegativeMass
  double value = 0;  // offending mass or total
  std::string to_string() const;
};

// Full admissibility check against a target (m, n) grid: mass sums to one,
// no negative mass, and every supported degree has at least one valid split.
std::vector<DistributionViolation> validate(const DegreeDistribution& dist, int m, int n);

int sample_degree(const DegreeDistribution& dist, Rng& rng);

// One split draw. Scheme III is uniform over valid_splits(d, m, n); the
// paper-facing schemes I/II throw NoValidSplitError when their forced split
// violates the bounds.
SplitPair sample_split(int d, int m, int n, SplitScheme scheme, Rng& rng);

// Precomputed split sets for every degree in a distribution's support;
// the O(1) hot path used by task generation. Draws exactly as many words as
// sample_split would.
class SplitTable {
 public:
  SplitTable(const DegreeDistribution& dist, int m, int n);
  SplitPair sample(int d, SplitScheme scheme, Rng& rng) const;

 private:
  int m_ = 0;
  int n_ = 0;
  std::vector<int> slot_of_degree_;  // degree -> offset index, -1 if absent
  std::vector<int> offsets_;
  std::vector<SplitPair> splits_;
};

// Standard robust soliton over degrees 1..K.
DegreeDistribution robust_soliton(int K, double c, double delta);

// Robust soliton with unsplittable degrees zeroed and the rest renormalized,
// so samplers never stall on a degree that cannot be factored.
DegreeDistribution robust_soliton(int K, double c, double delta, int m, int n);

DegreeDistribution restrict_to_splittable(const DegreeDistribution& dist, int m, int n);

}  // namespace frc
