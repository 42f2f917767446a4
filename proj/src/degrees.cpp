#include "frc/degrees.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace frc {

namespace {
constexpr double kMassTolerance = 1e-9;
}

const char* to_string(SplitScheme scheme) {
  switch (scheme) {
    case SplitScheme::kSchemeI:
      return "I";
    case SplitScheme::kSchemeII:
      return "II";
    case SplitScheme::kSchemeIII:
      return "III";
  }
  return "?";
}

SplitScheme split_scheme_from_string(const std::string& name) {
  if (name == "I" || name == "i" || name == "1") return SplitScheme::kSchemeI;
  if (name == "II" || name == "ii" || name == "2") return SplitScheme::kSchemeII;
  if (name == "III" || name == "iii" || name == "3") return SplitScheme::kSchemeIII;
  throw ConfigError("unknown split scheme: " + name);
}

std::vector<SplitPair> valid_splits(int d, int m, int n) {
  std::vector<SplitPair> out;
  if (d < 1) return out;
  for (int d1 = 1; d1 <= d && d1 <= m; ++d1) {
    if (d % d1 != 0) continue;
    const int d2 = d / d1;
    if (d2 <= n) out.push_back({d1, d2});
  }
  return out;
}

DegreeDistribution DegreeDistribution::from_mass(const std::map<int, double>& mass) {
  DegreeDistribution dist;
  double cum = 0.0;
  for (const auto& [degree, prob] : mass) {
    if (degree < 1) throw Error("degrees must be positive");
    if (prob == 0.0) continue;
    dist.degrees_.push_back(degree);
    dist.probs_.push_back(prob);
    cum += prob;
    dist.cumulative_.push_back(cum);
  }
  return dist;
}

double DegreeDistribution::mean_degree() const {
  double mean = 0.0;
  for (std::size_t i = 0; i < degrees_.size(); ++i) mean += degrees_[i] * probs_[i];
  return mean;
}

int DegreeDistribution::sample(Rng& rng) const {
  if (degrees_.empty()) throw Error("cannot sample from an empty distribution");
  const double u = rng.next_double() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const std::size_t idx = std::min<std::size_t>(it - cumulative_.begin(), degrees_.size() - 1);
  return degrees_[idx];
}

std::string DegreeDistribution::to_table() const {
  std::string out;
  char line[64];
  for (std::size_t i = 0; i < degrees_.size(); ++i) {
    std::snprintf(line, sizeof(line), "%d,%.17g\n", degrees_[i], probs_[i]);
    out += line;
  }
  return out;
}

DegreeDistribution DegreeDistribution::from_table(std::istream& in) {
  std::map<int, double> mass;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    int degree = 0;
    double prob = 0.0;
    char trailing = 0;
    if (std::sscanf(line.c_str(), "%d,%lf %c", &degree, &prob, &trailing) != 2) {
      throw ConfigError("bad degree table line " + std::to_string(lineno) + ": " + line);
    }
    if (mass.count(degree)) throw ConfigError("duplicate degree " + std::to_string(degree));
    mass[degree] = prob;
  }
  if (mass.empty()) throw ConfigError("empty degree table");
  return from_mass(mass);
}

DegreeDistribution DegreeDistribution::from_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open degree table: " + path);
  return from_table(in);
}

std::string DistributionViolation::to_string() const {
  char buf[96];
  switch (kind) {
    case Kind::kMassNotOne:
      std::snprintf(buf, sizeof(buf), "MassNotOne(%.12g)", value);
      break;
    case Kind::kNegativeMass:
      std::snprintf(buf, sizeof(buf), "NegativeMass(degree=%d,%.12g)", degree, value);
      break;
    case Kind::kUnsplittableDegree:
      std::snprintf(buf, sizeof(buf), "UnsplittableDegree(%d)", degree);
      break;
  }
  return buf;
}

std::vector<DistributionViolation> validate(const DegreeDistribution& dist, int m, int n) {
  std::vector<DistributionViolation> violations;
  double total = 0.0;
  const auto& degrees = dist.degrees();
  const auto& probs = dist.probabilities();
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    total += probs[i];
    if (probs[i] < 0.0) {
      violations.push_back({DistributionViolation::Kind::kNegativeMass, degrees[i], probs[i]});
    }
    if (probs[i] > 0.0 && valid_splits(degrees[i], m, n).empty()) {
      violations.push_back({DistributionViolation::Kind::kUnsplittableDegree, degrees[i], probs[i]});
    }
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    violations.push_back({DistributionViolation::Kind::kMassNotOne, 0, total});
  }
  return violations;
}

int sample_degree(const DegreeDistribution& dist, Rng& rng) { return dist.sample(rng); }

SplitPair sample_split(int d, int m, int n, SplitScheme scheme, Rng& rng) {
  switch (scheme) {
    case SplitScheme::kSchemeI: {
      if (d > m) throw NoValidSplitError(d, "scheme I needs d <= m");
      if (n < 1) throw NoValidSplitError(d, "scheme I needs n >= 1");
      return {d, 1};
    }
    case SplitScheme::kSchemeII: {
      const bool row_side = rng.below(2) == 0;
      const SplitPair split = row_side ? SplitPair{d, 1} : SplitPair{1, d};
      if (split.d1 > m || split.d2 > n) {
        throw NoValidSplitError(d, std::string("scheme II drew the ") + (row_side ? "row" : "column") +
                                       " side and violates the bounds");
      }
      return split;
    }
    case SplitScheme::kSchemeIII: {
      const auto splits = valid_splits(d, m, n);
      if (splits.empty()) throw NoValidSplitError(d, "no factor pair fits the grid");
      return splits[rng.below(splits.size())];
    }
  }
  throw Error("unreachable split scheme");
}

SplitTable::SplitTable(const DegreeDistribution& dist, int m, int n) : m_(m), n_(n) {
  slot_of_degree_.assign(static_cast<std::size_t>(dist.max_degree()) + 1, -1);
  offsets_.push_back(0);
  int slot = 0;
  for (int d : dist.degrees()) {
    slot_of_degree_[d] = slot++;
    const auto splits = valid_splits(d, m, n);
    splits_.insert(splits_.end(), splits.begin(), splits.end());
    offsets_.push_back(static_cast<int>(splits_.size()));
  }
}

SplitPair SplitTable::sample(int d, SplitScheme scheme, Rng& rng) const {
  if (scheme != SplitScheme::kSchemeIII) return sample_split(d, m_, n_, scheme, rng);
  const int slot = (d < static_cast<int>(slot_of_degree_.size())) ? slot_of_degree_[d] : -1;
  if (slot < 0) throw NoValidSplitError(d, "degree not in distribution support");
  const int begin = offsets_[slot];
  const int count = offsets_[slot + 1] - begin;
  if (count == 0) throw NoValidSplitError(d, "no factor pair fits the grid");
  return splits_[begin + static_cast<int>(rng.below(static_cast<std::uint64_t>(count)))];
}

DegreeDistribution robust_soliton(int K, double c, double delta) {
  if (K < 1) throw Error("robust soliton needs K >= 1");
  if (c <= 0.0 || delta <= 0.0 || delta >= 1.0) throw Error("robust soliton parameters out of range");
  if (K == 1) return DegreeDistribution::from_mass({{1, 1.0}});

  const double big_r = c * std::log(static_cast<double>(K) / delta) * std::sqrt(static_cast<double>(K));
  const int spike = std::min(K, std::max(1, static_cast<int>(std::floor(static_cast<double>(K) / big_r))));

  std::map<int, double> mass;
  for (int d = 1; d <= K; ++d) {
    const double rho = (d == 1) ? 1.0 / K : 1.0 / (static_cast<double>(d) * (d - 1));
    double tau = 0.0;
    if (d < spike) {
      tau = big_r / (static_cast<double>(d) * K);
    } else if (d == spike) {
      tau = big_r * std::log(big_r / delta) / K;
    }
    mass[d] = rho + tau;
  }
  double beta = 0.0;
  for (const auto& [d, w] : mass) beta += w;
  for (auto& [d, w] : mass) w /= beta;
  return DegreeDistribution::from_mass(mass);
}

DegreeDistribution restrict_to_splittable(const DegreeDistribution& dist, int m, int n) {
  std::map<int, double> mass;
  double kept = 0.0;
  const auto& degrees = dist.degrees();
  const auto& probs = dist.probabilities();
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (valid_splits(degrees[i], m, n).empty()) continue;
    mass[degrees[i]] = probs[i];
    kept += probs[i];
  }
  if (kept <= 0.0) {
    throw DegenerateDistributionError("no degree in the distribution admits a valid split");
  }
  for (auto& [d, w] : mass) w /= kept;
  return DegreeDistribution::from_mass(mass);
}

DegreeDistribution robust_soliton(int K, double c, double delta, int m, int n) {
  return restrict_to_splittable(robust_soliton(K, c, delta), m, n);
}

}  // namespace frc
