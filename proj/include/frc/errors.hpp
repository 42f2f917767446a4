#pragma once

#include <stdexcept>
#include <string>

namespace frc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A block count that does not divide the matrix dimension it partitions.
class NonDivisibleError : public Error {
 public:
  NonDivisibleError(int k, int dim)
      : Error("block count " + std::to_string(k) + " does not divide dimension " + std::to_string(dim)) {}
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// A systematic grid cell required for reassembly is erased.
class MissingBlockError : public Error {
 public:
  MissingBlockError(int i, int j)
      : Error("missing systematic block (" + std::to_string(i) + "," + std::to_string(j) + ")"),
        row(i),
        col(j) {}
  int row;
  int col;
};

class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

class NoValidSplitError : public Error {
 public:
  NoValidSplitError(int degree, const std::string& why)
      : Error("degree " + std::to_string(degree) + " has no valid split: " + why), degree(degree) {}
  int degree;
};

class DegenerateDistributionError : public Error {
 public:
  using Error::Error;
};

class SingularGeneratorError : public Error {
 public:
  using Error::Error;
};

class TooManyErasuresError : public Error {
 public:
  using Error::Error;
};

class IllConditionedError : public Error {
 public:
  using Error::Error;
};

class NumericUnderflowError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Configuration/input file problems surfaced by the CLI as exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace frc
