#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cubeshadow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr const char* kVersion = "0.1.0";

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  TooManySubsets,
  RankDeficient,
  DegenerateDirection,
  DegenerateSubspace,
  NumericalFailure,
  AcceptanceTooLow,
  EmptyBatch,
  Io,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind lets
/// callers (the CLI in particular) tell validation problems apart from
/// numerical ones without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures caused by bad input rather than by the numerics.
  bool is_validation() const noexcept {
    return kind_ == ErrorKind::InvalidArgument || kind_ == ErrorKind::DimensionMismatch ||
           kind_ == ErrorKind::TooManySubsets || kind_ == ErrorKind::Io ||
           kind_ == ErrorKind::EmptyBatch;
  }

 private:
  ErrorKind kind_;
};

/// Binomial coefficient, saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

}  // namespace cubeshadow
