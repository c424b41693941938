// Error taxonomy for the toolkit. Every failure mode callers are expected to
// handle has its own type; all derive from Error so coarse handling stays easy.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dplr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Design matrix not invertible (e.g. constant x, or a group with all-zero x).
struct SingularDesign : Error {
  using Error::Error;
};

// Residual variance is exactly zero (perfect fit); the F statistic is undefined.
struct ZeroVariance : Error {
  using Error::Error;
};

// A variance estimate went negative (possible only for noised inputs).
struct NegativeVariance : Error {
  using Error::Error;
};

// Reformulated-statistic denominator n(b'E^2 b - 2 b'F + G) is not positive.
struct NonpositiveDenominator : Error {
  using Error::Error;
};

// A private variance piece (e.g. noisy second moment minus squared noisy mean)
// is not positive; callers treat this as "fail to reject".
struct NonpositiveVariancePiece : Error {
  using Error::Error;
};

// clip() called with lo > hi.
struct InvalidBounds : Error {
  using Error::Error;
};

// A generator/config object violates its invariants.
struct InvalidSpec : Error {
  using Error::Error;
};

// CSV cell failed to parse; carries 1-based row and the offending column name.
struct ParseError : Error {
  ParseError(std::size_t row, std::string column, const std::string& what)
      : Error(what), row(row), column(std::move(column)) {}
  std::size_t row;
  std::string column;
};

struct MissingColumn : Error {
  using Error::Error;
};

struct MoreThanTwoGroups : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Diagnostic asked for fewer samples than the minimum needed for a stable KS value.
struct InsufficientSamples : Error {
  using Error::Error;
};

}  // namespace dplr
