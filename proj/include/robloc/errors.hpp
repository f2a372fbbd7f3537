#pragma once

#include <stdexcept>

namespace robloc {

// Base class for every error thrown by the toolkit.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension or size mismatch between arguments.
struct ShapeError : Error {
  using Error::Error;
};

// Argument value outside the documented domain.
struct DomainError : Error {
  using Error::Error;
};

// An iterative or factorization kernel failed outright.
struct SolverFailure : Error {
  using Error::Error;
};

// Requested null space is empty (input has full row rank).
struct EmptyNullspaceError : Error {
  using Error::Error;
};

// Least-squares matrix is numerically rank deficient.
struct RankDeficiencyError : Error {
  using Error::Error;
};

// Coherence input contains an all-zero column.
struct DegenerateColumnError : Error {
  using Error::Error;
};

// Anchors are affinely dependent.
struct DegenerateConfigurationError : Error {
  using Error::Error;
};

// The augmented trilateration matrix is rank deficient (constant vector lies
// in the span of the anchor offsets).
struct AugmentedRankError : Error {
  using Error::Error;
};

// Too few anchors for the requested operation.
struct InsufficientAnchorsError : Error {
  using Error::Error;
};

// Rejection sampling could not place a point under the separation constraint.
struct SamplingExhaustedError : Error {
  using Error::Error;
};

// File could not be read or written.
struct IoError : Error {
  using Error::Error;
};

}  // namespace robloc
