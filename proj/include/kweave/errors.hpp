#pragma once

#include <stdexcept>
#include <string>

namespace kweave {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes do not match the space.
struct DimensionError : Error { using Error::Error; };

/// Input matrix deviates from Hermitian beyond tolerance.
struct NotHermitianError : Error { using Error::Error; };

/// Operation requires at least one family member.
struct EmptyFamilyError : Error { using Error::Error; };

/// Two families disagree in size or live in different spaces.
struct MismatchError : Error { using Error::Error; };

/// Exhaustive subset enumeration requested beyond the supported size.
struct SubsetBudgetError : Error { using Error::Error; };

/// Restricted indefinite form is singular (degenerate subspace).
struct DegenerateSubspaceError : Error { using Error::Error; };

/// Frame operator is singular; the family is not a frame.
struct NotAFrameError : Error { using Error::Error; };

/// Tight frame generation needs at least as many vectors as dimensions.
struct InsufficientRedundancyError : Error { using Error::Error; };

/// A nonzero vector was required.
struct ZeroVectorError : Error { using Error::Error; };

/// Malformed input file or configuration.
struct ValidationError : Error { using Error::Error; };

}  // namespace kweave
