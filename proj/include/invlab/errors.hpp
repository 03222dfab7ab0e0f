#pragma once

#include <stdexcept>
#include <string>

namespace invlab {

/// Requested field modulus is not prime (or is < 2).
struct NonPrimeModulus : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operands have incompatible dimensions (table lengths, matrix shapes, ...).
struct SizeMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Scalar argument outside the function's domain.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Linear system A x = v has no solution.
struct InfeasibleSystem : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Exhaustive enumeration would exceed the configured cap.
struct ScaleLimit : std::length_error {
  using std::length_error::length_error;
};

/// Affine decoder coefficient vector has more nonzeros than the query budget.
struct SparsityViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Decision tree is missing an edge or otherwise structurally broken.
struct MalformedTree : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Invalid inverter construction parameters.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Bound-formula preconditions violated (regime limits on m, q, tau, ...).
struct ParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Decoder attempted more oracle queries than its declared budget.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Protocol run requested with an inverter that failed (or skipped) the
/// linear-preprocessing certification.
struct LinearityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Advice sub-protocol communicated more bits than its declared budget.
struct SubProtocolBudget : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rejection sampling produced fewer conditioned samples than the floor (100).
struct TooFewConditionedSamples : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace invlab
