#pragma once

#include <stdexcept>
#include <string>

namespace pilotwave {

/// Bad or inconsistent configuration (grid mismatch, invalid parameters).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical scheme failed (instability, non-convergence).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A caller-declared contract (bound, Lipschitz constant, mass floor) was
/// observed to be violated at run time.
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evaluation requested outside a tabulated domain.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested resolution exceeds the resolution of the data.
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pilotwave
