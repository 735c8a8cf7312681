#pragma once

#include <stdexcept>
#include <string>

namespace sdosm {

// Invalid arguments or parameters outside the model's admissible set.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent mesh geometry (subdomains that do not share an interface, ...).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failures of iterative or direct solvers (no bracket, no convergence, singular factorization).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularAssemblyError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace sdosm
