#pragma once

#include <stdexcept>
#include <string>

namespace fracctl {

// Bad argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct SizeError : std::length_error {
  using std::length_error::length_error;
};

// A requested accuracy cannot be met within the configured budget.
struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Linear solve failed or the state went non-finite.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fracctl
