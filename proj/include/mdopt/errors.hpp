#pragma once

#include <stdexcept>
#include <string>

namespace mdopt {

// Bad numeric input to a model evaluation (non-positive price, index out of range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed documents: JSON model/config files, CSV trajectories.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A closed-form construction was asked for outside the hypotheses it needs
// (mu outside (0,1), rank conditions on alpha, infeasible elasticity, ...).
class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A linear solve or factorization that could not meet its residual bound.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mdopt
