#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace achedge {

// Parameter set outside the model's admissible domain.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// sqrt(rho)*T too small for the closed-form denominators to be meaningful.
class DegenerateHorizonError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Discretized objective is not strictly concave (negated Hessian failed to factor).
class NonConcaveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class McOverflowError : public std::overflow_error {
 public:
  McOverflowError(std::size_t path_index, const std::string& what)
      : std::overflow_error(what), path_index_(path_index) {}
  std::size_t path_index() const noexcept { return path_index_; }

 private:
  std::size_t path_index_;
};

}  // namespace achedge
