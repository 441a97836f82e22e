#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graphsplit {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: malformed graph, dimension mismatch, bad configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition failed (degenerate spectrum, inconsistent residual).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Subspace analysis was requested on an operator that is not a subspace normal cone.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

/// Non-finite iterate detected while running a splitting method.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace graphsplit
