#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace renorm {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An inverse-power sum was requested outside the class where it converges.
class DivergentSum : public Error {
 public:
  using Error::Error;
};

/// An extrapolated limit did not stabilise on the evaluation grid.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// No closed form for the singular part r(Λ) is implemented for this
/// regulator / tail combination.
class UnsupportedRegulatorTail : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureFailure : public Error {
 public:
  QuadratureFailure(const std::string& what, double achieved_error)
      : Error(what), achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// The integrand oscillates faster than the node budget can resolve.
class OscillationBudgetExceeded : public Error {
 public:
  OscillationBudgetExceeded(const std::string& what, std::size_t required_nodes)
      : Error(what), required_nodes_(required_nodes) {}
  std::size_t required_nodes() const noexcept { return required_nodes_; }

 private:
  std::size_t required_nodes_;
};

/// A formal-series coefficient would need an infinite loop value.
class InfiniteCoefficient : public Error {
 public:
  using Error::Error;
};

/// Malformed descriptor or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace renorm
