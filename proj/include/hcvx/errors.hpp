#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hcvx {

// Base of every error the library throws. The CLI maps all of these to exit 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Evaluation point outside a function's domain, or at one of its singularities.
class DomainError : public Error {
 public:
  using Error::Error;
};

// g(v) > v: the conditional interval [g(v), v] is empty.
class InfeasibleGate : public Error {
 public:
  using Error::Error;
};

// 0 in K with h(0) != 0, so h(t)/t is unbounded near 0.
class SingularQuotient : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SpectrumDomainError : public Error {
 public:
  SpectrumDomainError(const std::string& what, std::vector<double> offending)
      : Error(what), offending_(std::move(offending)) {}

  const std::vector<double>& offending() const noexcept { return offending_; }

 private:
  std::vector<double> offending_;
};

class EmptyRegion : public Error {
 public:
  using Error::Error;
};

class PrecisionUnavailable : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hcvx
