#pragma once

#include <stdexcept>
#include <string>

namespace thermoform {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that violates a documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

class LengthError : public DomainError {
 public:
  LengthError(const std::string& what, std::size_t required)
      : DomainError(what + " (required length " + std::to_string(required) + ")"),
        required_(required) {}
  std::size_t required() const { return required_; }

 private:
  std::size_t required_;
};

// Exhaustive enumeration or table size beyond the supported cap.
class CapacityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (last residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace thermoform
