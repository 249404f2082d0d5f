#pragma once

#include <stdexcept>
#include <string>

namespace flashsample {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every candidate has zero probability mass (all logits -inf or banned).
class UndefinedDistributionError : public Error {
 public:
  explicit UndefinedDistributionError(const std::string& what)
      : Error("undefined distribution: " + what) {}
};

// A numeric argument lies outside the domain of the function.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain error: " + what) {}
};

// A caller broke a documented precondition.
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error("contract violation: " + what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("shape mismatch: " + what) {}
};

}  // namespace flashsample
