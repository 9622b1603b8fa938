#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace netstab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on shapes, indices or parameter values was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A model was evaluated at a pole or outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be invertible is singular or numerically singular.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  [[nodiscard]] double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// An iterative method ran out of its iteration budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  [[nodiscard]] double residual() const noexcept { return residual_; }
  [[nodiscard]] int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// A candidate equilibrium does not annihilate the vector field.
class EquilibriumError : public Error {
 public:
  EquilibriumError(const std::string& what, std::size_t worst_patch, double residual)
      : Error(what), worst_patch_(worst_patch), residual_(residual) {}
  [[nodiscard]] std::size_t worst_patch() const noexcept { return worst_patch_; }
  [[nodiscard]] double residual() const noexcept { return residual_; }

 private:
  std::size_t worst_patch_;
  double residual_;
};

/// Scenario document failed validation; path is a JSON pointer into it.
class ScenarioError : public Error {
 public:
  ScenarioError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace netstab
