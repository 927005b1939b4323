#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fkrank {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition (shape mismatch, bad parameter).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class FactorizationFailure : public Error {
 public:
  FactorizationFailure(const std::string& what, long iterations)
      : Error(what + " did not converge after " + std::to_string(iterations) + " iterations"),
        iterations_(iterations) {}
  long iterations() const noexcept { return iterations_; }

 private:
  long iterations_;
};

/// Adjacent Schur swap between two numerically coincident eigenvalues with a large coupling.
class IllConditionedSwap : public Error {
 public:
  IllConditionedSwap(std::complex<double> first, std::complex<double> second)
      : Error("ill-conditioned eigenvalue swap"), first_(first), second_(second) {}
  std::complex<double> first() const noexcept { return first_; }
  std::complex<double> second() const noexcept { return second_; }

 private:
  std::complex<double> first_;
  std::complex<double> second_;
};

class IdempotencyViolation : public Error {
 public:
  explicit IdempotencyViolation(double residual)
      : Error("matrix is not idempotent (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class BoundaryAmbiguity : public Error {
 public:
  explicit BoundaryAmbiguity(std::vector<std::complex<double>> eigenvalues)
      : Error("eigenvalues lie on the region boundary"), eigenvalues_(std::move(eigenvalues)) {}
  const std::vector<std::complex<double>>& eigenvalues() const noexcept { return eigenvalues_; }

 private:
  std::vector<std::complex<double>> eigenvalues_;
};

class InvarianceViolation : public Error {
 public:
  explicit InvarianceViolation(double residual)
      : Error("projection is not invariant (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class NonBijective : public Error {
 public:
  using Error::Error;
};

/// Skolem-Noether transport found no usable column.
class Degeneracy : public Error {
 public:
  using Error::Error;
};

/// The recovered implementing element does not reproduce the map.
class Inconsistency : public Error {
 public:
  using Error::Error;
};

class NotAnIsometry : public Error {
 public:
  NotAnIsometry(const std::string& what, Eigen::MatrixXcd witness)
      : Error(what), witness_(std::move(witness)) {}
  const Eigen::MatrixXcd& witness() const noexcept { return witness_; }

 private:
  Eigen::MatrixXcd witness_;
};

}  // namespace fkrank
