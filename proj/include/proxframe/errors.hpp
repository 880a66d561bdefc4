#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace proxframe {

/// Base class of every exception thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix has fewer rows than columns where a tall operator is required.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Operator is numerically rank deficient.
class RankError : public Error {
 public:
  using Error::Error;
};

/// Input contains NaN or infinity.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Vector length does not match the operator dimension.
class LengthError : public Error {
 public:
  using Error::Error;
};

/// Scalar parameter outside its admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Grid dimensions too small for the requested operator.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Point lies outside the region required by a closed-form formula.
class RegionError : public Error {
 public:
  using Error::Error;
};

/// Two supposedly equivalent computations disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Step size outside the convergence window of an iteration.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration (CLI flags, JSON config, gallery spec).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, written, or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap. Carries the best iterate seen.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, Eigen::VectorXd best,
                     double residual, long iterations)
      : Error(what),
        best_(std::move(best)),
        residual_(residual),
        iterations_(iterations) {}

  const Eigen::VectorXd& best() const { return best_; }
  double residual() const { return residual_; }
  long iterations() const { return iterations_; }

 private:
  Eigen::VectorXd best_;
  double residual_ = 0.0;
  long iterations_ = 0;
};

}  // namespace proxframe
