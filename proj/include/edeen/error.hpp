#pragma once

#include <stdexcept>
#include <string>

namespace edeen {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An object was used in the wrong lifecycle state (unfitted, unscaled...).
class StateError : public Error {
 public:
  using Error::Error;
};

/// A model, schema or data file could not be decoded.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// CSV parse failure; carries the 1-based line number.
class ParseError : public FormatError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : FormatError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Sample weights that sum to zero.
class DegenerateWeightsError : public Error {
 public:
  using Error::Error;
};

/// AUROC requested with a single-class label vector.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, std::size_t iteration)
      : Error("training diverged at epoch " + std::to_string(epoch) + ", iteration " +
              std::to_string(iteration)),
        epoch_(epoch),
        iteration_(iteration) {}
  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t epoch_;
  std::size_t iteration_;
};

/// Meta-learner fit on inputs with no variation.
class FitError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace edeen
