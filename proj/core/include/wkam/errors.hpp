#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wkam {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different grids or windows.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A model returned a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A displacement does not fit in the configured velocity window.
class OutOfWindowError : public Error {
 public:
  using Error::Error;
};

class LengthError : public Error {
 public:
  using Error::Error;
};

/// Invalid problem parameters (tau, lambda, damping, ...).
class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

/// A calibrated step does not match the fixed point equation.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Value iteration did not reach its tolerance; carries the residual history.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::vector<double> history);

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace wkam
