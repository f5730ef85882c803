#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nwidth {

// Configuration and schema problems; the CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Anything that goes wrong inside a study once the configuration is valid;
// the CLI maps these to exit code 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated a documented operation precondition.
class PreconditionError : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotEllipticError : public DomainError {
 public:
  NotEllipticError(const std::string& what, double min_real_part)
      : DomainError(what), min_real(min_real_part) {}
  double min_real;
};

class DegreeCapError : public DomainError {
 public:
  DegreeCapError(const std::string& what, int degree, int cap)
      : DomainError(what), degree(degree), cap(cap) {}
  int degree;
  int cap;
};

class NewtonDivergenceError : public DomainError {
 public:
  NewtonDivergenceError(const std::string& what, std::vector<double> history)
      : DomainError(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

class CombinatorialBlowupError : public DomainError {
 public:
  CombinatorialBlowupError(const std::string& what, double predicted_centers)
      : DomainError(what), predicted_centers(predicted_centers) {}
  double predicted_centers;
};

class DegenerateBoxError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace nwidth
