#pragma once

#include <stdexcept>
#include <string>

namespace hurdle {

// Malformed or out-of-support input data (negative cost, bad CSV row, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a conversion or density.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Data that parse fine but cannot support the model (e.g. no positive costs in an arm).
class UnsupportedDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InitializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A diagnostic that is mathematically undefined for its input (zero variance, ...).
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hurdle
