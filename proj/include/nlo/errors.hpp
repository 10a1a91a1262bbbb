#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Wavelength coincides with a Sellmeier resonance.
class PoleError : public Error {
 public:
  using Error::Error;
};

// Input carries no usable signal (flat trace, zero dispersion, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

// Errors tied to a specific line of an input file.
class RowError : public Error {
 public:
  RowError(std::size_t row, const std::string& what)
      : Error("line " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ParseError : public RowError {
 public:
  using RowError::RowError;
};

class OrderingError : public RowError {
 public:
  using RowError::RowError;
};

}  // namespace nlo
