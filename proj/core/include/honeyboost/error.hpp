#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace honeyboost {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Header does not match the protocol's column set.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A field is well-formed but violates a record invariant.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::size_t row)
      : Error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// A field could not be read as a number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class EmptyStreamError : public Error {
 public:
  using Error::Error;
};

class WindowError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace honeyboost

namespace honeyboost {

// Fewer tail exceedances than a generalized Pareto fit needs.
class InsufficientTailError : public InsufficientDataError {
 public:
  using InsufficientDataError::InsufficientDataError;
};

}  // namespace honeyboost
