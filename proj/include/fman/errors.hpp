#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fman {

/// Malformed or inconsistent input data: bad dimensions, chart mismatch,
/// non-linear data where linear data is required, bad file contents.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called on data that does not satisfy its documented
/// precondition (e.g. an associativity check on non-commutative components).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : InputError(message + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownVariable : public ParseError {
 public:
  UnknownVariable(const std::string& name, std::size_t offset)
      : ParseError("unknown variable '" + name + "'", offset), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class DivisionByZero : public std::domain_error {
 public:
  DivisionByZero() : std::domain_error("division by the zero polynomial") {}
};

}  // namespace fman
