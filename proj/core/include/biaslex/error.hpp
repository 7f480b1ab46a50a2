#pragma once

#include <stdexcept>
#include <string>

namespace biaslex {

// Root of every error the library throws. The CLI maps the subclasses to
// distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration: violated invariants, bad flags, mismatched shapes.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that cannot be used: malformed files, unknown keys.
class DataError : public Error {
 public:
  using Error::Error;
};

// JSON/text parse failure. Carries the 1-based line of the failure when known.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// An annotated bias statement could not be located in the cleaned text.
class SpanLocationError : public DataError {
 public:
  SpanLocationError(const std::string& decision_id, const std::string& what)
      : DataError(what), decision_id_(decision_id) {}
  const std::string& decision_id() const { return decision_id_; }

 private:
  std::string decision_id_;
};

// Non-finite loss or gradient.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A metric whose denominator is empty (e.g. recall of an absent class).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace biaslex
