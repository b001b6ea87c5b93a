#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace headimit {

// Base of every error thrown by the library. `exit_code()` is what the CLI
// maps the error to (2 = data error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
};

class DegenerateLandmarks : public Error {
 public:
  using Error::Error;
};

class NotUnit : public Error {
 public:
  using Error::Error;
};

class FitFailure : public Error {
 public:
  using Error::Error;
};

class InvertedBounds : public Error {
 public:
  using Error::Error;
};

class InvalidTable : public Error {
 public:
  using Error::Error;
};

class NonMonotonicSeq : public Error {
 public:
  using Error::Error;
};

class UnknownEmotion : public Error {
 public:
  using Error::Error;
};

class Rejected : public Error {
 public:
  using Error::Error;
};

class DegenerateSeries : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Wire-record validation failure. `field()` is the dotted path of the first
// offending field, e.g. "pose.nose".
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error("schema error at '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Error tied to a line of a newline-delimited file (replay input, session log).
class LineError : public Error {
 public:
  LineError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class LogParseError : public LineError {
 public:
  using LineError::LineError;
};

}  // namespace headimit
