#pragma once

#include <stdexcept>
#include <string>

namespace pcactl {

// Base of every domain failure raised by the library. The CLI exits with 2
// on ConfigError and 1 on the rest.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error { using Error::Error; };
class DegenerateFieldError : public Error { using Error::Error; };
class ResolutionError : public Error { using Error::Error; };
class SampleSizeError : public Error { using Error::Error; };
class DegenerateFitnessError : public Error { using Error::Error; };
class DegenerateError : public Error { using Error::Error; };
class EmptySelectionError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class EvaluationError : public Error { using Error::Error; };
class ContractViolation : public Error { using Error::Error; };
class SchemaError : public Error { using Error::Error; };
class StoreError : public Error { using Error::Error; };
class IncompatibleRunsError : public Error { using Error::Error; };

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pcactl
