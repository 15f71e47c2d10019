// errors.hpp
// Error types shared by all defext modules. Subclasses exist so callers
// can tell configuration mistakes from data problems and react with the
// right exit code.

#ifndef DEFEXT_ERRORS_HPP
#define DEFEXT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace defext {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// malformed corpus text (ragged rows etc.); carries a 1-based line number
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + msg), line_number(line) {}
  std::size_t line_number;
};

struct LabelError : Error {
  using Error::Error;
};

struct EmptyCorpusError : Error {
  using Error::Error;
};

// unknown/missing column names or indices
struct SchemaError : Error {
  using Error::Error;
};

// shape mismatch when appending columns
struct DimensionError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// template file syntax; carries a 1-based line number
struct TemplateError : Error {
  TemplateError(const std::string& msg, std::size_t line)
      : Error("template line " + std::to_string(line) + ": " + msg), line_number(line) {}
  std::size_t line_number;
};

// template expansion against a concrete sentence failed (column out of range)
struct ExpansionError : Error {
  using Error::Error;
};

// bad chunk/POS annotations in input columns
struct AnnotationError : Error {
  using Error::Error;
};

// degenerate training input (single label, empty corpus, ...)
struct TrainingError : Error {
  using Error::Error;
};

// model file corrupt, version unknown, or schema fingerprint mismatch
struct ModelError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// an operation was called outside its stated precondition
struct PreconditionError : Error {
  using Error::Error;
};

}  // namespace defext

#endif  // DEFEXT_ERRORS_HPP
