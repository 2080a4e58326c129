#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace timepoint {

/// Base of every error thrown by the library. `name()` is the stable error
/// identifier (e.g. "ParseError") used by the CLI and host-language bindings.
class Error : public std::runtime_error {
public:
  Error(std::string name, const std::string& message);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class ImproperInterval : public Error {
public:
  explicit ImproperInterval(const std::string& message) : Error("ImproperInterval", message) {}
};

class UnknownRelation : public Error {
public:
  explicit UnknownRelation(const std::string& message) : Error("UnknownRelation", message) {}
};

class DimensionMismatch : public Error {
public:
  explicit DimensionMismatch(const std::string& message)
      : Error("DimensionMismatch", message) {}
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string& message) : Error("DomainError", message) {}
};

class LengthMismatch : public Error {
public:
  LengthMismatch(std::size_t gold, std::size_t pred);
};

class SchemaError : public Error {
public:
  SchemaError(std::string name, const std::string& message) : Error(std::move(name), message) {}
};

class DuplicateId : public Error {
public:
  explicit DuplicateId(const std::string& id);
};

class SplitViolation : public Error {
public:
  explicit SplitViolation(const std::string& message) : Error("SplitViolation", message) {}
};

class EmptyDataset : public Error {
public:
  EmptyDataset() : Error("EmptyDataset", "training data is empty") {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& message) : Error("IoError", message) {}
};

}  // namespace timepoint
