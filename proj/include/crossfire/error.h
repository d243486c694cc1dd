#ifndef CROSSFIRE_ERROR_H_
#define CROSSFIRE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crossfire {

// Base for every error raised by the engine. The CLI maps subclasses onto
// exit codes: ValidationError -> 1, everything else -> 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Graph is not connected from its root, or an edge label repeats.
class MalformedGraphError : public Error {
 public:
  using Error::Error;
};

// Bytes are not valid JSON. `offset` is the byte offset of the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Well-formed JSON that violates the schema; `field` names the culprit.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class DataIntegrityError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace crossfire

#endif  // CROSSFIRE_ERROR_H_
