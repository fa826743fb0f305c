#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coopnet {

// What kind of input/contract violation a ValidationError reports.
// Kept as a tag rather than a class hierarchy so callers can switch on it.
enum class ErrorKind {
  MalformedLine,
  MissingField,
  DuplicateId,
  UnknownDoc,
  LengthMismatch,
  MissingLogprobs,
  MissingRoles,
  MissingSaliency,
  MissingExternalProbs,
  MissingModel,
  FeatureMismatch,
  DegenerateData,
  EmptyPool,
  EmptyRoles,
  EmptyInput,
  OutOfRange,
  IdMismatch,
  IoError,
  BadConfig,
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

namespace errors {

inline ValidationError malformed_line(std::size_t line_no, const std::string& detail) {
  return {ErrorKind::MalformedLine,
          "line " + std::to_string(line_no) + ": " + detail};
}

inline ValidationError missing_field(std::size_t line_no, const std::string& field) {
  return {ErrorKind::MissingField,
          "line " + std::to_string(line_no) + ": missing field \"" + field + "\""};
}

inline ValidationError duplicate_id(std::size_t line_no, const std::string& id) {
  return {ErrorKind::DuplicateId,
          "line " + std::to_string(line_no) + ": duplicate document id \"" + id + "\""};
}

inline ValidationError unknown_doc(std::size_t line_no, const std::string& id) {
  return {ErrorKind::UnknownDoc,
          "line " + std::to_string(line_no) + ": candidate references unknown document \"" + id + "\""};
}

inline ValidationError length_mismatch(std::size_t line_no, const std::string& field,
                                       std::size_t got, std::size_t want) {
  return {ErrorKind::LengthMismatch,
          "line " + std::to_string(line_no) + ": field \"" + field + "\" has length " +
              std::to_string(got) + ", expected " + std::to_string(want)};
}

inline ValidationError io_error(const std::string& path, const std::string& detail) {
  return {ErrorKind::IoError, path + ": " + detail};
}

}  // namespace errors
}  // namespace coopnet
