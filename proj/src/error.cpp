#include "peo/error.hpp"

namespace peo {

namespace {

std::string with_line(std::size_t line, std::string_view detail) {
  return "line " + std::to_string(line) + ": " + std::string(detail);
}

}  // namespace

IoError::IoError(std::string path, std::string_view what)
    : Error(path + ": " + std::string(what)), path_(std::move(path)) {}

IngestError::IngestError(Kind kind, std::size_t line, std::string field, std::string_view detail)
    : Error(with_line(line, std::string(to_string(kind)) +
                                (field.empty() ? "" : "(" + field + ")") + ": " +
                                std::string(detail))),
      kind_(kind),
      line_(line),
      field_(std::move(field)) {}

std::string_view to_string(IngestError::Kind kind) {
  switch (kind) {
    case IngestError::Kind::MalformedJson:
      return "MalformedJson";
    case IngestError::Kind::MissingRequiredField:
      return "MissingRequiredField";
    case IngestError::Kind::FieldTypeMismatch:
      return "FieldTypeMismatch";
    case IngestError::Kind::InvalidFieldValue:
      return "InvalidFieldValue";
  }
  return "Unknown";
}

ActionMapError::ActionMapError(Kind kind, std::size_t line, std::string key,
                               std::string_view detail)
    : Error(with_line(line, detail)), kind_(kind), line_(line), key_(std::move(key)) {}

UnknownPrototypeError::UnknownPrototypeError(std::string name)
    : Error("unknown prototype: " + name), name_(std::move(name)) {}

RdfSyntaxError::RdfSyntaxError(std::size_t line, std::string_view detail)
    : Error(with_line(line, detail)), line_(line) {}

QueryError::QueryError(Kind kind, std::size_t position, std::string_view detail)
    : Error("at " + std::to_string(position) + ": " + std::string(detail)),
      kind_(kind),
      position_(position) {}

SamplingError::SamplingError(Kind kind, std::string_view detail)
    : Error(std::string(detail)), kind_(kind) {}

}  // namespace peo
