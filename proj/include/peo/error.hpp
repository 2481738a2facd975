#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace peo {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  IoError(std::string path, std::string_view what);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A JSON-Lines record could not be turned into a RawSample.
class IngestError : public Error {
 public:
  enum class Kind {
    MalformedJson,
    MissingRequiredField,
    FieldTypeMismatch,
    InvalidFieldValue,
  };

  IngestError(Kind kind, std::size_t line, std::string field, std::string_view detail);

  Kind kind() const noexcept { return kind_; }
  /// 1-based line number in the source file.
  std::size_t line() const noexcept { return line_; }
  /// Dotted path of the offending field; empty for MalformedJson.
  const std::string& field() const noexcept { return field_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::string field_;
};

std::string_view to_string(IngestError::Kind kind);

/// The vocabulary data is inconsistent (VocabularyCorrupt / InvalidVocabulary).
class VocabularyError : public Error {
 public:
  using Error::Error;
};

class ActionMapError : public Error {
 public:
  enum class Kind { UnknownActionId, DuplicateKey, Malformed };

  ActionMapError(Kind kind, std::size_t line, std::string key, std::string_view detail);

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::string key_;
};

/// A knowledge base references a prototype the vocabulary does not declare.
class UnknownPrototypeError : public Error {
 public:
  explicit UnknownPrototypeError(std::string name);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Turtle / N-Triples input that the reader cannot parse.
class RdfSyntaxError : public Error {
 public:
  RdfSyntaxError(std::size_t line, std::string_view detail);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class QueryError : public Error {
 public:
  enum class Kind { SyntaxError, UnknownName, NoLabeledData };

  QueryError(Kind kind, std::size_t position, std::string_view detail);

  Kind kind() const noexcept { return kind_; }
  /// 0-based character offset into the expression text.
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

class SamplingError : public Error {
 public:
  enum class Kind { InsufficientSamples, InvalidK, InvalidSpec };

  SamplingError(Kind kind, std::string_view detail);
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace peo
