#pragma once

// Lexical helpers shared by the Turtle / N-Triples writers.

#include <string>
#include <string_view>

namespace peo {

inline constexpr std::string_view kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfsNs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwlNs = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsdNs = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kDefaultBaseIri = "https://example.org/pe-malware-ontology#";

/// The IRI namespace that ontology terms and individuals live in.
class Namespace {
 public:
  /// Accepts a base IRI; `#` is appended unless it already ends in `#` or `/`.
  Namespace() : Namespace(kDefaultBaseIri) {}
  explicit Namespace(std::string_view base_iri);

  const std::string& prefix_iri() const noexcept { return iri_; }
  std::string iri(std::string_view local) const { return iri_ + std::string(local); }
  /// IRI of the schema ontology: the namespace without its trailing separator.
  std::string ontology_iri() const;
  /// Local part of `iri` when it lies in this namespace.
  std::string_view local_name(std::string_view iri) const;

  bool operator==(const Namespace&) const = default;

 private:
  std::string iri_;
};

/// Shortest decimal text that round-trips to the same double; always contains
/// a '.' or an exponent so it reads back as a double, not an integer.
std::string format_double(double v);

/// Escapes a string for a double-quoted Turtle / N-Triples literal.
std::string escape_literal(std::string_view s);

/// Whether `local` can be written as `prefix:local` without escaping.
bool is_plain_local_name(std::string_view local);

/// `prefix:local` when possible, otherwise `<full-iri>`.
std::string turtle_name(std::string_view prefix, const Namespace& ns, std::string_view local);

}  // namespace peo
