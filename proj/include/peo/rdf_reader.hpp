#pragma once

// A small Turtle 1.1 reader (N-Triples is a subset) producing plain triples.
// Collections `( ... )` are not supported.

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace peo {

struct Term {
  enum class Type { Iri, Blank, Literal };

  Type type = Type::Iri;
  std::string value;     // IRI, blank label, or literal lexical form
  std::string datatype;  // full datatype IRI for literals (xsd:string when plain)
  std::string language;

  static Term iri(std::string v) { return {Type::Iri, std::move(v), {}, {}}; }
  bool is_iri() const { return type == Type::Iri; }
  bool is_literal() const { return type == Type::Literal; }

  auto operator<=>(const Term&) const = default;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  auto operator<=>(const Triple&) const = default;
};

/// Parses a Turtle or N-Triples document. Throws RdfSyntaxError.
std::vector<Triple> parse_turtle(std::string_view text);

/// Canonical N-Triples line (with trailing newline) for one triple.
std::string to_ntriples(const Triple& t);

}  // namespace peo
