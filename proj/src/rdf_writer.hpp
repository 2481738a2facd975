#pragma once

// Internal: renders per-subject statement blocks as Turtle or N-Triples with
// a canonical ordering (rdf:type first, then predicates and objects sorted).

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace peo::detail {

struct RdfNode {
  enum class Kind { Iri, Integer, Double, String };
  Kind kind = Kind::Iri;
  std::string value;  // full IRI or lexical form

  static RdfNode iri(std::string v) { return {Kind::Iri, std::move(v)}; }
  static RdfNode integer(std::string v) { return {Kind::Integer, std::move(v)}; }
  static RdfNode dbl(std::string v) { return {Kind::Double, std::move(v)}; }
  static RdfNode string(std::string v) { return {Kind::String, std::move(v)}; }
};

struct SubjectBlock {
  std::string subject;  // full IRI
  std::vector<std::pair<std::string, RdfNode>> statements;  // (predicate IRI, object)

  void add(std::string predicate, RdfNode object) {
    statements.emplace_back(std::move(predicate), std::move(object));
  }
  std::size_t size() const { return statements.size(); }
};

class PrefixMap {
 public:
  void add(std::string prefix, std::string ns) { entries_.emplace_back(std::move(prefix), std::move(ns)); }
  /// `@prefix` lines sorted by prefix, followed by a blank line.
  std::string header() const;
  /// Prefixed name when the IRI falls in a known namespace, else `<iri>`.
  std::string compact(std::string_view iri) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// The five namespaces used by every document: owl, peo, rdf, rdfs, xsd.
PrefixMap standard_prefixes(std::string_view peo_namespace);

std::string render_turtle(const SubjectBlock& block, const PrefixMap& prefixes);
std::string render_ntriples(const SubjectBlock& block);

}  // namespace peo::detail
