#pragma once

// Serialization of knowledge bases as ABox documents and examples files.

#include <cstddef>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "peo/kb.hpp"
#include "peo/turtle.hpp"
#include "peo/vocabulary.hpp"

namespace peo {

enum class RdfFormat { Turtle, NTriples };

struct AboxOptions {
  Namespace ns;
  /// When false, links to prototypes of derived feature classes are omitted.
  bool include_derived = true;
  RdfFormat format = RdfFormat::Turtle;
  /// Defaults to `<ns.ontology_iri()>/abox`.
  std::string ontology_iri;
  /// Defaults to ns.ontology_iri().
  std::string imports_iri;
};

/// Renders individual blocks. Stateless after construction; safe to share
/// between threads.
class AboxRenderer {
 public:
  AboxRenderer(const Vocabulary& v, AboxOptions options);

  /// `@prefix` block for Turtle, empty for N-Triples.
  std::string prefix_header() const;
  /// Ontology declaration importing the schema.
  std::string ontology_header() const;
  /// File block followed by its section blocks, sorted by subject IRI.
  /// Throws UnknownPrototypeError.
  std::string render(const PEFileIndividual& f) const;

  const AboxOptions& options() const noexcept { return options_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  AboxOptions options_;
};

/// Streams an ABox. The ontology header is written before the first
/// individual, so an empty document holds only prefix declarations.
/// Individuals must be supplied in IRI order for sorted output.
class AboxWriter {
 public:
  AboxWriter(std::ostream& out, const AboxRenderer& renderer);

  void write(const PEFileIndividual& f);
  /// Appends a block previously produced by renderer.render().
  void write_rendered(std::string_view block);
  std::size_t individuals() const noexcept { return count_; }

 private:
  std::ostream& out_;
  const AboxRenderer& renderer_;
  std::size_t count_ = 0;
};

std::string emit_abox(const KnowledgeBase& kb, const Vocabulary& v, const AboxOptions& options = {});

/// Streams `{"positive":[...],"negative":[...]}` one IRI per line. Each list
/// must be fed in sorted order.
class ExamplesWriter {
 public:
  explicit ExamplesWriter(std::ostream& out);
  void begin_positive();
  void begin_negative();
  void add(std::string_view iri);
  void finish();

 private:
  void close_list();
  std::ostream& out_;
  int state_ = 0;  // 0 fresh, 1 in positive, 2 in negative, 3 done
  bool first_ = true;
};

/// Sorted positive (label 1) and negative (label 0) IRIs; unlabeled omitted.
std::string emit_examples(const KnowledgeBase& kb);
std::string render_examples(const std::vector<std::string>& positive, const std::vector<std::string>& negative);

}  // namespace peo
