#pragma once

// Manchester-style class expressions evaluated under closed-world semantics:
// the explicit assertions of a knowledge base are taken as complete, and
// `not` complements within the file, section and prototype individuals.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "peo/kb.hpp"
#include "peo/turtle.hpp"
#include "peo/vocabulary.hpp"

namespace peo {

enum class Facet { Less, LessEqual, Greater, GreaterEqual, Equal };

std::string_view to_string(Facet f);

struct Literal {
  enum class Type { Integer, Double, String };
  Type type = Type::String;
  std::string lexical;

  bool operator==(const Literal&) const = default;
};

struct DataRange {
  enum class Kind { Datatype, OneOf, Complement };
  Kind kind = Kind::Datatype;
  std::string datatype;  // "xsd:integer", "xsd:double", "xsd:string" (Datatype only)
  std::optional<Facet> facet;
  Literal facet_value;
  std::vector<Literal> values;   // OneOf
  std::vector<DataRange> inner;  // Complement: exactly one

  bool operator==(const DataRange&) const = default;
};

struct ClassExpression {
  enum class Kind { Class, Nominal, Not, And, Or, ObjectSome, ObjectMin, DataSome };
  Kind kind = Kind::Class;
  std::string name;                      // class or property name
  std::vector<std::string> individuals;  // Nominal
  std::vector<ClassExpression> operands; // Not: 1, And/Or: >= 2, ObjectSome/ObjectMin: filler
  std::uint64_t cardinality = 0;         // ObjectMin, >= 1
  DataRange range;                       // DataSome

  static ClassExpression atom(std::string name);
  static ClassExpression nominal(std::vector<std::string> names);
  static ClassExpression negation(ClassExpression e);
  static ClassExpression conjunction(std::vector<ClassExpression> es);
  static ClassExpression disjunction(std::vector<ClassExpression> es);
  static ClassExpression some(std::string property, ClassExpression filler);
  static ClassExpression min(std::uint64_t n, std::string property, ClassExpression filler);
  static ClassExpression data_some(std::string property, DataRange range);

  bool operator==(const ClassExpression&) const = default;
};

/// Grammar (loosest to tightest): `or`, `and`, `not`, then primaries:
/// `(expr)`, `{name, ...}`, class names, `p some filler`, `p min N [filler]`
/// and `dp some range` with ranges `xsd:T`, `xsd:T[op value]`, `{literal, ...}`
/// and `not range`. A `peo:` prefix on names is accepted and dropped.
/// Throws QueryError (SyntaxError with offset, UnknownName).
ClassExpression parse_expression(std::string_view text, const Vocabulary& v = builtin_vocabulary());

/// Fully parenthesized text; parse_expression(to_string(e)) == e.
std::string to_string(const ClassExpression& e);

/// Dense bitset over the individuals of a QueryModel.
class IndividualSet {
 public:
  IndividualSet() = default;
  explicit IndividualSet(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  std::size_t universe() const noexcept { return n_; }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  std::size_t count() const;
  std::vector<std::size_t> indices() const;

  IndividualSet& operator&=(const IndividualSet& o);
  IndividualSet& operator|=(const IndividualSet& o);
  IndividualSet complement() const;
  bool operator==(const IndividualSet&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct QueryOptions {
  Namespace ns;
  /// When false, links to derived features are ignored as if never asserted.
  bool include_derived = true;
};

/// Indexed, immutable view of a knowledge base. Individuals are numbered:
/// files, then sections, then prototypes. Concurrent queries are safe.
class QueryModel {
 public:
  QueryModel(const KnowledgeBase& kb, const Vocabulary& v = builtin_vocabulary(), QueryOptions options = {});

  std::size_t size() const noexcept { return iris_.size(); }
  std::size_t file_count() const noexcept { return n_files_; }
  std::size_t section_count() const noexcept { return n_sections_; }
  const std::string& iri(std::size_t i) const { return iris_[i]; }
  std::optional<std::size_t> find(std::string_view local_name) const;

  IndividualSet files() const;
  IndividualSet sections() const;
  IndividualSet evaluate(const ClassExpression& e) const;
  /// IRIs of the PE files in evaluate(e), sorted.
  std::vector<std::string> evaluate_files(const ClassExpression& e) const;
  /// IRIs of members of `s`, in individual order.
  std::vector<std::string> members(const IndividualSet& s) const;
  /// -1, 0 or 1 for file individuals.
  int label(std::size_t file_index) const { return labels_[file_index]; }

 private:
  struct DataValue {
    Literal::Type type;
    std::int64_t integer = 0;
    double real = 0.0;
    const std::string* text = nullptr;
  };
  bool matches(const DataRange& r, const DataValue& value) const;
  std::vector<DataValue> data_values(std::size_t individual, std::string_view property) const;
  int object_property_index(std::string_view name) const;

  const Vocabulary* vocab_;
  QueryOptions options_;
  std::size_t n_files_ = 0;
  std::size_t n_sections_ = 0;
  std::vector<std::string> iris_;
  std::vector<std::string> local_names_;
  std::vector<std::string> direct_class_;
  std::vector<int> labels_;
  std::vector<std::array<std::uint64_t, 7>> file_data_;
  std::vector<double> section_entropy_;
  std::vector<std::string> section_name_;
  // adjacency per object property, indexed like kObjectProperties in the source
  std::vector<std::vector<std::vector<std::uint32_t>>> edges_;
  std::map<std::string, std::size_t, std::less<>> by_local_name_;
};

struct ConceptScore {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
  /// Set when the corresponding ratio had a zero denominator and was reported as 0.
  bool precision_undefined = false, recall_undefined = false, f1_undefined = false;

  std::string to_json() const;
};

/// Confusion counts of evaluate(e) over labeled files. Throws QueryError
/// (NoLabeledData) when no file is labeled.
ConceptScore score(const ClassExpression& e, const QueryModel& model);

}  // namespace peo
