#pragma once

// ABox individuals assembled from parsed samples.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "peo/action_map.hpp"
#include "peo/derivation_config.hpp"
#include "peo/ember.hpp"
#include "peo/features.hpp"
#include "peo/rdf_reader.hpp"
#include "peo/turtle.hpp"
#include "peo/vocabulary.hpp"

namespace peo {

/// The seven integer data properties of a PE file, in name order.
inline constexpr std::array<std::string_view, 7> kFileDataProperties = {
    "exports_count",  "imports_count",          "mz_count",          "path_strings_count",
    "registry_strings_count", "symbols_count", "url_strings_count",
};

struct FileDataValues {
  std::array<std::uint64_t, 7> values{};  // indexed like kFileDataProperties

  std::uint64_t get(std::string_view property) const;
  void set(std::string_view property, std::uint64_t value);
  static std::optional<std::size_t> index_of(std::string_view property);

  bool operator==(const FileDataValues&) const = default;
};

struct SectionIndividual {
  std::string iri;
  SectionClass section_class = SectionClass::Section;
  std::string section_name;
  double section_entropy = 0.0;
  SectionFlagSet flags;
  SectionFeatureSet features;

  bool operator==(const SectionIndividual&) const = default;
};

struct PEFileIndividual {
  std::string iri;
  std::string sha256;
  FileClass file_class = FileClass::ExecutableFile;
  FileDataValues data;
  FileFeatureSet features;
  std::set<std::string> actions;
  std::vector<SectionIndividual> sections;
  int label = -1;
  std::optional<std::string> avclass;

  bool operator==(const PEFileIndividual&) const = default;
};

/// Individuals sorted by IRI; IRIs are unique.
struct KnowledgeBase {
  std::vector<PEFileIndividual> files;

  const PEFileIndividual* find(std::string_view iri) const;
  std::size_t section_count() const;
};

struct BuildContext {
  const Vocabulary* vocabulary = &builtin_vocabulary();
  const ApiActionMap* action_map = &builtin_action_map();
  DerivationConfig derivation;
  Namespace ns;
};

struct BuildStats {
  std::size_t parsed = 0;
  std::size_t skipped = 0;
  std::size_t duplicates = 0;
  std::size_t clamped_entropies = 0;
  MappingStats mapping;
  DerivationStats derivation;

  BuildStats& operator+=(const BuildStats& o);
  /// Run report: parsed, skipped, duplicates, unmapped imports and
  /// unresolved entry points.
  std::string to_json() const;
};

std::string file_iri(const Namespace& ns, std::string_view sha256);
std::string section_iri(std::string_view file_iri, std::size_t index);

PEFileIndividual build_individual(const RawSample& s, const BuildContext& ctx, BuildStats* stats = nullptr);

/// One individual per distinct sha256; later duplicates are dropped and
/// counted. Output does not depend on `jobs`.
KnowledgeBase build_kb(std::span<const RawSample> samples, const BuildContext& ctx,
                       BuildStats* stats = nullptr, unsigned jobs = 1);

/// Rebuilds individuals from ABox triples. Labels stay -1; see apply_examples.
/// Throws UnknownPrototypeError for links to undeclared prototypes.
KnowledgeBase kb_from_triples(const std::vector<Triple>& triples, const Vocabulary& v, const Namespace& ns);

/// Sets labels from an examples document (`{"positive":[...],"negative":[...]}`).
/// Returns how many listed IRIs were found in the KB.
std::size_t apply_examples(KnowledgeBase& kb, std::string_view examples_json);

}  // namespace peo
