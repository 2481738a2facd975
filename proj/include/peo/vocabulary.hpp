#pragma once

// The ontology schema: class tree, properties, prototypical instances and the
// action catalog. Loaded from the JSON files under data/vocabulary.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "peo/derivation_config.hpp"
#include "peo/turtle.hpp"

namespace peo {

enum class ClassKind {
  Root,
  File,
  Section,
  FileFeature,
  SectionFeature,
  SectionFlag,
  ActionCategory,
  ActionLeaf,
};

std::string_view to_string(ClassKind kind);
std::optional<ClassKind> class_kind_from_string(std::string_view s);

struct ClassInfo {
  std::string name;
  std::vector<std::string> parents;
  ClassKind kind = ClassKind::Root;

  bool operator==(const ClassInfo&) const = default;
};

struct ObjectProperty {
  std::string name;
  std::string domain;
  std::string range;

  bool operator==(const ObjectProperty&) const = default;
};

struct DataProperty {
  std::string name;
  std::string domain;
  std::string range;  // "xsd:integer", "xsd:double" or "xsd:string"

  bool operator==(const DataProperty&) const = default;
};

enum class ActionOrigin { Maec, Extension };

struct ActionCatalogEntry {
  std::string action_id;  // kebab-case, also the prototype name
  std::string leaf_class;
  std::string category;
  ActionOrigin origin = ActionOrigin::Maec;

  bool operator==(const ActionCatalogEntry&) const = default;
};

/// Expected shape of the schema; validate_vocabulary checks against it.
struct VocabularyShape {
  std::size_t file_features = 15;
  std::size_t section_features = 3;
  std::size_t section_flags = 4;
  std::size_t action_categories = 17;
  std::size_t action_leaves = 139;
  std::size_t data_properties = 9;
};

class Vocabulary {
 public:
  std::map<std::string, ClassInfo> classes;
  std::vector<ObjectProperty> object_properties;
  std::vector<DataProperty> data_properties;
  std::vector<std::string> annotation_properties;
  /// class name -> prototypical instance local name
  std::map<std::string, std::string> prototypes;
  /// class name -> derived_as template (may contain ${...} placeholders)
  std::map<std::string, std::string> derived_annotations;
  std::vector<ActionCatalogEntry> actions;

  /// Rebuilds lookup tables. Call after editing the public members.
  void reindex();

  const ClassInfo* find_class(std::string_view name) const;
  const ObjectProperty* find_object_property(std::string_view name) const;
  const DataProperty* find_data_property(std::string_view name) const;
  const ActionCatalogEntry* find_action(std::string_view action_id) const;

  /// Class whose prototypical instance is `prototype`, if any.
  const std::string* class_of_prototype(std::string_view prototype) const;
  /// Prototype of class `name`; throws UnknownPrototypeError if it has none.
  const std::string& prototype_of(std::string_view class_name) const;

  /// Reflexive-transitive subclass test over the explicit tree.
  bool is_subclass_of(std::string_view sub, std::string_view super) const;
  /// `name` followed by all of its ancestors.
  const std::vector<std::string>& ancestors(std::string_view name) const;

  std::size_t count_kind(ClassKind kind) const;

  /// derived_as text with placeholders expanded for `cfg`.
  std::optional<std::string> derived_expression(std::string_view class_name,
                                                const DerivationConfig& cfg) const;

 private:
  std::map<std::string, std::string, std::less<>> prototype_index_;
  std::map<std::string, std::size_t, std::less<>> action_index_;
  std::map<std::string, std::vector<std::string>, std::less<>> ancestors_;
};

/// The vocabulary shipped with the library. Throws VocabularyError
/// (VocabularyCorrupt) if the bundled data fails validation.
const Vocabulary& builtin_vocabulary();

/// Parses the three vocabulary JSON documents without validating them.
Vocabulary parse_vocabulary(std::string_view classes_json, std::string_view actions_json,
                            std::string_view properties_json);

/// Loads classes.json, actions.json and properties.json from `dir` and
/// validates the result.
Vocabulary load_vocabulary(const std::filesystem::path& dir);

/// Every violated invariant, one human-readable entry each; empty when valid.
std::vector<std::string> validate_vocabulary(const Vocabulary& v, const VocabularyShape& shape = {});

/// snake_case rendering used for feature and flag prototypes ("URLStrings" -> "url_strings").
std::string snake_case(std::string_view class_name);
/// PascalCase class name for an action id ("create-process" -> "CreateProcess").
std::string action_class_name(std::string_view action_id);

struct TboxOptions {
  Namespace ns;
  DerivationConfig derivation;
};

/// Deterministic Turtle rendering of the schema. Throws VocabularyError
/// (InvalidVocabulary) when validation fails.
std::string export_tbox(const Vocabulary& v, const TboxOptions& options = {});

/// Rebuilds a vocabulary from an exported TBox document.
Vocabulary import_tbox(std::string_view turtle, const Namespace& ns = Namespace());

}  // namespace peo
