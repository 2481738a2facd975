#pragma once

// Maps imported API functions to action identifiers of the vocabulary.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "peo/ember.hpp"
#include "peo/vocabulary.hpp"

namespace peo {

/// Lowercase DLL name without a trailing ".dll".
std::string dll_base_name(std::string_view dll);

/// Removes one trailing ExA, ExW, Ex, A or W. The suffix must follow a
/// lowercase letter or digit, so "GetDC" and "WSA" keep their last capital.
std::string_view strip_api_suffix(std::string_view function);

/// Canonical key of a function: lowercased, suffix-stripped. The DLL only
/// matters for qualified lookups, see ApiActionMap::lookup.
std::string normalize_api_name(std::string_view dll, std::string_view function);

class ApiActionMap {
 public:
  struct Entry {
    std::string action_id;
    bool suffix_strippable = true;
  };

  /// Adds one row. Throws ActionMapError (DuplicateKey, UnknownActionId, Malformed).
  void add(std::string key, std::string action_id, bool suffix_strippable, const Vocabulary& v,
           std::size_t line = 0);

  /// Resolution order: dll-qualified exact name, exact name, dll-qualified
  /// stripped name, stripped name. Stripped matches need a strippable entry.
  std::optional<std::string_view> lookup(std::string_view dll, std::string_view function) const;

  const std::map<std::string, Entry, std::less<>>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::set<std::string> action_ids() const;

 private:
  const Entry* find(std::string_view key) const;
  std::map<std::string, Entry, std::less<>> entries_;
};

/// Parses `key<TAB>action_id[<TAB>exact]` rows; `#` starts a comment line.
ApiActionMap parse_action_map(std::string_view text, const Vocabulary& v);
ApiActionMap load_action_map(const std::filesystem::path& path, const Vocabulary& v);

/// The curated table shipped with the library, validated against builtin_vocabulary().
const ApiActionMap& builtin_action_map();

struct MappingStats {
  std::size_t mapped_functions = 0;
  std::size_t unmapped_functions = 0;

  MappingStats& operator+=(const MappingStats& o) {
    mapped_functions += o.mapped_functions;
    unmapped_functions += o.unmapped_functions;
    return *this;
  }
};

/// Deduplicated set of action ids reached by the imported functions.
std::set<std::string> map_imports(const ImportTable& imports, const ApiActionMap& m,
                                  MappingStats* stats = nullptr);

}  // namespace peo
