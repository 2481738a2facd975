#pragma once

// Rules assigning file classes, section classes, section flags and the file
// and section features of the ontology to a parsed sample.

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "peo/derivation_config.hpp"
#include "peo/ember.hpp"

namespace peo {

/// Small bitmask set over a dense enum with values 0..N-1.
template <class Enum, std::size_t N>
class EnumSet {
  static_assert(N <= 32);

 public:
  constexpr EnumSet() = default;
  constexpr EnumSet(std::initializer_list<Enum> items) {
    for (Enum e : items) insert(e);
  }

  constexpr bool contains(Enum e) const { return bits_ & bit(e); }
  constexpr void insert(Enum e) { bits_ |= bit(e); }
  constexpr void erase(Enum e) { bits_ &= ~bit(e); }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint32_t bits() const { return bits_; }

  template <class F>
  constexpr void for_each(F&& f) const {
    for (std::size_t i = 0; i < N; ++i)
      if (bits_ & (1u << i)) f(static_cast<Enum>(i));
  }

  constexpr bool operator==(const EnumSet&) const = default;

 private:
  static constexpr std::uint32_t bit(Enum e) { return 1u << static_cast<unsigned>(e); }
  std::uint32_t bits_ = 0;
};

enum class FileClass : std::uint8_t { ExecutableFile, DynamicLinkLibrary };

enum class SectionClass : std::uint8_t {
  Section,
  CodeSection,
  InitializedDataSection,
  UninitializedDataSection,
};

enum class SectionFlag : std::uint8_t { Executable, Readable, Writable, Shareable };

enum class SectionFeature : std::uint8_t { HighEntropy, NonstandardSectionName, WriteExecuteSection };

enum class FileFeature : std::uint8_t {
  // direct
  Debug,
  Relocations,
  Resources,
  Signature,
  TLS,
  // pre-processed
  CLR,
  NonexecutableEntryPoint,
  // derived
  Exports,
  MultipleExecutableSections,
  LowImportsCount,
  NonstandardMZ,
  PathStrings,
  RegistryStrings,
  Symbols,
  URLStrings,
};

inline constexpr std::size_t kFileFeatureCount = 15;
inline constexpr std::size_t kSectionFeatureCount = 3;
inline constexpr std::size_t kSectionFlagCount = 4;

using FileFeatureSet = EnumSet<FileFeature, kFileFeatureCount>;
using SectionFeatureSet = EnumSet<SectionFeature, kSectionFeatureCount>;
using SectionFlagSet = EnumSet<SectionFlag, kSectionFlagCount>;

std::array<FileFeature, kFileFeatureCount> all_file_features();
std::array<SectionFeature, kSectionFeatureCount> all_section_features();
std::array<SectionFlag, kSectionFlagCount> all_section_flags();

/// Ontology class names.
std::string_view class_name(FileClass c);
std::string_view class_name(SectionClass c);
std::string_view class_name(SectionFlag f);
std::string_view class_name(SectionFeature f);
std::string_view class_name(FileFeature f);

std::optional<FileClass> file_class_from_name(std::string_view name);
std::optional<SectionClass> section_class_from_name(std::string_view name);
std::optional<SectionFlag> section_flag_from_name(std::string_view name);
std::optional<SectionFeature> section_feature_from_name(std::string_view name);
std::optional<FileFeature> file_feature_from_name(std::string_view name);

/// True for features definable from data that is also represented in the
/// ontology (they carry a derived_as annotation).
bool is_derived(FileFeature f);
constexpr bool is_derived(SectionFeature) { return true; }

struct SectionProfile {
  SectionClass section_class = SectionClass::Section;
  SectionFlagSet flags;
  SectionFeatureSet features;
  std::string name;
  double entropy = 0.0;
};

/// Counters for conditions that could not be decided from the record.
struct DerivationStats {
  std::size_t entry_point_unresolved = 0;
};

FileClass classify_file(const RawSample& s);
SectionFlagSet derive_section_flags(const SectionEntry& e);
SectionClass classify_section(const SectionEntry& e);
SectionFeatureSet derive_section_features(const SectionEntry& e, SectionFlagSet flags,
                                          const DerivationConfig& cfg);
SectionProfile profile_section(const SectionEntry& e, const DerivationConfig& cfg);
FileFeatureSet derive_file_features(const RawSample& s, const DerivationConfig& cfg,
                                    DerivationStats* stats = nullptr);

}  // namespace peo
