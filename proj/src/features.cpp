#include "peo/features.hpp"

#include <algorithm>

namespace peo {

namespace {

constexpr std::array<std::string_view, kFileFeatureCount> kFileFeatureNames = {
    "Debug",   "Relocations",       "Resources",
    "Signature", "TLS",             "CLR",
    "NonexecutableEntryPoint",      "Exports",
    "MultipleExecutableSections",   "LowImportsCount",
    "NonstandardMZ", "PathStrings", "RegistryStrings",
    "Symbols", "URLStrings"};

constexpr std::array<std::string_view, kSectionFeatureCount> kSectionFeatureNames = {
    "HighEntropy", "NonstandardSectionName", "WriteExecuteSection"};

constexpr std::array<std::string_view, kSectionFlagCount> kSectionFlagNames = {
    "Executable", "Readable", "Writable", "Shareable"};

constexpr std::array<std::string_view, 4> kSectionClassNames = {
    "Section", "CodeSection", "InitializedDataSection", "UninitializedDataSection"};

constexpr std::array<std::string_view, 2> kFileClassNames = {"ExecutableFile",
                                                             "DynamicLinkLibrary"};

template <class Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<Enum>(it - names.begin());
}

template <class Enum, std::size_t N>
std::array<Enum, N> enumerate() {
  std::array<Enum, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = static_cast<Enum>(i);
  return out;
}

}  // namespace

std::array<FileFeature, kFileFeatureCount> all_file_features() {
  return enumerate<FileFeature, kFileFeatureCount>();
}
std::array<SectionFeature, kSectionFeatureCount> all_section_features() {
  return enumerate<SectionFeature, kSectionFeatureCount>();
}
std::array<SectionFlag, kSectionFlagCount> all_section_flags() {
  return enumerate<SectionFlag, kSectionFlagCount>();
}

std::string_view class_name(FileClass c) { return kFileClassNames[static_cast<std::size_t>(c)]; }
std::string_view class_name(SectionClass c) {
  return kSectionClassNames[static_cast<std::size_t>(c)];
}
std::string_view class_name(SectionFlag f) { return kSectionFlagNames[static_cast<std::size_t>(f)]; }
std::string_view class_name(SectionFeature f) {
  return kSectionFeatureNames[static_cast<std::size_t>(f)];
}
std::string_view class_name(FileFeature f) { return kFileFeatureNames[static_cast<std::size_t>(f)]; }

std::optional<FileClass> file_class_from_name(std::string_view name) {
  return lookup<FileClass>(kFileClassNames, name);
}
std::optional<SectionClass> section_class_from_name(std::string_view name) {
  return lookup<SectionClass>(kSectionClassNames, name);
}
std::optional<SectionFlag> section_flag_from_name(std::string_view name) {
  return lookup<SectionFlag>(kSectionFlagNames, name);
}
std::optional<SectionFeature> section_feature_from_name(std::string_view name) {
  return lookup<SectionFeature>(kSectionFeatureNames, name);
}
std::optional<FileFeature> file_feature_from_name(std::string_view name) {
  return lookup<FileFeature>(kFileFeatureNames, name);
}

bool is_derived(FileFeature f) {
  return static_cast<unsigned>(f) >= static_cast<unsigned>(FileFeature::Exports);
}

FileClass classify_file(const RawSample& s) {
  const auto& chars = s.header.coff_characteristics;
  return std::find(chars.begin(), chars.end(), "DLL") != chars.end() ? FileClass::DynamicLinkLibrary
                                                                       : FileClass::ExecutableFile;
}

SectionFlagSet derive_section_flags(const SectionEntry& e) {
  SectionFlagSet flags;
  if (e.has_prop("MEM_EXECUTE")) flags.insert(SectionFlag::Executable);
  if (e.has_prop("MEM_READ")) flags.insert(SectionFlag::Readable);
  if (e.has_prop("MEM_WRITE")) flags.insert(SectionFlag::Writable);
  if (e.has_prop("MEM_SHARED")) flags.insert(SectionFlag::Shareable);
  return flags;
}

SectionClass classify_section(const SectionEntry& e) {
  if (e.has_prop("CNT_CODE")) return SectionClass::CodeSection;
  if (e.has_prop("CNT_UNINITIALIZED_DATA")) return SectionClass::UninitializedDataSection;
  if (e.has_prop("CNT_INITIALIZED_DATA")) return SectionClass::InitializedDataSection;
  return SectionClass::Section;
}

SectionFeatureSet derive_section_features(const SectionEntry& e, SectionFlagSet flags,
                                          const DerivationConfig& cfg) {
  SectionFeatureSet features;
  if (e.entropy > cfg.entropy_threshold) features.insert(SectionFeature::HighEntropy);
  const auto& std_names = cfg.standard_section_names;
  if (std::find(std_names.begin(), std_names.end(), e.name) == std_names.end())
    features.insert(SectionFeature::NonstandardSectionName);
  if (flags.contains(SectionFlag::Writable) && flags.contains(SectionFlag::Executable))
    features.insert(SectionFeature::WriteExecuteSection);
  return features;
}

SectionProfile profile_section(const SectionEntry& e, const DerivationConfig& cfg) {
  SectionProfile p;
  p.section_class = classify_section(e);
  p.flags = derive_section_flags(e);
  p.features = derive_section_features(e, p.flags, cfg);
  p.name = e.name;
  p.entropy = e.entropy;
  return p;
}

FileFeatureSet derive_file_features(const RawSample& s, const DerivationConfig& cfg,
                                    DerivationStats* stats) {
  FileFeatureSet f;
  const auto& g = s.general;

  if (g.has_debug) f.insert(FileFeature::Debug);
  if (g.has_relocations) f.insert(FileFeature::Relocations);
  if (g.has_resources) f.insert(FileFeature::Resources);
  if (g.has_signature) f.insert(FileFeature::Signature);
  if (g.has_tls) f.insert(FileFeature::TLS);

  for (const auto& d : s.datadirectories) {
    if (d.name == cfg.clr_directory_name && d.virtual_address > 0) {
      f.insert(FileFeature::CLR);
      break;
    }
  }
  // An entry point that names no known section cannot be checked; leave the
  // feature off and count it.
  if (const SectionEntry* entry = s.section.entry_section()) {
    if (!entry->has_prop("MEM_EXECUTE")) f.insert(FileFeature::NonexecutableEntryPoint);
  } else if (stats) {
    ++stats->entry_point_unresolved;
  }

  if (g.exports > 0) f.insert(FileFeature::Exports);
  auto executable = std::count_if(s.section.sections.begin(), s.section.sections.end(),
                                  [](const SectionEntry& e) { return e.has_prop("MEM_EXECUTE"); });
  if (executable >= 2) f.insert(FileFeature::MultipleExecutableSections);
  if (g.imports < cfg.imports_threshold) f.insert(FileFeature::LowImportsCount);
  if (s.strings.mz != 1) f.insert(FileFeature::NonstandardMZ);
  if (s.strings.paths > 0) f.insert(FileFeature::PathStrings);
  if (s.strings.registry > 0) f.insert(FileFeature::RegistryStrings);
  if (g.symbols > 0) f.insert(FileFeature::Symbols);
  if (s.strings.urls > 0) f.insert(FileFeature::URLStrings);
  return f;
}

}  // namespace peo
