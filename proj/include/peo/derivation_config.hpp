#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace peo {

/// Thresholds and lists controlling which features a sample receives.
struct DerivationConfig {
  /// A sample importing fewer functions than this has LowImportsCount.
  std::uint64_t imports_threshold = 10;
  /// A section with entropy strictly above this has HighEntropy.
  double entropy_threshold = 7.0;
  std::vector<std::string> standard_section_names = default_standard_section_names();
  std::string clr_directory_name = "CLR_RUNTIME_HEADER";

  static std::vector<std::string> default_standard_section_names();

  /// Throws std::invalid_argument when a threshold is out of range.
  void validate() const;
};

/// Reads one section name per line; blank lines and `#` comments are skipped.
std::vector<std::string> parse_section_name_list(std::string_view text);
std::vector<std::string> load_section_name_list(const std::filesystem::path& path);

/// Expands the `${imports_threshold}`, `${entropy_threshold}` and
/// `${standard_section_names}` placeholders of a derived_as template.
std::string render_derived_expression(std::string_view templ, const DerivationConfig& cfg);

}  // namespace peo
