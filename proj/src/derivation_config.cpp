#include "peo/derivation_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "embedded_data.hpp"
#include "peo/error.hpp"
#include "peo/turtle.hpp"

namespace peo {

std::vector<std::string> DerivationConfig::default_standard_section_names() {
  return parse_section_name_list(embedded::standard_sections_txt());
}

void DerivationConfig::validate() const {
  if (imports_threshold == 0) throw std::invalid_argument("imports threshold must be positive");
  if (!(entropy_threshold > 0.0 && entropy_threshold < 8.0))
    throw std::invalid_argument("entropy threshold must lie in (0, 8)");
}

std::vector<std::string> parse_section_name_list(std::string_view text) {
  std::vector<std::string> names;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    names.push_back(line);
  }
  return names;
}

std::vector<std::string> load_section_name_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_section_name_list(buf.str());
}

std::string render_derived_expression(std::string_view templ, const DerivationConfig& cfg) {
  std::string names;
  for (const auto& n : cfg.standard_section_names) {
    if (!names.empty()) names += ", ";
    names += "\"" + escape_literal(n) + "\"";
  }
  const std::pair<std::string_view, std::string> vars[] = {
      {"${imports_threshold}", std::to_string(cfg.imports_threshold)},
      {"${entropy_threshold}", format_double(cfg.entropy_threshold)},
      {"${standard_section_names}", names},
  };
  std::string out(templ);
  for (const auto& [key, value] : vars) {
    for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size()))
      out.replace(pos, key.size(), value);
  }
  return out;
}

}  // namespace peo
