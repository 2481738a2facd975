#pragma once

#include <string_view>

// Bundled copies of the files under data/, compiled into the library so the
// builtin vocabulary and seed tables work without an install tree.
namespace peo::embedded {

std::string_view classes_json();
std::string_view actions_json();
std::string_view properties_json();
std::string_view action_map_tsv();
std::string_view standard_sections_txt();

}  // namespace peo::embedded
