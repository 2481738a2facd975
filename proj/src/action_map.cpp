#include "peo/action_map.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "embedded_data.hpp"
#include "peo/error.hpp"

namespace peo {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  std::size_t bangs = 0;
  for (char c : key) {
    auto u = static_cast<unsigned char>(c);
    if (c == '!') {
      ++bangs;
    } else if (!(std::islower(u) || std::isdigit(u) || c == '_' || c == '.' || c == '@' || c == '?' ||
                 c == '$')) {
      return false;
    }
  }
  return bangs == 0 || (bangs == 1 && key.front() != '!' && key.back() != '!');
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string dll_base_name(std::string_view dll) {
  std::string out = lower(dll);
  if (out.size() > 4 && out.ends_with(".dll")) out.resize(out.size() - 4);
  return out;
}

std::string_view strip_api_suffix(std::string_view f) {
  auto follows_lower = [&](std::size_t suffix_len) {
    if (f.size() <= suffix_len) return false;
    auto c = static_cast<unsigned char>(f[f.size() - suffix_len - 1]);
    return std::islower(c) || std::isdigit(c);
  };
  for (std::string_view suffix : {"ExA", "ExW", "Ex", "A", "W"}) {
    if (f.ends_with(suffix) && follows_lower(suffix.size())) return f.substr(0, f.size() - suffix.size());
  }
  return f;
}

std::string normalize_api_name(std::string_view /*dll*/, std::string_view function) {
  return lower(strip_api_suffix(function));
}

void ApiActionMap::add(std::string key, std::string action_id, bool suffix_strippable, const Vocabulary& v,
                       std::size_t line) {
  if (!valid_key(key)) throw ActionMapError(ActionMapError::Kind::Malformed, line, key, "key is not a lowercase API name");
  if (!v.find_action(action_id))
    throw ActionMapError(ActionMapError::Kind::UnknownActionId, line, key, "unknown action id '" + action_id + "'");
  if (entries_.count(key)) throw ActionMapError(ActionMapError::Kind::DuplicateKey, line, key, "key listed twice");
  entries_.emplace(std::move(key), Entry{std::move(action_id), suffix_strippable});
}

const ApiActionMap::Entry* ApiActionMap::find(std::string_view key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<std::string_view> ApiActionMap::lookup(std::string_view dll, std::string_view function) const {
  std::string base = dll_base_name(dll);
  std::string exact = lower(function);
  std::string stripped = lower(strip_api_suffix(function));
  if (!base.empty())
    if (const Entry* e = find(base + "!" + exact)) return e->action_id;
  if (const Entry* e = find(exact)) return e->action_id;
  if (stripped != exact) {
    if (!base.empty())
      if (const Entry* e = find(base + "!" + stripped); e && e->suffix_strippable) return e->action_id;
    if (const Entry* e = find(stripped); e && e->suffix_strippable) return e->action_id;
  }
  return std::nullopt;
}

std::set<std::string> ApiActionMap::action_ids() const {
  std::set<std::string> out;
  for (const auto& [key, e] : entries_) out.insert(e.action_id);
  return out;
}

ApiActionMap parse_action_map(std::string_view text, const Vocabulary& v) {
  ApiActionMap m;
  std::size_t line_no = 0;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      cols.push_back(trim(line.substr(start, tab - start)));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 2 || cols.size() > 3 || cols[0].empty() || cols[1].empty())
      throw ActionMapError(ActionMapError::Kind::Malformed, line_no, std::string(cols[0]),
                           "expected key<TAB>action_id");
    bool strippable = true;
    if (cols.size() == 3) {
      if (cols[2] != "exact")
        throw ActionMapError(ActionMapError::Kind::Malformed, line_no, std::string(cols[0]),
                             "third column must be 'exact'");
      strippable = false;
    }
    m.add(std::string(cols[0]), std::string(cols[1]), strippable, v, line_no);
  }
  return m;
}

ApiActionMap load_action_map(const std::filesystem::path& path, const Vocabulary& v) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_action_map(buf.str(), v);
}

const ApiActionMap& builtin_action_map() {
  static const ApiActionMap m = parse_action_map(embedded::action_map_tsv(), builtin_vocabulary());
  return m;
}

std::set<std::string> map_imports(const ImportTable& imports, const ApiActionMap& m, MappingStats* stats) {
  std::set<std::string> out;
  MappingStats local;
  for (const auto& [dll, functions] : imports) {
    for (const auto& f : functions) {
      if (auto id = m.lookup(dll, f)) {
        out.emplace(*id);
        ++local.mapped_functions;
      } else {
        ++local.unmapped_functions;
      }
    }
  }
  if (stats) *stats += local;
  return out;
}

}  // namespace peo
