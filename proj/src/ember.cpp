#include "peo/ember.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "json.hpp"

namespace peo {

namespace {

using nlohmann::json;
using Kind = IngestError::Kind;

constexpr double kMaxEntropy = 8.0;

class FieldReader {
 public:
  FieldReader(std::size_t line, ParseDiagnostics* diag) : line_(line), diag_(diag) {}

  [[noreturn]] void fail(Kind kind, const std::string& field, std::string_view detail) const {
    throw IngestError(kind, line_, field, detail);
  }

  const json* child(const json& obj, const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const json* object(const json& obj, const char* key, const std::string& path) const {
    const json* v = child(obj, key);
    if (v && !v->is_object()) fail(Kind::FieldTypeMismatch, path, "expected an object");
    return v;
  }

  std::uint64_t count(const json& obj, const char* key, const std::string& path) const {
    const json* v = child(obj, key);
    if (!v) return 0;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer()) fail(Kind::InvalidFieldValue, path, "must not be negative");
    fail(Kind::FieldTypeMismatch, path, "expected a non-negative integer");
  }

  // Counts end up as xsd:integer literals and are compared as int64.
  std::uint64_t bounded_count(const json& obj, const char* key, const std::string& path) const {
    std::uint64_t n = count(obj, key, path);
    if (n > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      fail(Kind::InvalidFieldValue, path, "count out of range");
    return n;
  }

  bool flag(const json& obj, const char* key, const std::string& path) const {
    const json* v = child(obj, key);
    if (!v) return false;
    if (v->is_boolean()) return v->get<bool>();
    if (!v->is_number_integer()) fail(Kind::FieldTypeMismatch, path, "expected 0 or 1");
    auto n = v->get<std::int64_t>();
    if (n != 0 && n != 1) fail(Kind::InvalidFieldValue, path, "expected 0 or 1");
    return n == 1;
  }

  double real(const json& obj, const char* key, const std::string& path) const {
    const json* v = child(obj, key);
    if (!v) return 0.0;
    if (!v->is_number()) fail(Kind::FieldTypeMismatch, path, "expected a number");
    return v->get<double>();
  }

  std::int64_t integer(const json& obj, const char* key, const std::string& path) const {
    const json* v = child(obj, key);
    if (!v) return 0;
    if (v->is_number_unsigned()) {
      auto u = v->get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        fail(Kind::InvalidFieldValue, path, "integer out of range");
      return static_cast<std::int64_t>(u);
    }
    if (!v->is_number_integer()) fail(Kind::FieldTypeMismatch, path, "expected an integer");
    return v->get<std::int64_t>();
  }

  std::string text(const json& obj, const char* key, const std::string& path) const {
    const json* v = child(obj, key);
    if (!v) return {};
    if (!v->is_string()) fail(Kind::FieldTypeMismatch, path, "expected a string");
    return v->get<std::string>();
  }

  std::optional<std::string> optional_text(const json& obj, const char* key,
                                           const std::string& path) const {
    if (!child(obj, key)) return std::nullopt;
    return text(obj, key, path);
  }

  std::vector<std::string> texts(const json& obj, const char* key, const std::string& path) const {
    const json* v = child(obj, key);
    if (!v) return {};
    return texts(*v, path);
  }

  std::vector<std::string> texts(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(Kind::FieldTypeMismatch, path, "expected an array of strings");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& item : v) {
      if (!item.is_string()) fail(Kind::FieldTypeMismatch, path, "expected an array of strings");
      out.push_back(item.get<std::string>());
    }
    return out;
  }

  std::vector<std::string> flag_tokens(const json& obj, const char* key,
                                       const std::string& path) const {
    auto tokens = texts(obj, key, path);
    for (const auto& t : tokens) {
      bool ok = !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) {
        return std::isupper(c) || std::isdigit(c) || c == '_';
      });
      if (!ok) fail(Kind::InvalidFieldValue, path, "flag token '" + t + "' is not UPPER_CASE");
    }
    return tokens;
  }

  double entropy(const json& obj, const std::string& path) const {
    double e = real(obj, "entropy", path);
    if (e < 0.0 || e > kMaxEntropy) {
      if (diag_) ++diag_->clamped_entropies;
      e = std::clamp(e, 0.0, kMaxEntropy);
    }
    return e;
  }

 private:
  std::size_t line_;
  ParseDiagnostics* diag_;
};

bool is_hex(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isxdigit(c); });
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

RawSample from_json(const json& doc, std::size_t line, ParseDiagnostics* diag) {
  FieldReader r(line, diag);
  if (!doc.is_object()) r.fail(Kind::MalformedJson, "", "record is not a JSON object");

  RawSample s;
  const json* sha = r.child(doc, "sha256");
  if (!sha) r.fail(Kind::MissingRequiredField, "sha256", "required field is absent");
  if (!sha->is_string()) r.fail(Kind::FieldTypeMismatch, "sha256", "expected a string");
  s.sha256 = lowercase(sha->get<std::string>());
  if (s.sha256.size() != 64 || !is_hex(s.sha256))
    r.fail(Kind::InvalidFieldValue, "sha256", "expected 64 hexadecimal digits");

  s.md5 = r.optional_text(doc, "md5", "md5");
  s.appeared = r.optional_text(doc, "appeared", "appeared");
  s.avclass = r.optional_text(doc, "avclass", "avclass");

  if (const json* label = r.child(doc, "label")) {
    if (!label->is_number_integer()) r.fail(Kind::FieldTypeMismatch, "label", "expected an integer");
    auto v = label->get<std::int64_t>();
    if (v < -1 || v > 1) r.fail(Kind::InvalidFieldValue, "label", "expected -1, 0 or 1");
    s.label = static_cast<int>(v);
  }

  if (const json* g = r.object(doc, "general", "general")) {
    auto& out = s.general;
    out.size = r.count(*g, "size", "general.size");
    out.vsize = r.count(*g, "vsize", "general.vsize");
    out.has_debug = r.flag(*g, "has_debug", "general.has_debug");
    out.has_relocations = r.flag(*g, "has_relocations", "general.has_relocations");
    out.has_resources = r.flag(*g, "has_resources", "general.has_resources");
    out.has_signature = r.flag(*g, "has_signature", "general.has_signature");
    out.has_tls = r.flag(*g, "has_tls", "general.has_tls");
    out.exports = r.bounded_count(*g, "exports", "general.exports");
    out.imports = r.bounded_count(*g, "imports", "general.imports");
    out.symbols = r.bounded_count(*g, "symbols", "general.symbols");
  }

  if (const json* st = r.object(doc, "strings", "strings")) {
    auto& out = s.strings;
    out.numstrings = r.count(*st, "numstrings", "strings.numstrings");
    out.printables = r.count(*st, "printables", "strings.printables");
    out.avlength = r.real(*st, "avlength", "strings.avlength");
    out.entropy = r.real(*st, "entropy", "strings.entropy");
    if (out.avlength < 0.0) r.fail(Kind::InvalidFieldValue, "strings.avlength", "must not be negative");
    if (out.entropy < 0.0) r.fail(Kind::InvalidFieldValue, "strings.entropy", "must not be negative");
    out.paths = r.bounded_count(*st, "paths", "strings.paths");
    out.urls = r.bounded_count(*st, "urls", "strings.urls");
    out.registry = r.bounded_count(*st, "registry", "strings.registry");
    out.mz = r.bounded_count(*st, "MZ", "strings.MZ");
  }

  if (const json* h = r.object(doc, "header", "header")) {
    if (const json* coff = r.object(*h, "coff", "header.coff")) {
      s.header.coff_timestamp = r.integer(*coff, "timestamp", "header.coff.timestamp");
      s.header.coff_machine = r.text(*coff, "machine", "header.coff.machine");
      s.header.coff_characteristics =
          r.flag_tokens(*coff, "characteristics", "header.coff.characteristics");
    }
    if (const json* opt = r.object(*h, "optional", "header.optional")) {
      s.header.optional_subsystem = r.text(*opt, "subsystem", "header.optional.subsystem");
      s.header.optional_magic = r.text(*opt, "magic", "header.optional.magic");
      s.header.dll_characteristics =
          r.flag_tokens(*opt, "dll_characteristics", "header.optional.dll_characteristics");
    }
  }

  if (const json* sec = r.object(doc, "section", "section")) {
    s.section.entry = r.text(*sec, "entry", "section.entry");
    if (const json* list = r.child(*sec, "sections")) {
      if (!list->is_array()) r.fail(Kind::FieldTypeMismatch, "section.sections", "expected an array");
      for (std::size_t i = 0; i < list->size(); ++i) {
        const json& item = (*list)[i];
        std::string path = "section.sections[" + std::to_string(i) + "]";
        if (!item.is_object()) r.fail(Kind::FieldTypeMismatch, path, "expected an object");
        SectionEntry e;
        e.name = r.text(item, "name", path + ".name");
        e.size = r.count(item, "size", path + ".size");
        e.vsize = r.count(item, "vsize", path + ".vsize");
        e.entropy = r.entropy(item, path + ".entropy");
        e.props = r.flag_tokens(item, "props", path + ".props");
        s.section.sections.push_back(std::move(e));
      }
    }
  }

  if (const json* imp = r.object(doc, "imports", "imports")) {
    for (const auto& [dll, functions] : imp->items()) {
      auto& list = s.imports[dll];
      auto more = r.texts(functions, "imports." + dll);
      list.insert(list.end(), more.begin(), more.end());
    }
  }

  s.exports = r.texts(doc, "exports", "exports");

  if (const json* dirs = r.child(doc, "datadirectories")) {
    if (!dirs->is_array()) r.fail(Kind::FieldTypeMismatch, "datadirectories", "expected an array");
    for (std::size_t i = 0; i < dirs->size(); ++i) {
      const json& item = (*dirs)[i];
      std::string path = "datadirectories[" + std::to_string(i) + "]";
      if (!item.is_object()) r.fail(Kind::FieldTypeMismatch, path, "expected an object");
      DataDirectoryEntry d;
      d.name = r.text(item, "name", path + ".name");
      d.virtual_address = r.count(item, "virtual_address", path + ".virtual_address");
      if (r.child(item, "size")) d.size = r.count(item, "size", path + ".size");
      s.datadirectories.push_back(std::move(d));
    }
  }
  return s;
}

}  // namespace

bool SectionEntry::has_prop(std::string_view prop) const {
  return std::find(props.begin(), props.end(), prop) != props.end();
}

const SectionEntry* SectionTable::entry_section() const {
  if (entry.empty()) return nullptr;
  auto it = std::find_if(sections.begin(), sections.end(),
                         [&](const SectionEntry& s) { return s.name == entry; });
  return it == sections.end() ? nullptr : &*it;
}

RawSample parse_sample(std::string_view line, std::size_t line_number,
                       ParseDiagnostics* diagnostics) {
  json doc = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded())
    throw IngestError(Kind::MalformedJson, line_number, "", "not a valid JSON document");
  return from_json(doc, line_number, diagnostics);
}

std::string to_canonical_json(const RawSample& s) {
  json doc;
  doc["sha256"] = s.sha256;
  if (s.md5) doc["md5"] = *s.md5;
  if (s.appeared) doc["appeared"] = *s.appeared;
  if (s.avclass) doc["avclass"] = *s.avclass;
  doc["label"] = s.label;

  const auto& g = s.general;
  doc["general"] = {{"size", g.size},
                    {"vsize", g.vsize},
                    {"has_debug", g.has_debug ? 1 : 0},
                    {"has_relocations", g.has_relocations ? 1 : 0},
                    {"has_resources", g.has_resources ? 1 : 0},
                    {"has_signature", g.has_signature ? 1 : 0},
                    {"has_tls", g.has_tls ? 1 : 0},
                    {"exports", g.exports},
                    {"imports", g.imports},
                    {"symbols", g.symbols}};

  const auto& st = s.strings;
  doc["strings"] = {{"numstrings", st.numstrings}, {"printables", st.printables},
                    {"avlength", st.avlength},     {"entropy", st.entropy},
                    {"paths", st.paths},           {"urls", st.urls},
                    {"registry", st.registry},     {"MZ", st.mz}};

  doc["header"] = {
      {"coff",
       {{"timestamp", s.header.coff_timestamp},
        {"machine", s.header.coff_machine},
        {"characteristics", s.header.coff_characteristics}}},
      {"optional",
       {{"subsystem", s.header.optional_subsystem},
        {"magic", s.header.optional_magic},
        {"dll_characteristics", s.header.dll_characteristics}}}};

  json sections = json::array();
  for (const auto& e : s.section.sections) {
    sections.push_back({{"name", e.name},
                        {"size", e.size},
                        {"vsize", e.vsize},
                        {"entropy", e.entropy},
                        {"props", e.props}});
  }
  doc["section"] = {{"entry", s.section.entry}, {"sections", std::move(sections)}};

  json imports = json::object();
  for (const auto& [dll, functions] : s.imports) imports[dll] = functions;
  doc["imports"] = std::move(imports);
  doc["exports"] = s.exports;

  json dirs = json::array();
  for (const auto& d : s.datadirectories) {
    json item = {{"name", d.name}, {"virtual_address", d.virtual_address}};
    if (d.size) item["size"] = *d.size;
    dirs.push_back(std::move(item));
  }
  doc["datadirectories"] = std::move(dirs);
  return doc.dump();
}

std::string IngestReport::to_json() const {
  return json{{"ok", ok}, {"skipped", skipped}}.dump();
}

SampleStream::SampleStream(const std::filesystem::path& path) : path_(path), in_(path) {
  if (!in_) throw IoError(path.string(), "cannot open for reading");
}

std::optional<std::pair<std::size_t, std::string>> SampleStream::next_line() {
  std::string line;
  if (!std::getline(in_, line)) {
    if (in_.bad()) throw IoError(path_.string(), "read failed");
    return std::nullopt;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return std::pair{++line_no_, std::move(line)};
}

std::optional<SampleStream::Record> SampleStream::next() {
  auto raw = next_line();
  if (!raw) return std::nullopt;
  return parse_record(raw->first, std::move(raw->second));
}

SampleStream::Record SampleStream::parse_record(std::size_t index, std::string line) {
  ParseDiagnostics diag;
  Record rec = parse_line(index, std::move(line), &diag);
  account(rec, diag);
  return rec;
}

void SampleStream::account(const Record& record, const ParseDiagnostics& diagnostics) {
  if (record.ok())
    ++report_.ok;
  else
    ++report_.skipped;
  report_.clamped_entropies += diagnostics.clamped_entropies;
}

SampleStream::Record parse_line(std::size_t index, std::string line,
                                ParseDiagnostics* diagnostics) {
  try {
    RawSample s = parse_sample(line, index, diagnostics);
    return {index, std::move(line), std::move(s)};
  } catch (const IngestError& e) {
    return {index, std::move(line), e};
  }
}

}  // namespace peo
