#include "peo/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "embedded_data.hpp"
#include "json.hpp"
#include "peo/error.hpp"
#include "peo/features.hpp"
#include "peo/rdf_reader.hpp"
#include "rdf_writer.hpp"

namespace peo {

namespace {

using nlohmann::json;

constexpr std::string_view kDerivedAs = "derived_as";
constexpr std::string_view kExtensionComment = "extension of the MAEC malware action vocabulary";

const std::pair<ClassKind, std::string_view> kKindNames[] = {
    {ClassKind::Root, "root"},
    {ClassKind::File, "file"},
    {ClassKind::Section, "section"},
    {ClassKind::FileFeature, "file-feature"},
    {ClassKind::SectionFeature, "section-feature"},
    {ClassKind::SectionFlag, "section-flag"},
    {ClassKind::ActionCategory, "action-category"},
    {ClassKind::ActionLeaf, "action-leaf"},
};

const std::set<std::string> kExtensionActions = {"send-http-request", "encrypt", "decrypt",
                                                 "generate-key"};

bool needs_prototype(ClassKind k) {
  return k == ClassKind::FileFeature || k == ClassKind::SectionFeature ||
         k == ClassKind::SectionFlag || k == ClassKind::ActionLeaf;
}

json parse_json(std::string_view text, const char* what) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) throw VocabularyError(std::string("VocabularyCorrupt: ") + what + " is not valid JSON");
  return doc;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string str_field(const json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    throw VocabularyError(std::string("VocabularyCorrupt: ") + what + " entry lacks string field '" +
                          key + "'");
  return it->get<std::string>();
}

}  // namespace

std::string_view to_string(ClassKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "root";
}

std::optional<ClassKind> class_kind_from_string(std::string_view s) {
  for (const auto& [k, name] : kKindNames)
    if (name == s) return k;
  return std::nullopt;
}

std::string snake_case(std::string_view name) {
  std::string out;
  for (std::size_t i = 0; i < name.size(); ++i) {
    auto c = static_cast<unsigned char>(name[i]);
    if (std::isupper(c) && i > 0) {
      auto prev = static_cast<unsigned char>(name[i - 1]);
      bool next_lower = i + 1 < name.size() && std::islower(static_cast<unsigned char>(name[i + 1]));
      if (std::islower(prev) || std::isdigit(prev) || (std::isupper(prev) && next_lower))
        out.push_back('_');
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::string action_class_name(std::string_view action_id) {
  std::string out;
  bool upper = true;
  for (char ch : action_id) {
    if (ch == '-') {
      upper = true;
      continue;
    }
    out.push_back(upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(ch))) : ch);
    upper = false;
  }
  return out;
}

void Vocabulary::reindex() {
  prototype_index_.clear();
  for (const auto& [cls, proto] : prototypes) prototype_index_.emplace(proto, cls);

  action_index_.clear();
  for (std::size_t i = 0; i < actions.size(); ++i) action_index_.emplace(actions[i].action_id, i);

  ancestors_.clear();
  for (const auto& [name, info] : classes) {
    std::vector<std::string> chain{name};
    std::set<std::string> seen{name};
    std::deque<std::string> queue(info.parents.begin(), info.parents.end());
    while (!queue.empty()) {
      std::string next = queue.front();
      queue.pop_front();
      if (!seen.insert(next).second) continue;
      chain.push_back(next);
      if (auto it = classes.find(next); it != classes.end())
        queue.insert(queue.end(), it->second.parents.begin(), it->second.parents.end());
    }
    ancestors_.emplace(name, std::move(chain));
  }
}

const ClassInfo* Vocabulary::find_class(std::string_view name) const {
  auto it = classes.find(std::string(name));
  return it == classes.end() ? nullptr : &it->second;
}

const ObjectProperty* Vocabulary::find_object_property(std::string_view name) const {
  auto it = std::find_if(object_properties.begin(), object_properties.end(),
                         [&](const ObjectProperty& p) { return p.name == name; });
  return it == object_properties.end() ? nullptr : &*it;
}

const DataProperty* Vocabulary::find_data_property(std::string_view name) const {
  auto it = std::find_if(data_properties.begin(), data_properties.end(),
                         [&](const DataProperty& p) { return p.name == name; });
  return it == data_properties.end() ? nullptr : &*it;
}

const ActionCatalogEntry* Vocabulary::find_action(std::string_view action_id) const {
  auto it = action_index_.find(action_id);
  return it == action_index_.end() ? nullptr : &actions[it->second];
}

const std::string* Vocabulary::class_of_prototype(std::string_view prototype) const {
  auto it = prototype_index_.find(prototype);
  return it == prototype_index_.end() ? nullptr : &it->second;
}

const std::string& Vocabulary::prototype_of(std::string_view class_name) const {
  auto it = prototypes.find(std::string(class_name));
  if (it == prototypes.end()) throw UnknownPrototypeError(std::string(class_name));
  return it->second;
}

bool Vocabulary::is_subclass_of(std::string_view sub, std::string_view super) const {
  const auto& chain = ancestors(sub);
  return std::find(chain.begin(), chain.end(), super) != chain.end();
}

const std::vector<std::string>& Vocabulary::ancestors(std::string_view name) const {
  static const std::vector<std::string> kEmpty;
  auto it = ancestors_.find(name);
  return it == ancestors_.end() ? kEmpty : it->second;
}

std::size_t Vocabulary::count_kind(ClassKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      classes.begin(), classes.end(), [&](const auto& kv) { return kv.second.kind == kind; }));
}

std::optional<std::string> Vocabulary::derived_expression(std::string_view class_name,
                                                          const DerivationConfig& cfg) const {
  auto it = derived_annotations.find(std::string(class_name));
  if (it == derived_annotations.end()) return std::nullopt;
  return render_derived_expression(it->second, cfg);
}

Vocabulary parse_vocabulary(std::string_view classes_json, std::string_view actions_json,
                            std::string_view properties_json) {
  Vocabulary v;

  json cls = parse_json(classes_json, "classes.json");
  if (!cls.contains("classes") || !cls["classes"].is_array())
    throw VocabularyError("VocabularyCorrupt: classes.json lacks a 'classes' array");
  for (const auto& c : cls["classes"]) {
    ClassInfo info;
    info.name = str_field(c, "name", "classes.json");
    auto kind = class_kind_from_string(str_field(c, "kind", "classes.json"));
    if (!kind) throw VocabularyError("VocabularyCorrupt: class " + info.name + " has an unknown kind");
    info.kind = *kind;
    if (c.contains("parent")) info.parents.push_back(str_field(c, "parent", "classes.json"));
    if (c.contains("parents"))
      for (const auto& p : c["parents"]) info.parents.push_back(p.get<std::string>());
    if (c.contains("prototype"))
      v.prototypes[info.name] = str_field(c, "prototype", "classes.json");
    else if (needs_prototype(info.kind))
      v.prototypes[info.name] = snake_case(info.name);
    if (c.contains("derived_as"))
      v.derived_annotations[info.name] = str_field(c, "derived_as", "classes.json");
    if (!v.classes.emplace(info.name, info).second)
      throw VocabularyError("VocabularyCorrupt: class " + info.name + " declared twice");
  }

  json act = parse_json(actions_json, "actions.json");
  if (!act.contains("actions") || !act["actions"].is_array())
    throw VocabularyError("VocabularyCorrupt: actions.json lacks an 'actions' array");
  for (const auto& a : act["actions"]) {
    ActionCatalogEntry e;
    e.action_id = str_field(a, "id", "actions.json");
    e.category = str_field(a, "category", "actions.json");
    e.leaf_class = a.contains("class") ? str_field(a, "class", "actions.json")
                                       : action_class_name(e.action_id);
    std::string origin = a.contains("origin") ? str_field(a, "origin", "actions.json") : "maec";
    if (origin != "maec" && origin != "extension")
      throw VocabularyError("VocabularyCorrupt: action " + e.action_id + " has an unknown origin");
    e.origin = origin == "extension" ? ActionOrigin::Extension : ActionOrigin::Maec;
    if (!v.classes.emplace(e.leaf_class, ClassInfo{e.leaf_class, {e.category}, ClassKind::ActionLeaf})
             .second)
      throw VocabularyError("VocabularyCorrupt: class " + e.leaf_class + " declared twice");
    v.prototypes[e.leaf_class] = e.action_id;
    v.actions.push_back(std::move(e));
  }

  json props = parse_json(properties_json, "properties.json");
  for (const auto& p : props.value("object_properties", json::array()))
    v.object_properties.push_back({str_field(p, "name", "properties.json"),
                                   str_field(p, "domain", "properties.json"),
                                   str_field(p, "range", "properties.json")});
  for (const auto& p : props.value("data_properties", json::array()))
    v.data_properties.push_back({str_field(p, "name", "properties.json"),
                                 str_field(p, "domain", "properties.json"),
                                 str_field(p, "range", "properties.json")});
  for (const auto& p : props.value("annotation_properties", json::array()))
    v.annotation_properties.push_back(p.get<std::string>());

  v.reindex();
  return v;
}

Vocabulary load_vocabulary(const std::filesystem::path& dir) {
  Vocabulary v = parse_vocabulary(read_file(dir / "classes.json"), read_file(dir / "actions.json"),
                                  read_file(dir / "properties.json"));
  auto problems = validate_vocabulary(v);
  if (!problems.empty())
    throw VocabularyError("VocabularyCorrupt: " + problems.front() + " (" +
                          std::to_string(problems.size()) + " problem(s))");
  return v;
}

const Vocabulary& builtin_vocabulary() {
  static const Vocabulary vocab = [] {
    Vocabulary v = parse_vocabulary(embedded::classes_json(), embedded::actions_json(),
                                    embedded::properties_json());
    auto problems = validate_vocabulary(v);
    if (!problems.empty()) throw VocabularyError("VocabularyCorrupt: " + problems.front());
    return v;
  }();
  return vocab;
}

std::vector<std::string> validate_vocabulary(const Vocabulary& v, const VocabularyShape& shape) {
  std::vector<std::string> out;
  auto report = [&](std::string msg) { out.push_back(std::move(msg)); };

  auto check_count = [&](ClassKind kind, std::size_t expected, std::string_view label) {
    std::size_t n = v.count_kind(kind);
    if (n != expected)
      report(std::string(label) + ": expected " + std::to_string(expected) + " classes, found " +
             std::to_string(n));
  };
  check_count(ClassKind::FileFeature, shape.file_features, "file features");
  check_count(ClassKind::SectionFeature, shape.section_features, "section features");
  check_count(ClassKind::SectionFlag, shape.section_flags, "section flags");
  check_count(ClassKind::ActionCategory, shape.action_categories, "action categories");
  check_count(ClassKind::ActionLeaf, shape.action_leaves, "action leaves");

  const std::pair<std::string_view, ClassKind> required[] = {
      {"PEFile", ClassKind::File},          {"ExecutableFile", ClassKind::File},
      {"DynamicLinkLibrary", ClassKind::File}, {"Section", ClassKind::Section},
      {"CodeSection", ClassKind::Section},  {"InitializedDataSection", ClassKind::Section},
      {"UninitializedDataSection", ClassKind::Section}, {"FileFeature", ClassKind::Root},
      {"SectionFeature", ClassKind::Root},  {"SectionFlag", ClassKind::Root},
      {"Action", ClassKind::Root},
  };
  for (const auto& [name, kind] : required) {
    const ClassInfo* c = v.find_class(name);
    if (!c)
      report("missing class " + std::string(name));
    else if (c->kind != kind)
      report("class " + std::string(name) + " should have kind " + std::string(to_string(kind)));
  }
  auto require_kind = [&](std::string_view name, ClassKind kind) {
    const ClassInfo* c = v.find_class(name);
    if (!c)
      report("missing class " + std::string(name));
    else if (c->kind != kind)
      report("class " + std::string(name) + " should have kind " + std::string(to_string(kind)));
  };
  for (FileFeature f : all_file_features()) require_kind(class_name(f), ClassKind::FileFeature);
  for (SectionFeature f : all_section_features()) require_kind(class_name(f), ClassKind::SectionFeature);
  for (SectionFlag f : all_section_flags()) require_kind(class_name(f), ClassKind::SectionFlag);

  // Tree shape: single parent, known parents, kind-specific placement, no cycles.
  for (const auto& [name, c] : v.classes) {
    if (c.parents.size() > 1) {
      report("class " + name + " has more than one parent");
      continue;
    }
    const ClassInfo* parent = c.parents.empty() ? nullptr : v.find_class(c.parents.front());
    if (!c.parents.empty() && !parent) {
      report("class " + name + " has unknown parent " + c.parents.front());
      continue;
    }
    auto expect_parent = [&](std::string_view want) {
      if (!parent || parent->name != want)
        report("class " + name + " must be a direct subclass of " + std::string(want));
    };
    switch (c.kind) {
      case ClassKind::Root:
        if (parent) report("root class " + name + " must not have a parent");
        break;
      case ClassKind::File:
      case ClassKind::Section: {
        std::string_view top = c.kind == ClassKind::File ? "PEFile" : "Section";
        if (name == top) {
          if (parent) report("class " + name + " must not have a parent");
        } else {
          expect_parent(top);
        }
        break;
      }
      case ClassKind::FileFeature:
        expect_parent("FileFeature");
        break;
      case ClassKind::SectionFeature:
        expect_parent("SectionFeature");
        break;
      case ClassKind::SectionFlag:
        expect_parent("SectionFlag");
        break;
      case ClassKind::ActionCategory:
        expect_parent("Action");
        break;
      case ClassKind::ActionLeaf:
        if (!parent || parent->kind != ClassKind::ActionCategory)
          report("action leaf " + name + " must have exactly one action-category parent");
        break;
    }
    const ClassInfo* walk = parent;
    for (std::size_t steps = 0; walk && steps <= v.classes.size(); ++steps) {
      if (walk->name == name) {
        report("class " + name + " is in a cycle");
        break;
      }
      walk = walk->parents.empty() ? nullptr : v.find_class(walk->parents.front());
    }
  }

  // Prototypes.
  std::set<std::string> seen_protos;
  for (const auto& [name, c] : v.classes) {
    auto it = v.prototypes.find(name);
    if (needs_prototype(c.kind) && it == v.prototypes.end())
      report("class " + name + " has no prototypical instance");
    if (!needs_prototype(c.kind) && it != v.prototypes.end())
      report("class " + name + " must not have a prototypical instance");
  }
  for (const auto& [cls, proto] : v.prototypes) {
    if (!v.find_class(cls)) report("prototype " + proto + " refers to unknown class " + cls);
    if (!seen_protos.insert(proto).second) report("prototype name " + proto + " is used twice");
  }

  // derived_as annotations.
  std::set<std::string> derived;
  for (FileFeature f : all_file_features())
    if (is_derived(f)) derived.emplace(class_name(f));
  for (SectionFeature f : all_section_features()) derived.emplace(class_name(f));
  for (const auto& name : derived)
    if (!v.derived_annotations.count(name)) report("derived feature " + name + " lacks a derived_as annotation");
  for (const auto& [name, text] : v.derived_annotations) {
    if (!derived.count(name)) report("class " + name + " is not a derived feature but has derived_as");
    if (text.empty()) report("derived_as annotation of " + name + " is empty");
  }

  // Properties.
  const ObjectProperty expected_obj[] = {
      {"has_action", "PEFile", "Action"},
      {"has_file_feature", "PEFile", "FileFeature"},
      {"has_section", "PEFile", "Section"},
      {"has_section_feature", "Section", "SectionFeature"},
      {"has_section_flag", "Section", "SectionFlag"},
  };
  for (const auto& p : expected_obj) {
    const ObjectProperty* got = v.find_object_property(p.name);
    if (!got)
      report("missing object property " + p.name);
    else if (!(*got == p))
      report("object property " + p.name + " should map " + p.domain + " -> " + p.range);
  }
  if (v.data_properties.size() != shape.data_properties)
    report("data properties: expected " + std::to_string(shape.data_properties) + ", found " +
           std::to_string(v.data_properties.size()));
  const DataProperty expected_data[] = {
      {"exports_count", "PEFile", "xsd:integer"},
      {"imports_count", "PEFile", "xsd:integer"},
      {"mz_count", "PEFile", "xsd:integer"},
      {"path_strings_count", "PEFile", "xsd:integer"},
      {"symbols_count", "PEFile", "xsd:integer"},
      {"registry_strings_count", "PEFile", "xsd:integer"},
      {"url_strings_count", "PEFile", "xsd:integer"},
      {"section_entropy", "Section", "xsd:double"},
      {"section_name", "Section", "xsd:string"},
  };
  for (const auto& p : expected_data) {
    const DataProperty* got = v.find_data_property(p.name);
    if (!got)
      report("missing data property " + p.name);
    else if (!(*got == p))
      report("data property " + p.name + " should map " + p.domain + " -> " + p.range);
  }
  if (std::find(v.annotation_properties.begin(), v.annotation_properties.end(), kDerivedAs) ==
      v.annotation_properties.end())
    report("missing annotation property derived_as");

  // Action catalog.
  std::set<std::string> ids;
  std::set<std::string> extensions;
  for (const auto& a : v.actions) {
    if (!ids.insert(a.action_id).second) report("action id " + a.action_id + " is listed twice");
    if (a.origin == ActionOrigin::Extension) extensions.insert(a.action_id);
    const ClassInfo* leaf = v.find_class(a.leaf_class);
    if (!leaf || leaf->kind != ClassKind::ActionLeaf) {
      report("action " + a.action_id + " refers to missing leaf class " + a.leaf_class);
      continue;
    }
    const ClassInfo* parent = leaf->parents.empty() ? nullptr : v.find_class(leaf->parents.front());
    if (parent && parent->kind == ClassKind::ActionCategory && parent->name != a.category)
      report("action " + a.action_id + " is cataloged under " + a.category + " but its class is under " +
             parent->name);
    auto proto = v.prototypes.find(a.leaf_class);
    if (proto != v.prototypes.end() && proto->second != a.action_id)
      report("prototype of " + a.leaf_class + " should be " + a.action_id);
  }
  for (const auto& [name, c] : v.classes) {
    if (c.kind != ClassKind::ActionLeaf) continue;
    bool cataloged = std::any_of(v.actions.begin(), v.actions.end(),
                                 [&](const ActionCatalogEntry& a) { return a.leaf_class == name; });
    if (!cataloged) report("action leaf " + name + " has no catalog entry");
  }
  if (extensions != kExtensionActions)
    report("extension actions must be exactly send-http-request, encrypt, decrypt, generate-key");

  // Names must be usable as local names and must not collide.
  std::set<std::string> names;
  auto claim = [&](const std::string& n, std::string_view what) {
    if (!is_plain_local_name(n)) report(std::string(what) + " name '" + n + "' is not a valid local name");
    if (!names.insert(n).second) report("name " + n + " is used by more than one term");
  };
  for (const auto& [name, c] : v.classes) claim(name, "class");
  for (const auto& p : v.object_properties) claim(p.name, "object property");
  for (const auto& p : v.data_properties) claim(p.name, "data property");
  for (const auto& p : v.annotation_properties) claim(p, "annotation property");
  for (const auto& proto : seen_protos) claim(proto, "prototype");

  return out;
}

std::string export_tbox(const Vocabulary& v, const TboxOptions& options) {
  auto problems = validate_vocabulary(v);
  if (!problems.empty()) throw VocabularyError("InvalidVocabulary: " + problems.front());

  using detail::RdfNode;
  using detail::SubjectBlock;
  const Namespace& ns = options.ns;
  const std::string type = std::string(kRdfNs) + "type";
  const std::string sub_class_of = std::string(kRdfsNs) + "subClassOf";
  const std::string domain = std::string(kRdfsNs) + "domain";
  const std::string range = std::string(kRdfsNs) + "range";
  const std::string comment = std::string(kRdfsNs) + "comment";
  auto owl = [](std::string_view local) { return RdfNode::iri(std::string(kOwlNs) + std::string(local)); };
  auto term = [&](std::string_view local) { return RdfNode::iri(ns.iri(local)); };
  auto xsd_iri = [](std::string_view prefixed) {
    auto local = prefixed.substr(prefixed.find(':') + 1);
    return RdfNode::iri(std::string(kXsdNs) + std::string(local));
  };

  std::vector<SubjectBlock> blocks;
  for (const auto& [name, c] : v.classes) {
    SubjectBlock b{ns.iri(name), {}};
    b.add(type, owl("Class"));
    for (const auto& p : c.parents) b.add(sub_class_of, term(p));
    if (auto expr = v.derived_expression(name, options.derivation))
      b.add(ns.iri(kDerivedAs), RdfNode::string(*expr));
    blocks.push_back(std::move(b));
  }
  for (const auto& a : v.actions) {
    if (a.origin != ActionOrigin::Extension) continue;
    auto it = std::find_if(blocks.begin(), blocks.end(),
                           [&](const SubjectBlock& b) { return b.subject == ns.iri(a.leaf_class); });
    it->add(comment, RdfNode::string(std::string(kExtensionComment)));
  }
  for (const auto& p : v.object_properties) {
    SubjectBlock b{ns.iri(p.name), {}};
    b.add(type, owl("ObjectProperty"));
    b.add(domain, term(p.domain));
    b.add(range, term(p.range));
    blocks.push_back(std::move(b));
  }
  for (const auto& p : v.data_properties) {
    SubjectBlock b{ns.iri(p.name), {}};
    b.add(type, owl("DatatypeProperty"));
    b.add(domain, term(p.domain));
    b.add(range, xsd_iri(p.range));
    blocks.push_back(std::move(b));
  }
  for (const auto& p : v.annotation_properties) {
    SubjectBlock b{ns.iri(p), {}};
    b.add(type, owl("AnnotationProperty"));
    blocks.push_back(std::move(b));
  }
  for (const auto& [cls, proto] : v.prototypes) {
    SubjectBlock b{ns.iri(proto), {}};
    b.add(type, owl("NamedIndividual"));
    b.add(type, term(cls));
    blocks.push_back(std::move(b));
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const SubjectBlock& a, const SubjectBlock& b) { return a.subject < b.subject; });

  auto prefixes = detail::standard_prefixes(ns.prefix_iri());
  std::string out = prefixes.header();
  SubjectBlock header{ns.ontology_iri(), {}};
  header.add(type, owl("Ontology"));
  out += detail::render_turtle(header, prefixes);
  for (const auto& b : blocks) out += detail::render_turtle(b, prefixes);
  return out;
}

Vocabulary import_tbox(std::string_view turtle, const Namespace& ns) {
  const std::string type = std::string(kRdfNs) + "type";
  const std::string owl_class = std::string(kOwlNs) + "Class";
  const std::string named_individual = std::string(kOwlNs) + "NamedIndividual";

  struct Subject {
    std::vector<std::string> types;
    std::vector<std::string> parents;
    std::string domain, range, derived, comment;
  };
  std::map<std::string, Subject> subjects;
  for (const Triple& t : parse_turtle(turtle)) {
    if (!t.subject.is_iri()) continue;
    auto local = ns.local_name(t.subject.value);
    if (local.empty()) continue;
    Subject& s = subjects[std::string(local)];
    const std::string& p = t.predicate.value;
    if (p == type)
      s.types.push_back(t.object.value);
    else if (p == std::string(kRdfsNs) + "subClassOf")
      s.parents.emplace_back(ns.local_name(t.object.value));
    else if (p == std::string(kRdfsNs) + "domain")
      s.domain = std::string(ns.local_name(t.object.value));
    else if (p == std::string(kRdfsNs) + "range")
      s.range = t.object.value;
    else if (p == ns.iri(kDerivedAs))
      s.derived = t.object.value;
    else if (p == std::string(kRdfsNs) + "comment")
      s.comment = t.object.value;
  }

  auto has_type = [](const Subject& s, const std::string& iri) {
    return std::find(s.types.begin(), s.types.end(), iri) != s.types.end();
  };
  auto range_name = [&](const std::string& iri) {
    if (iri.rfind(kXsdNs, 0) == 0) return "xsd:" + iri.substr(kXsdNs.size());
    return std::string(ns.local_name(iri));
  };

  Vocabulary v;
  for (const auto& [name, s] : subjects) {
    if (has_type(s, owl_class)) {
      v.classes[name] = ClassInfo{name, s.parents, ClassKind::Root};
      if (!s.derived.empty()) v.derived_annotations[name] = s.derived;
    } else if (has_type(s, std::string(kOwlNs) + "ObjectProperty")) {
      v.object_properties.push_back({name, s.domain, range_name(s.range)});
    } else if (has_type(s, std::string(kOwlNs) + "DatatypeProperty")) {
      v.data_properties.push_back({name, s.domain, range_name(s.range)});
    } else if (has_type(s, std::string(kOwlNs) + "AnnotationProperty")) {
      v.annotation_properties.push_back(name);
    }
  }
  for (const auto& [name, s] : subjects) {
    if (!has_type(s, named_individual)) continue;
    for (const auto& t : s.types) {
      auto cls = ns.local_name(t);
      if (!cls.empty() && v.classes.count(std::string(cls))) v.prototypes[std::string(cls)] = name;
    }
  }
  v.reindex();

  auto kind_below = [&](const std::string& name) -> ClassKind {
    const auto& chain = v.ancestors(name);
    const std::string& top = chain.back();
    std::size_t depth = chain.size() - 1;
    if (top == "PEFile") return ClassKind::File;
    if (top == "Section") return ClassKind::Section;
    if (depth == 0) return ClassKind::Root;
    if (top == "FileFeature") return ClassKind::FileFeature;
    if (top == "SectionFeature") return ClassKind::SectionFeature;
    if (top == "SectionFlag") return ClassKind::SectionFlag;
    if (top == "Action") return depth == 1 ? ClassKind::ActionCategory : ClassKind::ActionLeaf;
    return ClassKind::Root;
  };
  for (auto& [name, c] : v.classes) c.kind = kind_below(name);
  for (const auto& [name, c] : v.classes) {
    if (c.kind != ClassKind::ActionLeaf) continue;
    ActionCatalogEntry e;
    e.leaf_class = name;
    e.category = c.parents.empty() ? std::string() : c.parents.front();
    auto proto = v.prototypes.find(name);
    e.action_id = proto == v.prototypes.end() ? std::string() : proto->second;
    e.origin = subjects[name].comment == kExtensionComment ? ActionOrigin::Extension : ActionOrigin::Maec;
    v.actions.push_back(std::move(e));
  }
  v.reindex();
  return v;
}

}  // namespace peo
