#include "rdf_writer.hpp"

#include <algorithm>
#include <map>

#include "peo/turtle.hpp"

namespace peo::detail {

namespace {

std::string rdf_type() { return std::string(kRdfNs) + "type"; }

std::string xsd(std::string_view local) { return std::string(kXsdNs) + std::string(local); }

std::string turtle_object(const RdfNode& n, const PrefixMap& prefixes) {
  switch (n.kind) {
    case RdfNode::Kind::Iri:
      return prefixes.compact(n.value);
    case RdfNode::Kind::Integer:
      return n.value;
    case RdfNode::Kind::Double:
      return "\"" + n.value + "\"^^xsd:double";
    case RdfNode::Kind::String:
      return "\"" + escape_literal(n.value) + "\"";
  }
  return {};
}

std::string nt_object(const RdfNode& n) {
  switch (n.kind) {
    case RdfNode::Kind::Iri:
      return "<" + n.value + ">";
    case RdfNode::Kind::Integer:
      return "\"" + n.value + "\"^^<" + xsd("integer") + ">";
    case RdfNode::Kind::Double:
      return "\"" + n.value + "\"^^<" + xsd("double") + ">";
    case RdfNode::Kind::String:
      return "\"" + escape_literal(n.value) + "\"";
  }
  return {};
}

}  // namespace

std::string PrefixMap::header() const {
  auto sorted = entries_;
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (const auto& [prefix, ns] : sorted) out += "@prefix " + prefix + ": <" + ns + "> .\n";
  out += "\n";
  return out;
}

std::string PrefixMap::compact(std::string_view iri) const {
  const std::pair<std::string, std::string>* best = nullptr;
  for (const auto& e : entries_) {
    if (iri.size() > e.second.size() && iri.substr(0, e.second.size()) == e.second &&
        (!best || e.second.size() > best->second.size()))
      best = &e;
  }
  if (best) {
    auto local = iri.substr(best->second.size());
    if (is_plain_local_name(local)) return best->first + ":" + std::string(local);
  }
  return "<" + std::string(iri) + ">";
}

PrefixMap standard_prefixes(std::string_view peo_namespace) {
  PrefixMap p;
  p.add("owl", std::string(kOwlNs));
  p.add("peo", std::string(peo_namespace));
  p.add("rdf", std::string(kRdfNs));
  p.add("rdfs", std::string(kRdfsNs));
  p.add("xsd", std::string(kXsdNs));
  return p;
}

std::string render_turtle(const SubjectBlock& block, const PrefixMap& prefixes) {
  const std::string type = rdf_type();
  std::vector<std::string> types;
  std::map<std::string, std::vector<std::string>> props;  // keyed by rendered predicate
  for (const auto& [pred, obj] : block.statements) {
    if (pred == type)
      types.push_back(turtle_object(obj, prefixes));
    else
      props[prefixes.compact(pred)].push_back(turtle_object(obj, prefixes));
  }
  auto join = [](std::vector<std::string>& objs) {
    std::sort(objs.begin(), objs.end());
    objs.erase(std::unique(objs.begin(), objs.end()), objs.end());
    std::string s;
    for (const auto& o : objs) {
      if (!s.empty()) s += ", ";
      s += o;
    }
    return s;
  };

  std::vector<std::string> lines;
  if (!types.empty()) lines.push_back("a " + join(types));
  for (auto& [pred, objs] : props) lines.push_back(pred + " " + join(objs));

  std::string out = prefixes.compact(block.subject);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += (i == 0 ? " " : "    ");
    out += lines[i];
    out += (i + 1 == lines.size()) ? " .\n" : " ;\n";
  }
  out += "\n";
  return out;
}

std::string render_ntriples(const SubjectBlock& block) {
  std::vector<std::string> lines;
  lines.reserve(block.statements.size());
  const std::string subject = "<" + block.subject + "> ";
  for (const auto& [pred, obj] : block.statements)
    lines.push_back(subject + "<" + pred + "> " + nt_object(obj) + " .\n");
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  std::string out;
  for (const auto& l : lines) out += l;
  return out;
}

}  // namespace peo::detail
