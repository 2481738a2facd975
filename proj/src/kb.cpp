#include "peo/kb.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <thread>

#include "json.hpp"
#include "peo/error.hpp"

namespace peo {

std::optional<std::size_t> FileDataValues::index_of(std::string_view property) {
  for (std::size_t i = 0; i < kFileDataProperties.size(); ++i)
    if (kFileDataProperties[i] == property) return i;
  return std::nullopt;
}

std::uint64_t FileDataValues::get(std::string_view property) const {
  auto i = index_of(property);
  if (!i) throw Error("unknown file data property " + std::string(property));
  return values[*i];
}

void FileDataValues::set(std::string_view property, std::uint64_t value) {
  auto i = index_of(property);
  if (!i) throw Error("unknown file data property " + std::string(property));
  values[*i] = value;
}

const PEFileIndividual* KnowledgeBase::find(std::string_view iri) const {
  auto it = std::lower_bound(files.begin(), files.end(), iri,
                             [](const PEFileIndividual& f, std::string_view key) { return f.iri < key; });
  return it != files.end() && it->iri == iri ? &*it : nullptr;
}

std::size_t KnowledgeBase::section_count() const {
  std::size_t n = 0;
  for (const auto& f : files) n += f.sections.size();
  return n;
}

BuildStats& BuildStats::operator+=(const BuildStats& o) {
  parsed += o.parsed;
  skipped += o.skipped;
  duplicates += o.duplicates;
  clamped_entropies += o.clamped_entropies;
  mapping += o.mapping;
  derivation.entry_point_unresolved += o.derivation.entry_point_unresolved;
  return *this;
}

std::string BuildStats::to_json() const {
  nlohmann::ordered_json j;
  j["parsed"] = parsed;
  j["skipped"] = skipped;
  j["duplicates"] = duplicates;
  j["unmapped_imports"] = mapping.unmapped_functions;
  j["mapped_imports"] = mapping.mapped_functions;
  j["entry_point_unresolved"] = derivation.entry_point_unresolved;
  j["clamped_entropies"] = clamped_entropies;
  return j.dump();
}

std::string file_iri(const Namespace& ns, std::string_view sha256) { return ns.iri(sha256); }

std::string section_iri(std::string_view file_iri, std::size_t index) {
  return std::string(file_iri) + "_section_" + std::to_string(index);
}

PEFileIndividual build_individual(const RawSample& s, const BuildContext& ctx, BuildStats* stats) {
  PEFileIndividual f;
  f.sha256 = s.sha256;
  f.iri = file_iri(ctx.ns, s.sha256);
  f.file_class = classify_file(s);
  f.label = s.label;
  f.avclass = s.avclass;

  f.data.set("exports_count", s.general.exports);
  f.data.set("imports_count", s.general.imports);
  f.data.set("mz_count", s.strings.mz);
  f.data.set("path_strings_count", s.strings.paths);
  f.data.set("registry_strings_count", s.strings.registry);
  f.data.set("symbols_count", s.general.symbols);
  f.data.set("url_strings_count", s.strings.urls);

  DerivationStats dstats;
  MappingStats mstats;
  f.features = derive_file_features(s, ctx.derivation, &dstats);
  f.actions = map_imports(s.imports, *ctx.action_map, &mstats);

  f.sections.reserve(s.section.sections.size());
  for (std::size_t i = 0; i < s.section.sections.size(); ++i) {
    SectionProfile p = profile_section(s.section.sections[i], ctx.derivation);
    f.sections.push_back(SectionIndividual{section_iri(f.iri, i), p.section_class, std::move(p.name),
                                           p.entropy, p.flags, p.features});
  }

  if (stats) {
    stats->mapping += mstats;
    stats->derivation.entry_point_unresolved += dstats.entry_point_unresolved;
  }
  return f;
}

KnowledgeBase build_kb(std::span<const RawSample> samples, const BuildContext& ctx, BuildStats* stats,
                       unsigned jobs) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(samples.size(), 1))));
  std::vector<PEFileIndividual> built(samples.size());
  std::vector<BuildStats> partial(jobs);
  auto work = [&](unsigned t) {
    for (std::size_t i = t; i < samples.size(); i += jobs) built[i] = build_individual(samples[i], ctx, &partial[t]);
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(work, t);
  }

  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return built[a].iri < built[b].iri; });

  KnowledgeBase kb;
  BuildStats total;
  for (const auto& p : partial) total += p;
  total.parsed = samples.size();
  kb.files.reserve(order.size());
  for (std::size_t i : order) {
    if (!kb.files.empty() && kb.files.back().iri == built[i].iri) {
      ++total.duplicates;
      continue;
    }
    kb.files.push_back(std::move(built[i]));
  }
  if (stats) *stats += total;
  return kb;
}

namespace {

std::optional<std::size_t> section_index(std::string_view iri) {
  constexpr std::string_view marker = "_section_";
  auto pos = iri.rfind(marker);
  if (pos == std::string_view::npos) return std::nullopt;
  std::string_view digits = iri.substr(pos + marker.size());
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) return std::nullopt;
  return value;
}

std::uint64_t parse_u64(const Term& t) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.value.data(), t.value.data() + t.value.size(), v);
  if (ec != std::errc() || ptr != t.value.data() + t.value.size())
    throw RdfSyntaxError(0, "expected a non-negative integer literal, got '" + t.value + "'");
  return v;
}

}  // namespace

KnowledgeBase kb_from_triples(const std::vector<Triple>& triples, const Vocabulary& v, const Namespace& ns) {
  const std::string rdf_type = std::string(kRdfNs) + "type";
  std::map<std::string, PEFileIndividual> files;
  std::map<std::string, SectionIndividual> sections;
  std::vector<std::pair<std::string, std::string>> has_section;

  auto local = [&](const Term& t) { return t.is_iri() ? ns.local_name(t.value) : std::string_view(); };
  auto prototype_class = [&](const Term& t) -> const std::string& {
    std::string_view name = local(t);
    const std::string* cls = v.class_of_prototype(name);
    if (!cls) throw UnknownPrototypeError(std::string(name.empty() ? std::string_view(t.value) : name));
    return *cls;
  };

  // First pass: types decide which subjects are files or sections.
  for (const Triple& t : triples) {
    if (t.predicate.value != rdf_type || !t.subject.is_iri()) continue;
    std::string_view cls = local(t.object);
    if (auto fc = file_class_from_name(cls)) {
      auto& f = files[t.subject.value];
      f.iri = t.subject.value;
      f.sha256 = std::string(ns.local_name(t.subject.value));
      f.file_class = *fc;
    } else if (auto sc = section_class_from_name(cls)) {
      auto& s = sections[t.subject.value];
      s.iri = t.subject.value;
      if (*sc != SectionClass::Section || s.section_class == SectionClass::Section) s.section_class = *sc;
    }
  }

  for (const Triple& t : triples) {
    if (!t.subject.is_iri() || t.predicate.value == rdf_type) continue;
    std::string_view pred = local(t.predicate);
    if (pred.empty()) continue;
    if (auto fit = files.find(t.subject.value); fit != files.end()) {
      PEFileIndividual& f = fit->second;
      if (FileDataValues::index_of(pred)) {
        f.data.set(pred, parse_u64(t.object));
      } else if (pred == "has_section") {
        has_section.emplace_back(f.iri, t.object.value);
      } else if (pred == "has_file_feature") {
        const std::string& cls = prototype_class(t.object);
        auto feature = file_feature_from_name(cls);
        if (!feature) throw UnknownPrototypeError(std::string(local(t.object)));
        f.features.insert(*feature);
      } else if (pred == "has_action") {
        const std::string& cls = prototype_class(t.object);
        const ClassInfo* info = v.find_class(cls);
        if (!info || info->kind != ClassKind::ActionLeaf) throw UnknownPrototypeError(std::string(local(t.object)));
        f.actions.emplace(local(t.object));
      }
    } else if (auto sit = sections.find(t.subject.value); sit != sections.end()) {
      SectionIndividual& s = sit->second;
      if (pred == "section_name") {
        s.section_name = t.object.value;
      } else if (pred == "section_entropy") {
        const std::string& text = t.object.value;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), s.section_entropy);
        if (ec != std::errc() || ptr != text.data() + text.size())
          throw RdfSyntaxError(0, "expected a double literal, got '" + text + "'");
      } else if (pred == "has_section_flag") {
        auto flag = section_flag_from_name(prototype_class(t.object));
        if (!flag) throw UnknownPrototypeError(std::string(local(t.object)));
        s.flags.insert(*flag);
      } else if (pred == "has_section_feature") {
        auto feature = section_feature_from_name(prototype_class(t.object));
        if (!feature) throw UnknownPrototypeError(std::string(local(t.object)));
        s.features.insert(*feature);
      }
    }
  }

  std::map<std::string, std::vector<std::pair<std::size_t, std::string>>> owned;
  for (const auto& [file, sec] : has_section) {
    auto index = section_index(sec);
    owned[file].emplace_back(index.value_or(SIZE_MAX), sec);
  }
  KnowledgeBase kb;
  kb.files.reserve(files.size());
  for (auto& [iri, f] : files) {
    auto& list = owned[iri];
    std::sort(list.begin(), list.end());
    for (const auto& [index, sec] : list) {
      auto it = sections.find(sec);
      if (it == sections.end()) {
        SectionIndividual s;
        s.iri = sec;
        f.sections.push_back(std::move(s));
      } else {
        f.sections.push_back(it->second);
      }
    }
    kb.files.push_back(std::move(f));
  }
  return kb;
}

std::size_t apply_examples(KnowledgeBase& kb, std::string_view examples_json) {
  auto doc = nlohmann::json::parse(examples_json.begin(), examples_json.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error("examples document is not a JSON object");
  std::size_t found = 0;
  auto apply = [&](const char* key, int label) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_array()) throw Error(std::string("examples field '") + key + "' must be an array");
    for (const auto& item : doc[key]) {
      if (!item.is_string()) throw Error(std::string("examples field '") + key + "' must hold strings");
      const std::string iri = item.get<std::string>();
      auto it = std::lower_bound(kb.files.begin(), kb.files.end(), iri,
                                 [](const PEFileIndividual& f, const std::string& k) { return f.iri < k; });
      if (it != kb.files.end() && it->iri == iri) {
        it->label = label;
        ++found;
      }
    }
  };
  apply("positive", 1);
  apply("negative", 0);
  return found;
}

}  // namespace peo
