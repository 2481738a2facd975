#include <set>

#include "doctest.h"
#include "json.hpp"
#include "peo/kb.hpp"
#include "peo/rdf_emit.hpp"
#include "synthetic.hpp"

using namespace peo;

namespace {

const std::string kListingSha = "eb87d82ad7bdc1b753bf91858d2986063ebd8aabeb8e7e91c0c78db21982a0d6";

RawSample minimal(const std::string& sha, const std::string& extra = "") {
  return parse_sample(R"({"sha256":")" + sha + R"(","label":0)" + extra + "}");
}

std::vector<RawSample> parse_all(const std::vector<std::string>& lines) {
  std::vector<RawSample> out;
  for (const auto& l : lines) out.push_back(parse_sample(l));
  return out;
}

}  // namespace

TEST_SUITE("kb") {
  TEST_CASE("listing individual") {
    BuildContext ctx;
    BuildStats stats;
    PEFileIndividual f = build_individual(parse_sample(testing::fixture_line("listing1.jsonl")), ctx, &stats);
    CHECK(f.iri == "https://example.org/pe-malware-ontology#" + kListingSha);
    CHECK(f.file_class == FileClass::ExecutableFile);
    CHECK(f.data.get("imports_count") == 17);
    CHECK(f.data.get("url_strings_count") == 9);
    CHECK(f.data.get("mz_count") == 11);
    for (const char* zero : {"exports_count", "symbols_count", "path_strings_count", "registry_strings_count"})
      CHECK(f.data.get(zero) == 0);
    CHECK(f.features == FileFeatureSet{FileFeature::TLS, FileFeature::Relocations, FileFeature::Resources,
                                       FileFeature::NonstandardMZ, FileFeature::URLStrings});
    CHECK(f.actions == std::set<std::string>{"delay-execution"});
    REQUIRE(f.sections.size() == 1);
    CHECK(f.sections[0].iri == f.iri + "_section_0");
    CHECK(f.sections[0].section_class == SectionClass::CodeSection);
    CHECK(f.sections[0].section_name == "CODE");
    CHECK(f.sections[0].section_entropy == 6.532932639432919);
    CHECK(f.sections[0].flags == SectionFlagSet{SectionFlag::Executable, SectionFlag::Readable});
    CHECK(f.label == 1);
    CHECK(stats.mapping.unmapped_functions == 2);
  }

  TEST_CASE("minimal benign sample") {
    PEFileIndividual f = build_individual(minimal(std::string(64, 'b')), BuildContext{});
    CHECK(f.data == FileDataValues{});
    CHECK(f.features == FileFeatureSet{FileFeature::LowImportsCount, FileFeature::NonstandardMZ});
    CHECK(f.actions.empty());
    CHECK(f.sections.empty());
    CHECK(f.label == 0);
  }

  TEST_CASE("DLL exporting three functions") {
    auto s = minimal(std::string(64, 'c'),
                     R"(,"general":{"exports":3},"exports":["a","b","c"],"header":{"coff":{"characteristics":["DLL","EXECUTABLE_IMAGE"]}})");
    PEFileIndividual f = build_individual(s, BuildContext{});
    CHECK(f.file_class == FileClass::DynamicLinkLibrary);
    CHECK(f.features.contains(FileFeature::Exports));
    CHECK(f.data.get("exports_count") == 3);
  }

  TEST_CASE("data values") {
    FileDataValues d;
    d.set("mz_count", 4);
    CHECK(d.get("mz_count") == 4);
    CHECK(FileDataValues::index_of("imports_count") == std::optional<std::size_t>(1));
    CHECK_FALSE(FileDataValues::index_of("section_entropy").has_value());
    CHECK_THROWS(d.get("nope"));
  }

  TEST_CASE("duplicates keep the first occurrence") {
    std::vector<RawSample> samples{minimal(std::string(64, 'e')), minimal(std::string(64, 'd')),
                                   minimal(std::string(64, 'e'))};
    samples[2].label = 1;
    BuildStats stats;
    KnowledgeBase kb = build_kb(samples, BuildContext{}, &stats);
    REQUIRE(kb.files.size() == 2);
    CHECK(stats.duplicates == 1);
    CHECK(kb.files[0].sha256 == std::string(64, 'd'));
    CHECK(kb.files[1].label == 0);
    CHECK(kb.find(kb.files[1].iri) == &kb.files[1]);
    CHECK(kb.find("nope") == nullptr);
  }

  TEST_CASE("corpus counts match the input") {
    testing::SyntheticOptions opts;
    opts.seed = 21;
    auto lines = testing::synthetic_corpus(1000, opts);
    std::size_t sections = 0;
    std::set<std::string> shas;
    for (const auto& l : lines) {
      auto j = nlohmann::json::parse(l);
      sections += j["section"]["sections"].size();
      shas.insert(j["sha256"].get<std::string>());
    }
    auto samples = parse_all(lines);
    BuildStats stats;
    KnowledgeBase kb = build_kb(samples, BuildContext{}, &stats);
    CHECK(kb.files.size() == shas.size());
    CHECK(kb.section_count() == sections);
    std::set<std::string> section_iris;
    for (std::size_t i = 0; i < kb.files.size(); ++i) {
      const auto& f = kb.files[i];
      if (i > 0) CHECK(kb.files[i - 1].iri < f.iri);
      CHECK(f.iri.ends_with(f.sha256));
      for (std::size_t k = 0; k < f.sections.size(); ++k) {
        CHECK(f.sections[k].iri == section_iri(f.iri, k));
        CHECK(section_iris.insert(f.sections[k].iri).second);
      }
      for (const auto& a : f.actions) CHECK(builtin_vocabulary().find_action(a) != nullptr);
    }
  }

  TEST_CASE("build does not depend on the number of jobs") {
    testing::SyntheticOptions opts;
    opts.seed = 22;
    auto samples = parse_all(testing::synthetic_corpus(500, opts));
    samples.push_back(samples[7]);
    BuildStats s1, s4;
    KnowledgeBase a = build_kb(samples, BuildContext{}, &s1, 1);
    KnowledgeBase b = build_kb(samples, BuildContext{}, &s4, 4);
    CHECK(a.files == b.files);
    CHECK(s1.to_json() == s4.to_json());
    CHECK(s1.duplicates == 1);
  }

  TEST_CASE("run report keys") {
    BuildStats s;
    s.parsed = 3;
    s.skipped = 1;
    auto j = nlohmann::json::parse(s.to_json());
    for (const char* k : {"parsed", "skipped", "duplicates", "unmapped_imports", "entry_point_unresolved"})
      CHECK(j.contains(k));
    CHECK(j["parsed"] == 3);
  }

  TEST_CASE("triples round-trip into the same individuals") {
    testing::SyntheticOptions opts;
    opts.seed = 23;
    auto samples = parse_all(testing::synthetic_corpus(200, opts));
    KnowledgeBase kb = build_kb(samples, BuildContext{});
    KnowledgeBase back = kb_from_triples(parse_turtle(emit_abox(kb, builtin_vocabulary())), builtin_vocabulary(), Namespace());
    REQUIRE(back.files.size() == kb.files.size());
    CHECK(apply_examples(back, emit_examples(kb)) == kb.files.size());
    for (std::size_t i = 0; i < kb.files.size(); ++i) {
      PEFileIndividual expected = kb.files[i];
      expected.avclass.reset();
      CHECK(back.files[i] == expected);
    }
  }

  TEST_CASE("unknown prototypes in triples are rejected") {
    Namespace ns;
    std::vector<Triple> t{
        {Term::iri(ns.iri(std::string(64, 'a'))), Term::iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"),
         Term::iri(ns.iri("ExecutableFile"))},
        {Term::iri(ns.iri(std::string(64, 'a'))), Term::iri(ns.iri("has_file_feature")), Term::iri(ns.iri("no_such"))}};
    CHECK_THROWS_AS(kb_from_triples(t, builtin_vocabulary(), ns), UnknownPrototypeError);
  }
}
