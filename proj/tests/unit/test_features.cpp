#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "peo/features.hpp"
#include "synthetic.hpp"

using namespace peo;

namespace {

const std::string kSha(64, 'a');

RawSample sample(const std::string& body) { return parse_sample(R"({"sha256":")" + kSha + "\"" + body + "}"); }

SectionEntry section(std::string name, double entropy, std::vector<std::string> props) {
  SectionEntry e;
  e.name = std::move(name);
  e.entropy = entropy;
  e.props = std::move(props);
  return e;
}

std::set<std::string> names(FileFeatureSet s) {
  std::set<std::string> out;
  s.for_each([&](FileFeature f) { out.emplace(class_name(f)); });
  return out;
}

// Feature names computed straight from the JSON text, without RawSample.
std::set<std::string> oracle_file_features(const std::string& line, const DerivationConfig& cfg) {
  auto j = nlohmann::json::parse(line);
  std::set<std::string> out;
  auto g = j.value("general", nlohmann::json::object());
  auto st = j.value("strings", nlohmann::json::object());
  auto num = [](const nlohmann::json& o, const char* k) { return o.value(k, std::uint64_t{0}); };
  if (num(g, "has_debug") == 1) out.insert("Debug");
  if (num(g, "has_relocations") == 1) out.insert("Relocations");
  if (num(g, "has_resources") == 1) out.insert("Resources");
  if (num(g, "has_signature") == 1) out.insert("Signature");
  if (num(g, "has_tls") == 1) out.insert("TLS");
  for (const auto& d : j.value("datadirectories", nlohmann::json::array()))
    if (d.value("name", "") == cfg.clr_directory_name && d.value("virtual_address", std::uint64_t{0}) > 0)
      out.insert("CLR");
  auto sec = j.value("section", nlohmann::json::object());
  std::string entry = sec.value("entry", "");
  int executable_sections = 0;
  bool entry_found = false, entry_exec = false;
  for (const auto& s : sec.value("sections", nlohmann::json::array())) {
    auto props = s.value("props", std::vector<std::string>{});
    bool exec = std::find(props.begin(), props.end(), "MEM_EXECUTE") != props.end();
    if (exec) ++executable_sections;
    if (!entry_found && !entry.empty() && s.value("name", "") == entry) {
      entry_found = true;
      entry_exec = exec;
    }
  }
  if (entry_found && !entry_exec) out.insert("NonexecutableEntryPoint");
  if (num(g, "exports") > 0) out.insert("Exports");
  if (num(g, "imports") < cfg.imports_threshold) out.insert("LowImportsCount");
  if (executable_sections >= 2) out.insert("MultipleExecutableSections");
  if (num(st, "MZ") != 1) out.insert("NonstandardMZ");
  if (num(st, "paths") > 0) out.insert("PathStrings");
  if (num(st, "registry") > 0) out.insert("RegistryStrings");
  if (num(st, "urls") > 0) out.insert("URLStrings");
  if (num(g, "symbols") > 0) out.insert("Symbols");
  return out;
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("file classification follows the DLL characteristic") {
    CHECK(classify_file(sample(R"(,"header":{"coff":{"characteristics":["CHARA_32BIT_MACHINE","BYTES_REVERSED_LO","EXECUTABLE_IMAGE"]}})")) ==
          FileClass::ExecutableFile);
    CHECK(classify_file(sample(R"(,"header":{"coff":{"characteristics":["EXECUTABLE_IMAGE","DLL"]}})")) ==
          FileClass::DynamicLinkLibrary);
    CHECK(classify_file(sample("")) == FileClass::ExecutableFile);
  }

  TEST_CASE("section flags") {
    CHECK(derive_section_flags(section("CODE", 1, {"CNT_CODE", "MEM_EXECUTE", "MEM_READ"})) ==
          SectionFlagSet{SectionFlag::Executable, SectionFlag::Readable});
    CHECK(derive_section_flags(section("x", 1, {})).empty());
    CHECK(derive_section_flags(section("x", 1, {"MEM_WRITE", "MEM_EXECUTE"})) ==
          SectionFlagSet{SectionFlag::Writable, SectionFlag::Executable});
    CHECK(derive_section_flags(section("x", 1, {"MEM_SHARED", "MEM_DISCARDABLE"})) == SectionFlagSet{SectionFlag::Shareable});
  }

  TEST_CASE("section class precedence") {
    CHECK(classify_section(section("CODE", 1, {"CNT_CODE", "MEM_EXECUTE", "MEM_READ"})) == SectionClass::CodeSection);
    CHECK(classify_section(section("d", 1, {"CNT_INITIALIZED_DATA"})) == SectionClass::InitializedDataSection);
    CHECK(classify_section(section("d", 1, {"CNT_CODE", "CNT_INITIALIZED_DATA"})) == SectionClass::CodeSection);
    CHECK(classify_section(section("d", 1, {"CNT_INITIALIZED_DATA", "CNT_UNINITIALIZED_DATA"})) ==
          SectionClass::UninitializedDataSection);
    CHECK(classify_section(section("d", 1, {"MEM_READ"})) == SectionClass::Section);
  }

  TEST_CASE("section features") {
    DerivationConfig cfg;
    auto code = section("CODE", 6.532932639432919, {"CNT_CODE", "MEM_EXECUTE", "MEM_READ"});
    CHECK(derive_section_features(code, derive_section_flags(code), cfg).empty());
    auto evil = section(".evil", 7.5, {"MEM_WRITE", "MEM_EXECUTE"});
    CHECK(derive_section_features(evil, derive_section_flags(evil), cfg) ==
          SectionFeatureSet{SectionFeature::HighEntropy, SectionFeature::NonstandardSectionName,
                            SectionFeature::WriteExecuteSection});
    auto lower = section(".TEXT", 1.0, {});
    CHECK(derive_section_features(lower, {}, cfg) == SectionFeatureSet{SectionFeature::NonstandardSectionName});
    auto empty_name = section("", 1.0, {});
    CHECK(derive_section_features(empty_name, {}, cfg) == SectionFeatureSet{SectionFeature::NonstandardSectionName});
  }

  TEST_CASE("entropy and imports thresholds are strict") {
    DerivationConfig cfg;
    auto high = [&](double e) {
      auto s = section(".text", e, {});
      return derive_section_features(s, {}, cfg).contains(SectionFeature::HighEntropy);
    };
    CHECK_FALSE(high(6.999));
    CHECK_FALSE(high(7.0));
    CHECK(high(7.001));
    CHECK(high(std::nextafter(7.0, 8.0)));
    auto low = [&](int imports) {
      return derive_file_features(sample(R"(,"general":{"imports":)" + std::to_string(imports) + "}"), cfg)
          .contains(FileFeature::LowImportsCount);
    };
    CHECK(low(9));
    CHECK_FALSE(low(10));
  }

  TEST_CASE("listing sample features") {
    RawSample s = parse_sample(testing::fixture_line("listing1.jsonl"));
    CHECK(names(derive_file_features(s, {})) ==
          std::set<std::string>{"TLS", "Relocations", "Resources", "NonstandardMZ", "URLStrings"});
  }

  TEST_CASE("minimal sample") {
    CHECK(names(derive_file_features(sample(""), {})) == std::set<std::string>{"LowImportsCount", "NonstandardMZ"});
  }

  TEST_CASE("two executable sections") {
    auto s = sample(R"(,"section":{"entry":"a","sections":[{"name":"a","props":["MEM_EXECUTE"]},{"name":"b","props":["MEM_EXECUTE","MEM_READ"]}]})");
    CHECK(derive_file_features(s, {}).contains(FileFeature::MultipleExecutableSections));
  }

  TEST_CASE("entry point rules") {
    DerivationStats stats;
    auto nonexec = sample(R"(,"section":{"entry":"b","sections":[{"name":"a","props":["MEM_EXECUTE"]},{"name":"b","props":["MEM_READ"]}]})");
    CHECK(derive_file_features(nonexec, {}, &stats).contains(FileFeature::NonexecutableEntryPoint));
    CHECK(stats.entry_point_unresolved == 0);
    auto missing = sample(R"(,"section":{"entry":"zzz","sections":[{"name":"a","props":["MEM_READ"]}]})");
    CHECK_FALSE(derive_file_features(missing, {}, &stats).contains(FileFeature::NonexecutableEntryPoint));
    auto empty = sample(R"(,"section":{"entry":"","sections":[]})");
    CHECK_FALSE(derive_file_features(empty, {}, &stats).contains(FileFeature::NonexecutableEntryPoint));
    CHECK(stats.entry_point_unresolved == 2);
  }

  TEST_CASE("CLR needs a non-empty runtime directory") {
    CHECK_FALSE(derive_file_features(sample(R"(,"datadirectories":[{"name":"CLR_RUNTIME_HEADER","virtual_address":0}])"), {})
                    .contains(FileFeature::CLR));
    CHECK(derive_file_features(sample(R"(,"datadirectories":[{"name":"CLR_RUNTIME_HEADER","virtual_address":8192}])"), {})
              .contains(FileFeature::CLR));
  }

  TEST_CASE("derivation agrees with an independent reading of the JSON") {
    testing::SyntheticOptions opts;
    opts.seed = 5;
    DerivationConfig cfg;
    for (const auto& line : testing::synthetic_corpus(1000, opts)) {
      RawSample s = parse_sample(line);
      CHECK(names(derive_file_features(s, cfg)) == oracle_file_features(line, cfg));
      for (const auto& e : s.section.sections) {
        SectionProfile p = profile_section(e, cfg);
        CHECK(p.features.contains(SectionFeature::WriteExecuteSection) ==
              (p.flags.contains(SectionFlag::Writable) && p.flags.contains(SectionFlag::Executable)));
      }
    }
  }

  TEST_CASE("threshold monotonicity") {
    testing::SyntheticOptions opts;
    opts.seed = 6;
    auto corpus = testing::synthetic_corpus(300, opts);
    for (double lo : {5.0, 6.5, 7.0}) {
      DerivationConfig a, b;
      a.entropy_threshold = lo;
      b.entropy_threshold = lo + 0.5;
      a.imports_threshold = 5;
      b.imports_threshold = 15;
      for (const auto& line : corpus) {
        RawSample s = parse_sample(line);
        for (const auto& e : s.section.sections) {
          bool at_a = profile_section(e, a).features.contains(SectionFeature::HighEntropy);
          bool at_b = profile_section(e, b).features.contains(SectionFeature::HighEntropy);
          CHECK((at_a || !at_b));
        }
        bool low_a = derive_file_features(s, a).contains(FileFeature::LowImportsCount);
        bool low_b = derive_file_features(s, b).contains(FileFeature::LowImportsCount);
        CHECK((!low_a || low_b));
      }
    }
  }

  TEST_CASE("enum names round-trip") {
    for (FileFeature f : all_file_features()) CHECK(file_feature_from_name(class_name(f)) == f);
    for (SectionFeature f : all_section_features()) CHECK(section_feature_from_name(class_name(f)) == f);
    for (SectionFlag f : all_section_flags()) CHECK(section_flag_from_name(class_name(f)) == f);
    int derived = 0;
    for (FileFeature f : all_file_features()) derived += is_derived(f) ? 1 : 0;
    CHECK(derived == 8);
  }
}
