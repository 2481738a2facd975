#include <algorithm>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "peo/error.hpp"
#include "peo/kb.hpp"
#include "peo/rdf_emit.hpp"
#include "peo/rdf_reader.hpp"
#include "synthetic.hpp"

using namespace peo;

namespace {

const std::string kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

KnowledgeBase corpus_kb(std::uint64_t seed, std::size_t n) {
  testing::SyntheticOptions opts;
  opts.seed = seed;
  opts.balanced = false;
  opts.unlabeled_share = 0.2;
  std::vector<RawSample> samples;
  for (const auto& l : testing::synthetic_corpus(n, opts)) samples.push_back(parse_sample(l));
  return build_kb(samples, BuildContext{});
}

KnowledgeBase listing_kb() {
  return build_kb(std::vector<RawSample>{parse_sample(testing::fixture_line("listing1.jsonl"))}, BuildContext{});
}

std::set<Triple> triple_set(const std::string& doc) {
  auto t = parse_turtle(doc);
  return {t.begin(), t.end()};
}

// Triple count recomputed from the KB: one type and seven data values per
// file, one type plus name and entropy per section, plus one per link, plus
// the two ontology header triples.
std::size_t expected_triples(const KnowledgeBase& kb, bool include_derived) {
  if (kb.files.empty()) return 0;
  std::size_t n = 2;
  for (const auto& f : kb.files) {
    n += 1 + 7 + f.sections.size() + f.actions.size();
    f.features.for_each([&](FileFeature x) { n += (include_derived || !is_derived(x)) ? 1 : 0; });
    for (const auto& s : f.sections) n += 3 + s.flags.size() + (include_derived ? s.features.size() : 0);
  }
  return n;
}

bool has_triple(const std::set<Triple>& ts, const std::string& s, const std::string& p, const std::string& o) {
  return std::any_of(ts.begin(), ts.end(), [&](const Triple& t) {
    return t.subject.value == s && t.predicate.value == p && t.object.value == o;
  });
}

}  // namespace

TEST_SUITE("rdf") {
  TEST_CASE("listing ABox") {
    Namespace ns;
    KnowledgeBase kb = listing_kb();
    std::string doc = emit_abox(kb, builtin_vocabulary());
    auto ts = triple_set(doc);
    const std::string& file = kb.files[0].iri;
    CHECK(has_triple(ts, file, kRdfType, ns.iri("ExecutableFile")));
    CHECK(has_triple(ts, file, ns.iri("has_file_feature"), ns.iri("tls")));
    CHECK(has_triple(ts, file, ns.iri("has_file_feature"), ns.iri("nonstandard_mz")));
    CHECK(has_triple(ts, file, ns.iri("has_action"), ns.iri("delay-execution")));
    CHECK(has_triple(ts, file, ns.iri("mz_count"), "11"));
    CHECK(has_triple(ts, file + "_section_0", ns.iri("section_entropy"), "6.532932639432919"));
    CHECK(has_triple(ts, file + "_section_0", ns.iri("section_name"), "CODE"));
    CHECK(ts.size() == expected_triples(kb, true));
    CHECK(doc.find("\"6.532932639432919\"^^xsd:double") != std::string::npos);
  }

  TEST_CASE("ignoring derived features keeps the underlying data") {
    Namespace ns;
    KnowledgeBase kb = listing_kb();
    AboxOptions opts;
    opts.include_derived = false;
    auto ts = triple_set(emit_abox(kb, builtin_vocabulary(), opts));
    const std::string& file = kb.files[0].iri;
    CHECK_FALSE(has_triple(ts, file, ns.iri("has_file_feature"), ns.iri("nonstandard_mz")));
    CHECK_FALSE(has_triple(ts, file, ns.iri("has_file_feature"), ns.iri("url_strings")));
    CHECK(has_triple(ts, file, ns.iri("has_file_feature"), ns.iri("tls")));
    CHECK(has_triple(ts, file, ns.iri("mz_count"), "11"));
    CHECK(ts.size() == expected_triples(kb, false));
  }

  TEST_CASE("triple counts follow the KB") {
    KnowledgeBase kb = corpus_kb(31, 300);
    for (bool derived : {true, false}) {
      AboxOptions opts;
      opts.include_derived = derived;
      CHECK(parse_turtle(emit_abox(kb, builtin_vocabulary(), opts)).size() == expected_triples(kb, derived));
    }
  }

  TEST_CASE("Turtle and N-Triples describe the same triples") {
    KnowledgeBase kb = corpus_kb(32, 200);
    AboxOptions nt;
    nt.format = RdfFormat::NTriples;
    std::string ntriples = emit_abox(kb, builtin_vocabulary(), nt);
    CHECK(triple_set(emit_abox(kb, builtin_vocabulary())) == triple_set(ntriples));
    CHECK(ntriples.find("@prefix") == std::string::npos);
  }

  TEST_CASE("output is deterministic") {
    KnowledgeBase kb = corpus_kb(33, 200);
    CHECK(emit_abox(kb, builtin_vocabulary()) == emit_abox(corpus_kb(33, 200), builtin_vocabulary()));
  }

  TEST_CASE("empty KB has only prefix declarations") {
    std::string doc = emit_abox(KnowledgeBase{}, builtin_vocabulary());
    CHECK(parse_turtle(doc).empty());
    std::size_t pos = 0;
    while (pos < doc.size()) {
      auto end = doc.find('\n', pos);
      std::string line = doc.substr(pos, end - pos);
      CHECK((line.empty() || line.starts_with("@prefix ")));
      pos = end + 1;
    }
  }

  TEST_CASE("ABox imports the schema ontology") {
    Namespace ns("urn:x:peo#");
    AboxOptions opts;
    opts.ns = ns;
    KnowledgeBase kb = listing_kb();
    kb.files[0].iri = ns.iri(kb.files[0].sha256);
    auto ts = triple_set(emit_abox(kb, builtin_vocabulary(), opts));
    CHECK(has_triple(ts, "urn:x:peo/abox", "http://www.w3.org/2002/07/owl#imports", "urn:x:peo"));
  }

  TEST_CASE("unknown prototypes are rejected") {
    KnowledgeBase kb = listing_kb();
    kb.files[0].actions.insert("no-such-action");
    CHECK_THROWS_AS(emit_abox(kb, builtin_vocabulary()), UnknownPrototypeError);
  }

  TEST_CASE("examples document") {
    KnowledgeBase kb = corpus_kb(34, 300);
    auto j = nlohmann::json::parse(emit_examples(kb));
    std::vector<std::string> pos, neg;
    for (const auto& f : kb.files) {
      if (f.label == 1) pos.push_back(f.iri);
      if (f.label == 0) neg.push_back(f.iri);
    }
    CHECK(j["positive"].get<std::vector<std::string>>() == pos);
    CHECK(j["negative"].get<std::vector<std::string>>() == neg);

    KnowledgeBase two = build_kb(std::vector<RawSample>{parse_sample(R"({"sha256":")" + std::string(64, 'a') + R"(","label":1})"),
                                                         parse_sample(R"({"sha256":")" + std::string(64, 'b') + R"(","label":0})")},
                                  BuildContext{});
    auto j2 = nlohmann::json::parse(emit_examples(two));
    CHECK(j2["positive"].size() == 1);
    CHECK(j2["negative"].size() == 1);
    for (auto& f : two.files) f.label = -1;
    CHECK(emit_examples(two) == render_examples({}, {}));
  }

  TEST_CASE("reader handles Turtle forms") {
    auto ts = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "ex:a a ex:B ; ex:p \"x\\\"y\"@en , 3 , 2.5 , true ;\n  ex:q _:b1 .\n"
        "<http://e/c> <http://e/p> \"\"\"multi\nline\"\"\"^^<http://www.w3.org/2001/XMLSchema#string> .\n");
    CHECK(ts.size() == 7);
    CHECK_THROWS_AS(parse_turtle("ex:a ex:b ex:c ."), RdfSyntaxError);
    CHECK_THROWS_AS(parse_turtle("<http://a> <http://b> ."), RdfSyntaxError);
  }
}
