#include <set>

#include "doctest.h"
#include "json.hpp"
#include "peo/concept_query.hpp"
#include "peo/error.hpp"
#include "scenarios.hpp"

using namespace peo;
using K = ClassExpression::Kind;

namespace {

std::set<std::string> iris(const QueryModel& m, const IndividualSet& s) {
  auto v = m.members(s);
  return {v.begin(), v.end()};
}

QueryError::Kind query_error(std::string_view text, std::size_t* position = nullptr) {
  try {
    parse_expression(text);
  } catch (const QueryError& e) {
    if (position) *position = e.position();
    return e.kind();
  }
  FAIL("no QueryError for " << text);
  return QueryError::Kind::SyntaxError;
}

}  // namespace

TEST_SUITE("concept_query") {
  TEST_CASE("parse examples") {
    auto a = parse_expression("ExecutableFile and has_file_feature some {multiple_executable_sections}");
    REQUIRE(a.kind == K::And);
    CHECK(a.operands[0] == ClassExpression::atom("ExecutableFile"));
    CHECK(a.operands[1] ==
          ClassExpression::some("has_file_feature", ClassExpression::nominal({"multiple_executable_sections"})));

    auto b = parse_expression("imports_count some xsd:integer[< 10]");
    REQUIRE(b.kind == K::DataSome);
    CHECK(b.name == "imports_count");
    CHECK(b.range.datatype == "xsd:integer");
    CHECK(b.range.facet == Facet::Less);
    CHECK(b.range.facet_value == Literal{Literal::Type::Integer, "10"});

    auto c = parse_expression("has_section min 2 (has_section_flag some Executable)");
    REQUIRE(c.kind == K::ObjectMin);
    CHECK(c.cardinality == 2);
    CHECK(c.operands[0] == ClassExpression::some("has_section_flag", ClassExpression::atom("Executable")));

    CHECK(parse_expression("peo:TLS") == ClassExpression::atom("TLS"));
    CHECK(parse_expression("section_entropy some xsd:double[≥ 7.5]").range.facet == Facet::GreaterEqual);
    auto d = parse_expression("section_name some not {\".text\", \"CODE\"}");
    CHECK(d.range.kind == DataRange::Kind::Complement);
    CHECK(d.range.inner[0].values.size() == 2);
    CHECK(parse_expression("TLS or Debug and CLR").kind == K::Or);
  }

  TEST_CASE("equations parse") {
    for (const auto& text : {testing::kEq1, testing::kEq2, testing::kEq3}) {
      auto e = parse_expression(text);
      CHECK(e.kind == K::And);
      CHECK(parse_expression(to_string(e)) == e);
    }
  }

  TEST_CASE("parse errors") {
    std::size_t pos = 0;
    CHECK(query_error("has_action some", &pos) == QueryError::Kind::SyntaxError);
    CHECK(pos == 15);
    CHECK(query_error("(TLS") == QueryError::Kind::SyntaxError);
    CHECK(query_error("TLS TLS") == QueryError::Kind::SyntaxError);
    CHECK(query_error("has_section min 0 Section") == QueryError::Kind::SyntaxError);
    CHECK(query_error("NoSuchClass") == QueryError::Kind::UnknownName);
    CHECK(query_error("has_action some {no-such-action}") == QueryError::Kind::UnknownName);
    CHECK(query_error("no_such_property some Thing") == QueryError::Kind::UnknownName);
    CHECK(query_error("imports_count some xsd:decimal") == QueryError::Kind::UnknownName);
  }

  TEST_CASE("planted KB: each equation finds its file") {
    KnowledgeBase kb = testing::planted_kb();
    QueryModel m(kb);
    const std::string* eqs[] = {&testing::kEq1, &testing::kEq2, &testing::kEq3};
    for (int i = 0; i < 3; ++i) {
      auto e = parse_expression(*eqs[i]);
      CHECK(m.evaluate_files(e) == std::vector<std::string>{kb.files[static_cast<std::size_t>(i + 1)].iri});
      CHECK(iris(m, m.evaluate(e)) == testing::naive_evaluate(e, kb));
    }
  }

  TEST_CASE("spec evaluation examples") {
    KnowledgeBase kb = testing::planted_kb();
    // Eq. 1 with a single high-entropy section fails on cardinality.
    KnowledgeBase one;
    one.files.push_back(kb.files[4]);
    CHECK(QueryModel(one).evaluate_files(parse_expression(testing::kEq1)).empty());

    KnowledgeBase exe;
    for (int i : {1, 2, 3}) exe.files.push_back(kb.files[static_cast<std::size_t>(i)]);
    CHECK(QueryModel(exe).evaluate_files(parse_expression("not DynamicLinkLibrary")).size() == 3);
  }

  TEST_CASE("subclass closure") {
    KnowledgeBase kb = testing::random_kb(41, 60);
    QueryModel m(kb);
    auto action = m.evaluate(parse_expression("Action"));
    for (const auto& a : builtin_vocabulary().actions) {
      auto leaf = m.evaluate(ClassExpression::atom(a.leaf_class));
      auto cat = m.evaluate(ClassExpression::atom(a.category));
      auto both = leaf;
      both &= action;
      CHECK(both == leaf);
      both = leaf;
      both &= cat;
      CHECK(both == leaf);
    }
    auto sections = m.evaluate(parse_expression("Section"));
    CHECK(sections == m.sections());
    CHECK(m.evaluate(parse_expression("PEFile")) == m.files());
    CHECK(m.evaluate(parse_expression("Thing")).count() == m.size());
  }

  TEST_CASE("semantic laws and naive oracle on random inputs") {
    std::mt19937_64 rng(42);
    for (int round = 0; round < 20; ++round) {
      KnowledgeBase kb = testing::random_kb(100 + static_cast<std::uint64_t>(round), 12);
      QueryModel m(kb);
      for (int i = 0; i < 15; ++i) {
        auto a = testing::random_expression(rng, 3);
        auto b = testing::random_expression(rng, 3);
        CAPTURE(to_string(a));
        auto ea = m.evaluate(a);
        auto conj = ea;
        conj &= m.evaluate(b);
        CHECK(m.evaluate(ClassExpression::conjunction({a, b})) == conj);
        CHECK(m.evaluate(ClassExpression::negation(ClassExpression::negation(a))) == ea);
        CHECK(m.evaluate(ClassExpression::min(1, "has_section", a)) ==
              m.evaluate(ClassExpression::some("has_section", a)));
        CHECK(iris(m, ea) == testing::naive_evaluate(a, kb));
        CHECK(parse_expression(to_string(a)) == a);
      }
    }
  }

  TEST_CASE("derived_as expressions reproduce the derived links") {
    KnowledgeBase kb = testing::random_kb(43, 400);
    QueryModel m(kb);
    const Vocabulary& v = builtin_vocabulary();
    for (const auto& [cls, templ] : v.derived_annotations) {
      CAPTURE(cls);
      auto e = parse_expression(*v.derived_expression(cls, {}));
      auto domain = file_feature_from_name(cls) ? m.files() : m.sections();
      auto got = m.evaluate(e);
      got &= domain;
      CHECK(iris(m, got) == testing::linked_to(kb, cls));
    }
  }

  TEST_CASE("ignoring derived links") {
    KnowledgeBase kb = testing::planted_kb();
    QueryOptions opts;
    opts.include_derived = false;
    QueryModel m(kb, builtin_vocabulary(), opts);
    CHECK(m.evaluate_files(parse_expression(testing::kEq1)).empty());
    CHECK(m.evaluate_files(parse_expression(testing::kEq3)) == std::vector<std::string>{kb.files[3].iri});
  }

  TEST_CASE("scores") {
    KnowledgeBase kb = testing::planted_kb();
    QueryModel m(kb);
    ConceptScore s = score(parse_expression(testing::kEq3), m);
    CHECK(s.tp == 1);
    CHECK(s.fp == 0);
    CHECK(s.tp + s.fp + s.tn + s.fn == 10);

    // files at odd positions are malware
    std::vector<std::string> malware;
    for (const auto& f : kb.files)
      if (f.label == 1) malware.push_back(f.sha256);
    ClassExpression exact = ClassExpression::nominal(malware);
    ConceptScore all = score(exact, m);
    CHECK(all.accuracy == 1.0);
    CHECK(all.f1 == 1.0);

    ConceptScore none = score(parse_expression("not Thing"), m);
    CHECK(none.recall == 0.0);
    CHECK(none.precision == 0.0);
    CHECK(none.precision_undefined);
    CHECK_FALSE(none.recall_undefined);
    CHECK(nlohmann::json::parse(none.to_json())["tn"] == 5);

    for (auto& f : kb.files) f.label = -1;
    QueryModel unlabeled(kb);
    try {
      score(exact, unlabeled);
      FAIL("expected NoLabeledData");
    } catch (const QueryError& e) {
      CHECK(e.kind() == QueryError::Kind::NoLabeledData);
    }
  }
}
