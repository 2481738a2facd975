#pragma once

// Shared fixtures for query tests: the three learned expressions, a KB with
// one planted satisfier per expression, random KBs and expressions, and a
// naive per-individual evaluator used as an oracle for QueryModel.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "peo/concept_query.hpp"
#include "peo/kb.hpp"

namespace peo::testing {

inline const std::string kEq1 =
    "(has_file_feature some {multiple_executable_sections}) and "
    "(has_section min 2 (has_section_feature some {high_entropy}))";
inline const std::string kEq2 =
    "(has_action some {read-from-process-memory}) and "
    "(has_section some (has_section_feature some {write_execute_section}))";
inline const std::string kEq3 =
    "(not DynamicLinkLibrary) and (has_action some {connect-to-ftp-server}) and "
    "(has_action some {enumerate-registry-key-values})";

/// Ten files; file index i (1..3) is the only satisfier of Eq. i. The other
/// seven are near misses that each lack exactly one conjunct.
KnowledgeBase planted_kb(const Namespace& ns = Namespace());

/// KB built from `n` synthetic records generated with `seed`.
KnowledgeBase random_kb(std::uint64_t seed, std::size_t n);

/// Random well-typed expression over the builtin vocabulary.
ClassExpression random_expression(std::mt19937_64& rng, int depth);

/// Evaluates `e` one individual at a time directly over the KB records,
/// returning IRIs of every file, section and prototype that satisfies it.
std::set<std::string> naive_evaluate(const ClassExpression& e, const KnowledgeBase& kb,
                                     const Vocabulary& v = builtin_vocabulary(), bool include_derived = true,
                                     const Namespace& ns = Namespace());

/// IRIs of every file and section individual linked to the prototype of
/// derived feature class `cls`.
std::set<std::string> linked_to(const KnowledgeBase& kb, const std::string& cls);

}  // namespace peo::testing
