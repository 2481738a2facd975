#include <algorithm>
#include <fstream>
#include <sstream>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "peo/error.hpp"
#include "peo/fractional.hpp"
#include "synthetic.hpp"

using namespace peo;

namespace {

std::vector<LabeledId> pool(std::size_t pos, std::size_t neg, std::size_t unlabeled = 0) {
  std::vector<LabeledId> out;
  for (std::size_t i = 0; i < pos; ++i) out.push_back({"p" + std::to_string(i), 1});
  for (std::size_t i = 0; i < neg; ++i) out.push_back({"n" + std::to_string(i), 0});
  for (std::size_t i = 0; i < unlabeled; ++i) out.push_back({"u" + std::to_string(i), -1});
  return out;
}

SamplingError::Kind sampling_error(auto&& f) {
  try {
    f();
  } catch (const SamplingError& e) {
    return e.kind();
  }
  FAIL("no SamplingError");
  return SamplingError::Kind::InvalidSpec;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_SUITE("fractional") {
  TEST_CASE("SplitMix64 reference stream") {
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xe220a8397b1dcdafULL);
    CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
    CHECK(rng.next() == 0x06c45d188009454fULL);
    CHECK(mix64(0) == 0xe220a8397b1dcdafULL);
    SplitMix64 bounded(9);
    for (int i = 0; i < 1000; ++i) CHECK(bounded.uniform_below(7) < 7);
  }

  TEST_CASE("shuffle is a permutation and seed dependent") {
    std::vector<int> a(100), b;
    for (int i = 0; i < 100; ++i) a[static_cast<std::size_t>(i)] = i;
    b = a;
    SplitMix64 r1(1), r2(2);
    auto c = a;
    shuffle(a, r1);
    shuffle(c, r2);
    CHECK(a != b);
    CHECK(a != c);
    std::sort(a.begin(), a.end());
    CHECK(a == b);
  }

  TEST_CASE("size parsing") {
    CHECK(parse_sizes("1000:10,10000:10") == std::vector<FractionSpec>{{1000, 10}, {10000, 10}});
    CHECK(parse_sizes("800000") == std::vector<FractionSpec>{{800000, 1}});
    CHECK(default_fraction_table() ==
          std::vector<FractionSpec>{{1000, 10}, {10000, 10}, {100000, 10}, {800000, 1}});
    CHECK(sampling_error([] { parse_sizes("999:1"); }) == SamplingError::Kind::InvalidSpec);
    CHECK(sampling_error([] { parse_sizes("0:1"); }) == SamplingError::Kind::InvalidSpec);
    CHECK(sampling_error([] { parse_sizes("10:0"); }) == SamplingError::Kind::InvalidSpec);
    CHECK(sampling_error([] { parse_sizes("abc"); }) == SamplingError::Kind::InvalidSpec);
  }

  TEST_CASE("selection is balanced and deterministic") {
    auto p = pool(3, 3, 2);
    auto sel = select_fraction(p, 4, 1, 42);
    CHECK(sel.size() == 4);
    CHECK(std::is_sorted(sel.begin(), sel.end()));
    CHECK(std::count_if(sel.begin(), sel.end(), [](const std::string& s) { return s[0] == 'p'; }) == 2);
    CHECK(std::count_if(sel.begin(), sel.end(), [](const std::string& s) { return s[0] == 'n'; }) == 2);
    CHECK(select_fraction(p, 4, 1, 42) == sel);
    auto reversed = p;
    std::reverse(reversed.begin(), reversed.end());
    CHECK(select_fraction(reversed, 4, 1, 42) == sel);

    auto whole = pool(40, 40);
    CHECK(select_fraction(whole, 80, 1, 7).size() == 80);
    auto big = pool(500, 500);
    std::set<std::vector<std::string>> variants;
    for (std::size_t v = 1; v <= 10; ++v) variants.insert(select_fraction(big, 200, v, 42));
    CHECK(variants.size() == 10);
    CHECK(select_fraction(big, 200, 1, 42) != select_fraction(big, 200, 1, 43));
    CHECK(sampling_error([&] { select_fraction(p, 8, 1, 0); }) == SamplingError::Kind::InsufficientSamples);
  }

  TEST_CASE("selection follows the documented algorithm") {
    auto big = pool(50, 60);
    const std::uint64_t seed = 1234;
    std::vector<std::string> expected;
    for (int label : {1, 0}) {
      std::vector<std::string> ids;
      for (const auto& e : big)
        if (e.label == label) ids.push_back(e.id);
      std::sort(ids.begin(), ids.end());
      SplitMix64 rng(seed ^ hash64(3, static_cast<std::uint64_t>(label)));
      for (std::size_t i = ids.size() - 1; i > 0; --i) std::swap(ids[i], ids[rng.uniform_below(i + 1)]);
      expected.insert(expected.end(), ids.begin(), ids.begin() + 10);
    }
    std::sort(expected.begin(), expected.end());
    CHECK(select_fraction(big, 20, 3, seed) == expected);
  }

  TEST_CASE("k-fold examples and properties") {
    auto small = kfold(pool(5, 5), 5, 1);
    REQUIRE(small.size() == 5);
    for (const auto& f : small) {
      CHECK(f.positive.size() == 1);
      CHECK(f.negative.size() == 1);
    }
    for (const auto& f : kfold(pool(500, 500), 10, 1)) {
      CHECK(f.positive.size() == 50);
      CHECK(f.negative.size() == 50);
    }
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      std::size_t k = 2 + rng() % 9;
      auto p = pool(k + rng() % 60, k + rng() % 60, rng() % 5);
      auto folds = kfold(p, k, trial);
      CHECK(folds == kfold(p, k, trial));
      std::multiset<std::string> seen;
      std::size_t min_p = SIZE_MAX, max_p = 0, min_n = SIZE_MAX, max_n = 0;
      for (const auto& f : folds) {
        for (const auto& id : f.positive) {
          seen.insert(id);
          CHECK(id[0] == 'p');
        }
        for (const auto& id : f.negative) {
          seen.insert(id);
          CHECK(id[0] == 'n');
        }
        min_p = std::min(min_p, f.positive.size());
        max_p = std::max(max_p, f.positive.size());
        min_n = std::min(min_n, f.negative.size());
        max_n = std::max(max_n, f.negative.size());
      }
      std::multiset<std::string> labeled;
      for (const auto& e : p)
        if (e.label >= 0) labeled.insert(e.id);
      CHECK(seen == labeled);
      CHECK(max_p - min_p <= 1);
      CHECK(max_n - min_n <= 1);
    }
    CHECK(sampling_error([] { kfold(pool(5, 5), 1, 0); }) == SamplingError::Kind::InvalidK);
    CHECK(sampling_error([] { kfold(pool(3, 5), 4, 0); }) == SamplingError::Kind::InvalidK);
  }

  TEST_CASE("examples and folds JSON") {
    auto ex = parse_examples(R"({"positive":["a","b"],"negative":["c"]})");
    CHECK(ex == std::vector<LabeledId>{{"a", 1}, {"b", 1}, {"c", 0}});
    auto j = nlohmann::json::parse(folds_to_json(kfold(pool(4, 4), 2, 9), 2, 9));
    CHECK(j["k"] == 2);
    CHECK(j["seed"] == 9);
    CHECK(j["folds"].size() == 2);
    CHECK(fraction_stem(3, 1000) == "dataset_3_1000");
  }

  TEST_CASE("writing fractions") {
    testing::ScratchDir dir("fractions");
    testing::SyntheticOptions opts;
    opts.seed = 61;
    auto lines = testing::synthetic_corpus(120, opts);
    lines.push_back("not json");
    lines.push_back(lines[0]);
    testing::write_lines(dir / "in.jsonl", lines);
    auto run = write_fractions(dir / "in.jsonl", {{20, 2}}, 42, dir / "out", BuildContext{}, AboxOptions{});
    CHECK(run.files.size() == 6);
    CHECK(run.stats.skipped == 1);
    CHECK(run.stats.duplicates == 1);
    std::set<std::string> input(lines.begin(), lines.end());
    for (int v : {1, 2}) {
      std::string stem = (dir / "out" / fraction_stem(static_cast<std::size_t>(v), 20)).string();
      std::string raw = testing::read_file(stem + "_raw.json");
      CHECK(count_lines(raw) == 20);
      std::istringstream rs(raw);
      for (std::string l; std::getline(rs, l);) CHECK(input.count(l) == 1);
      auto ex = nlohmann::json::parse(testing::read_file(stem + "_examples.json"));
      CHECK(ex["positive"].size() == 10);
      CHECK(ex["negative"].size() == 10);
      auto kb = kb_from_triples(parse_turtle(testing::read_file(stem + ".owl")), builtin_vocabulary(), Namespace());
      CHECK(kb.files.size() == 20);
    }
    std::string first = testing::read_file(dir / "out" / "dataset_1_20_examples.json");
    write_fractions(dir / "in.jsonl", {{20, 1}}, 42, dir / "again", BuildContext{}, AboxOptions{});
    CHECK(testing::read_file(dir / "again" / "dataset_1_20_examples.json") == first);
    CHECK(testing::read_file(dir / "again" / "dataset_1_20.owl") == testing::read_file(dir / "out" / "dataset_1_20.owl"));
    CHECK(testing::read_file(dir / "out" / "dataset_2_20_examples.json") != first);
    CHECK_THROWS_AS(write_fractions(dir / "in.jsonl", {{400, 1}}, 42, dir / "big", BuildContext{}, AboxOptions{}),
                    SamplingError);
  }
}
