#pragma once

// Balanced, seed-reproducible subsets of a labeled corpus and stratified
// k-fold splits.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "peo/kb.hpp"
#include "peo/rdf_emit.hpp"

namespace peo {

/// SplitMix64 generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

/// SplitMix64 finalizer applied to `x + golden gamma`.
std::uint64_t mix64(std::uint64_t x);
/// Seed offset of one (variant, label) stream: mix64(mix64(variant) ^ label).
std::uint64_t hash64(std::uint64_t variant, std::uint64_t label);

/// Fisher-Yates, i from n-1 down to 1, j = uniform_below(i + 1).
template <class T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

struct LabeledId {
  std::string id;
  int label = -1;

  bool operator==(const LabeledId&) const = default;
};

struct FractionSpec {
  std::size_t size = 0;
  std::size_t variants = 1;

  bool operator==(const FractionSpec&) const = default;
};

/// 1000:10, 10000:10, 100000:10, 800000:1.
std::vector<FractionSpec> default_fraction_table();
/// Parses "size:variants,..." (a bare size means one variant).
/// Throws SamplingError (InvalidSpec) for odd or zero sizes or zero variants.
std::vector<FractionSpec> parse_sizes(std::string_view text);

/// size/2 ids of each label, sorted. Each label's ids are sorted, shuffled
/// with SplitMix64(seed_base ^ hash64(variant, label)) and the first size/2
/// taken. Unlabeled ids are ignored. Throws SamplingError.
std::vector<std::string> select_fraction(const std::vector<LabeledId>& pool, std::size_t size, std::size_t variant,
                                         std::uint64_t seed_base);

struct Fold {
  std::vector<std::string> positive;
  std::vector<std::string> negative;

  bool operator==(const Fold&) const = default;
};

/// Stratified split: per label the sorted ids are shuffled with
/// SplitMix64(seed ^ hash64(k, label)) and dealt round-robin. Throws
/// SamplingError (InvalidK) when k < 2 or a label has fewer than k ids.
std::vector<Fold> kfold(const std::vector<LabeledId>& examples, std::size_t k, std::uint64_t seed);

/// Reads an examples document into (iri, label) pairs.
std::vector<LabeledId> parse_examples(std::string_view json_text);
std::string folds_to_json(const std::vector<Fold>& folds, std::size_t k, std::uint64_t seed);

std::string fraction_stem(std::size_t variant, std::size_t size);

struct FractionRun {
  std::vector<std::string> files;  // written paths
  BuildStats stats;
};

/// Writes dataset_<variant>_<size>.owl, _raw.json and _examples.json for
/// every variant of every spec. Input lines are read twice: once to index
/// (sha256, label, offset) and once per variant for the selected records.
/// The raw file holds the selected input lines verbatim in sha256 order.
FractionRun write_fractions(const std::filesystem::path& input, const std::vector<FractionSpec>& specs,
                            std::uint64_t seed_base, const std::filesystem::path& out_dir, const BuildContext& ctx,
                            const AboxOptions& abox);

}  // namespace peo
