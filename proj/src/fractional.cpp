#include "peo/fractional.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "peo/error.hpp"

namespace peo {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash64(std::uint64_t variant, std::uint64_t label) { return mix64(mix64(variant) ^ label); }

std::uint64_t SplitMix64::next() {
  std::uint64_t z = mix64(state_);
  state_ += 0x9e3779b97f4a7c15ULL;
  return z;
}

std::uint64_t SplitMix64::uniform_below(std::uint64_t bound) {
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  while (true) {
    std::uint64_t x = next();
    if (x <= limit) return x % bound;
  }
}

std::vector<FractionSpec> default_fraction_table() { return {{1000, 10}, {10000, 10}, {100000, 10}, {800000, 1}}; }

std::vector<FractionSpec> parse_sizes(std::string_view text) {
  std::vector<FractionSpec> out;
  auto parse_num = [&](std::string_view s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      throw SamplingError(SamplingError::Kind::InvalidSpec, "not a number: '" + std::string(s) + "'");
    return v;
  };
  while (!text.empty()) {
    std::size_t comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view() : text.substr(comma + 1);
    if (item.empty()) continue;
    FractionSpec spec;
    std::size_t colon = item.find(':');
    spec.size = parse_num(item.substr(0, colon));
    spec.variants = colon == std::string_view::npos ? 1 : parse_num(item.substr(colon + 1));
    if (spec.size == 0 || spec.size % 2 != 0)
      throw SamplingError(SamplingError::Kind::InvalidSpec, "fraction size must be even and positive");
    if (spec.variants == 0) throw SamplingError(SamplingError::Kind::InvalidSpec, "variant count must be at least 1");
    out.push_back(spec);
  }
  if (out.empty()) throw SamplingError(SamplingError::Kind::InvalidSpec, "no fraction sizes given");
  return out;
}

namespace {

std::vector<std::string> ids_with_label(const std::vector<LabeledId>& pool, int label) {
  std::vector<std::string> out;
  for (const auto& item : pool)
    if (item.label == label) out.push_back(item.id);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<std::string> select_fraction(const std::vector<LabeledId>& pool, std::size_t size, std::size_t variant,
                                         std::uint64_t seed_base) {
  if (size == 0 || size % 2 != 0)
    throw SamplingError(SamplingError::Kind::InvalidSpec, "fraction size must be even and positive");
  const std::size_t half = size / 2;
  std::vector<std::string> out;
  out.reserve(size);
  for (int label : {1, 0}) {
    auto ids = ids_with_label(pool, label);
    if (ids.size() < half)
      throw SamplingError(SamplingError::Kind::InsufficientSamples,
                          "label " + std::to_string(label) + ": have " + std::to_string(ids.size()) + ", need " +
                              std::to_string(half));
    SplitMix64 rng(seed_base ^ hash64(variant, static_cast<std::uint64_t>(label)));
    shuffle(ids, rng);
    out.insert(out.end(), std::make_move_iterator(ids.begin()),
               std::make_move_iterator(ids.begin() + static_cast<std::ptrdiff_t>(half)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Fold> kfold(const std::vector<LabeledId>& examples, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw SamplingError(SamplingError::Kind::InvalidK, "k must be at least 2");
  std::vector<Fold> folds(k);
  for (int label : {1, 0}) {
    auto ids = ids_with_label(examples, label);
    if (ids.size() < k)
      throw SamplingError(SamplingError::Kind::InvalidK, "label " + std::to_string(label) + " has " +
                                                             std::to_string(ids.size()) + " examples, fewer than k");
    SplitMix64 rng(seed ^ hash64(k, static_cast<std::uint64_t>(label)));
    shuffle(ids, rng);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      Fold& f = folds[i % k];
      (label == 1 ? f.positive : f.negative).push_back(std::move(ids[i]));
    }
  }
  for (auto& f : folds) {
    std::sort(f.positive.begin(), f.positive.end());
    std::sort(f.negative.begin(), f.negative.end());
  }
  return folds;
}

std::vector<LabeledId> parse_examples(std::string_view json_text) {
  auto doc = nlohmann::json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error("examples document is not a JSON object");
  std::vector<LabeledId> out;
  for (auto [key, label] : {std::pair{"positive", 1}, std::pair{"negative", 0}}) {
    if (!doc.contains(key)) continue;
    if (!doc[key].is_array()) throw Error(std::string("examples field '") + key + "' must be an array");
    for (const auto& item : doc[key]) {
      if (!item.is_string()) throw Error(std::string("examples field '") + key + "' must hold strings");
      out.push_back({item.get<std::string>(), label});
    }
  }
  return out;
}

std::string folds_to_json(const std::vector<Fold>& folds, std::size_t k, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["k"] = k;
  j["seed"] = seed;
  j["folds"] = nlohmann::ordered_json::array();
  for (const auto& f : folds) {
    nlohmann::ordered_json fj;
    fj["positive"] = f.positive;
    fj["negative"] = f.negative;
    j["folds"].push_back(std::move(fj));
  }
  return j.dump(2) + "\n";
}

std::string fraction_stem(std::size_t variant, std::size_t size) {
  return "dataset_" + std::to_string(variant) + "_" + std::to_string(size);
}

namespace {

struct IndexedRecord {
  std::uint64_t offset = 0;
  std::size_t length = 0;
  std::size_t line = 0;
  int label = -1;
};

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(p.string(), "cannot open for writing");
  return out;
}

}  // namespace

FractionRun write_fractions(const std::filesystem::path& input, const std::vector<FractionSpec>& specs,
                            std::uint64_t seed_base, const std::filesystem::path& out_dir, const BuildContext& ctx,
                            const AboxOptions& abox) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw IoError(input.string(), "cannot open for reading");

  FractionRun run;
  std::unordered_map<std::string, IndexedRecord> index;
  std::vector<LabeledId> pool;
  {
    std::string line;
    std::uint64_t offset = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      const std::uint64_t start = offset;
      offset += line.size() + (in.eof() ? 0 : 1);
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      ParseDiagnostics diag;
      auto rec = parse_line(line_no, line, &diag);
      if (!rec.ok()) {
        ++run.stats.skipped;
        continue;
      }
      ++run.stats.parsed;
      const RawSample& s = rec.sample();
      auto [it, inserted] = index.try_emplace(s.sha256, IndexedRecord{start, line.size(), line_no, s.label});
      if (!inserted) {
        ++run.stats.duplicates;
        continue;
      }
      if (s.label >= 0) pool.push_back({s.sha256, s.label});
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), ec.message());

  for (const auto& spec : specs) {
    for (std::size_t variant = 1; variant <= spec.variants; ++variant) {
      auto selected = select_fraction(pool, spec.size, variant, seed_base);
      const std::string stem = fraction_stem(variant, spec.size);
      AboxOptions opts = abox;
      if (opts.ontology_iri.empty()) opts.ontology_iri = opts.ns.ontology_iri() + "/" + stem;
      AboxRenderer renderer(*ctx.vocabulary, opts);

      const auto owl_path = out_dir / (stem + ".owl");
      const auto raw_path = out_dir / (stem + "_raw.json");
      const auto examples_path = out_dir / (stem + "_examples.json");
      auto owl = open_out(owl_path);
      auto raw = open_out(raw_path);
      AboxWriter writer(owl, renderer);
      std::vector<std::string> positive, negative;

      std::ifstream src(input, std::ios::binary);
      if (!src) throw IoError(input.string(), "cannot open for reading");
      std::string line;
      for (const auto& sha : selected) {
        const IndexedRecord& r = index.at(sha);
        line.resize(r.length);
        src.clear();
        src.seekg(static_cast<std::streamoff>(r.offset));
        src.read(line.data(), static_cast<std::streamsize>(r.length));
        if (!src) throw IoError(input.string(), "input changed while writing fractions");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        RawSample s = parse_sample(line, r.line);
        PEFileIndividual f = build_individual(s, ctx);
        writer.write(f);
        raw << line << '\n';
        (f.label == 1 ? positive : negative).push_back(f.iri);
      }
      auto examples = open_out(examples_path);
      examples << render_examples(positive, negative);
      for (auto* stream : {&owl, &raw, &examples}) {
        stream->flush();
        if (!*stream) throw IoError(out_dir.string(), "write failed");
      }
      run.files.push_back(owl_path.string());
      run.files.push_back(raw_path.string());
      run.files.push_back(examples_path.string());
    }
  }
  return run;
}

}  // namespace peo
