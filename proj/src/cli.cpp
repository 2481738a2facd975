#include "peo/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "embedded_data.hpp"
#include "json.hpp"
#include "peo/action_map.hpp"
#include "peo/concept_query.hpp"
#include "peo/convert.hpp"
#include "peo/error.hpp"
#include "peo/fractional.hpp"
#include "peo/kb.hpp"
#include "peo/rdf_emit.hpp"
#include "peo/rdf_reader.hpp"
#include "peo/stats.hpp"
#include "peo/vocabulary.hpp"

namespace peo::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

/// Raised for flag combinations CLI11 cannot check by itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string vocab_dir;
  std::string base_iri;
  std::string action_map;
  std::optional<std::uint64_t> imports_threshold;
  std::optional<double> entropy_threshold;
  std::string standard_sections;
};

void add_vocab_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--vocab-dir", f.vocab_dir, "Directory with classes.json, actions.json, properties.json")
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--base-iri", f.base_iri, "Namespace of terms and individuals (env PEO_BASE_IRI)");
}

void add_derivation_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--action-map", f.action_map, "API-to-action TSV replacing the bundled table")
      ->check(CLI::ExistingFile);
  cmd->add_option("--imports-threshold", f.imports_threshold, "LowImportsCount when imports < N")
      ->check(CLI::Range(std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max()));
  cmd->add_option("--entropy-threshold", f.entropy_threshold, "HighEntropy when entropy > X")
      ->check(CLI::Range(0.0, 8.0));
  cmd->add_option("--standard-sections", f.standard_sections, "File listing standard section names")
      ->check(CLI::ExistingFile);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

/// Vocabulary, namespace, action map and thresholds resolved from flags.
struct Environment {
  std::optional<Vocabulary> owned_vocab;
  std::optional<ApiActionMap> owned_map;
  BuildContext ctx;

  explicit Environment(const CommonFlags& f, bool need_map) {
    if (!f.vocab_dir.empty()) {
      owned_vocab = load_vocabulary(f.vocab_dir);
      ctx.vocabulary = &*owned_vocab;
    }
    std::string base = f.base_iri;
    if (base.empty())
      if (const char* env = std::getenv("PEO_BASE_IRI")) base = env;
    if (!base.empty()) {
      if (base.find_first_of(" \t\r\n<>\"{}|\\^`") != std::string::npos || base.find(':') == std::string::npos)
        throw UsageError("base IRI must be an absolute IRI: '" + base + "'");
      ctx.ns = Namespace(base);
    }
    if (f.imports_threshold) ctx.derivation.imports_threshold = *f.imports_threshold;
    if (f.entropy_threshold) ctx.derivation.entropy_threshold = *f.entropy_threshold;
    if (!f.standard_sections.empty()) ctx.derivation.standard_section_names = load_section_name_list(f.standard_sections);
    try {
      ctx.derivation.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (need_map) {
      if (!f.action_map.empty()) {
        owned_map = load_action_map(f.action_map, *ctx.vocabulary);
        ctx.action_map = &*owned_map;
      } else if (owned_vocab) {
        owned_map = parse_action_map(embedded::action_map_tsv(), *ctx.vocabulary);
        ctx.action_map = &*owned_map;
      }
    }
  }
};

RdfFormat parse_format(const std::string& s) { return s == "ntriples" ? RdfFormat::NTriples : RdfFormat::Turtle; }

std::string error_kind(const std::exception& e) {
  if (auto* ie = dynamic_cast<const IngestError*>(&e)) return std::string(to_string(ie->kind()));
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const VocabularyError*>(&e)) return "VocabularyError";
  if (auto* ae = dynamic_cast<const ActionMapError*>(&e)) {
    switch (ae->kind()) {
      case ActionMapError::Kind::UnknownActionId: return "UnknownActionId";
      case ActionMapError::Kind::DuplicateKey: return "DuplicateKey";
      case ActionMapError::Kind::Malformed: return "MalformedActionMap";
    }
  }
  if (dynamic_cast<const UnknownPrototypeError*>(&e)) return "UnknownPrototype";
  if (dynamic_cast<const RdfSyntaxError*>(&e)) return "RdfSyntaxError";
  if (auto* qe = dynamic_cast<const QueryError*>(&e)) {
    switch (qe->kind()) {
      case QueryError::Kind::SyntaxError: return "SyntaxError";
      case QueryError::Kind::UnknownName: return "UnknownName";
      case QueryError::Kind::NoLabeledData: return "NoLabeledData";
    }
  }
  if (auto* se = dynamic_cast<const SamplingError*>(&e)) {
    switch (se->kind()) {
      case SamplingError::Kind::InsufficientSamples: return "InsufficientSamples";
      case SamplingError::Kind::InvalidK: return "InvalidK";
      case SamplingError::Kind::InvalidSpec: return "InvalidSpec";
    }
  }
  return "Error";
}

ordered_json base_report(const std::string& command) {
  ordered_json j;
  j["command"] = command;
  j["status"] = "ok";
  const auto zeros = ordered_json::parse(BuildStats{}.to_json());
  for (const auto& [k, v] : zeros.items()) j[k] = v;
  return j;
}

void merge_stats(ordered_json& j, const BuildStats& s) {
  const auto counts = ordered_json::parse(s.to_json());
  for (const auto& [k, v] : counts.items()) j[k] = v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("PE malware ontology toolkit", "peo");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  CommonFlags flags;
  std::string command;

  // convert
  auto* convert_cmd = app.add_subcommand("convert", "JSON-Lines records to an ABox and an examples file");
  std::string c_input, c_out, c_examples, c_format = "turtle";
  bool c_ignore_derived = false;
  unsigned c_jobs = 1;
  std::size_t c_chunk = 4096;
  convert_cmd->add_option("--input", c_input, "JSON-Lines input")->required()->check(CLI::ExistingFile);
  convert_cmd->add_option("--out", c_out, "ABox output path")->required();
  convert_cmd->add_option("--examples", c_examples, "Examples output path (default <out stem>_examples.json)");
  convert_cmd->add_option("--format", c_format)->check(CLI::IsMember({"turtle", "ntriples"}));
  convert_cmd->add_flag("--ignore-derived", c_ignore_derived, "Omit links to derived feature prototypes");
  convert_cmd->add_option("--jobs", c_jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
  convert_cmd->add_option("--chunk-records", c_chunk, "Records per sorted run")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 32));
  add_vocab_flags(convert_cmd, flags);
  add_derivation_flags(convert_cmd, flags);

  // tbox
  auto* tbox_cmd = app.add_subcommand("tbox", "Export the ontology schema as Turtle");
  std::string t_out;
  tbox_cmd->add_option("--out", t_out, "Output path (default stdout)");
  add_vocab_flags(tbox_cmd, flags);
  add_derivation_flags(tbox_cmd, flags);

  // fractions
  auto* frac_cmd = app.add_subcommand("fractions", "Balanced fractional datasets");
  std::string f_input, f_out, f_sizes, f_format = "turtle";
  std::uint64_t f_seed = 0;
  bool f_ignore_derived = false;
  frac_cmd->add_option("--input", f_input, "JSON-Lines input")->required()->check(CLI::ExistingFile);
  frac_cmd->add_option("--out", f_out, "Output directory")->required();
  frac_cmd->add_option("--sizes", f_sizes, "size:variants,... (default 1000:10,10000:10,100000:10,800000:1)");
  frac_cmd->add_option("--seed", f_seed, "Seed of the selection streams")->required();
  frac_cmd->add_option("--format", f_format)->check(CLI::IsMember({"turtle", "ntriples"}));
  frac_cmd->add_flag("--ignore-derived", f_ignore_derived);
  add_vocab_flags(frac_cmd, flags);
  add_derivation_flags(frac_cmd, flags);

  // folds
  auto* folds_cmd = app.add_subcommand("folds", "Stratified k-fold split of an examples file");
  std::string k_examples, k_out;
  std::size_t k_k = 0;
  std::uint64_t k_seed = 0;
  folds_cmd->add_option("--examples", k_examples, "Examples JSON")->required()->check(CLI::ExistingFile);
  folds_cmd->add_option("--k", k_k, "Number of folds")->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 32));
  folds_cmd->add_option("--seed", k_seed)->required();
  folds_cmd->add_option("--out", k_out, "Output path (default stdout)");

  // query
  auto* query_cmd = app.add_subcommand("query", "Evaluate a class expression over an ABox");
  std::string q_kb, q_expr, q_examples, q_out;
  bool q_score = false;
  query_cmd->add_option("--kb", q_kb, "ABox (Turtle or N-Triples)")->required()->check(CLI::ExistingFile);
  query_cmd->add_option("--expr", q_expr, "Class expression")->required();
  query_cmd->add_flag("--score", q_score, "Score matches against example labels");
  query_cmd->add_option("--examples", q_examples, "Examples JSON (default <kb stem>_examples.json)");
  query_cmd->add_option("--out", q_out, "Output path (default stdout)");
  add_vocab_flags(query_cmd, flags);

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Per-label histograms of section entropy or import counts");
  std::string s_input, s_out, s_metric = "entropy";
  std::optional<double> s_width, s_threshold;
  stats_cmd->add_option("--input", s_input, "JSON-Lines input")->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--metric", s_metric)->check(CLI::IsMember({"entropy", "imports"}));
  stats_cmd->add_option("--bin-width", s_width, "Default 0.1 (entropy) or 10 (imports)");
  stats_cmd->add_option("--threshold", s_threshold, "Default 7.0 (entropy) or 10 (imports)");
  stats_cmd->add_option("--out", s_out, "CSV output path (default stdout)");

  // validate-map
  auto* map_cmd = app.add_subcommand("validate-map", "Load and validate an action map");
  add_vocab_flags(map_cmd, flags);
  map_cmd->add_option("--action-map", flags.action_map, "TSV to validate (default: bundled table)")
      ->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    ordered_json j;
    j["status"] = "usage_error";
    j["message"] = e.what();
    err << j.dump() << '\n';
    return kExitUsageError;
  }

  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  ordered_json report = base_report(command);

  try {
    if (command == "convert") {
      Environment env(flags, true);
      ConvertOptions opts;
      opts.input = c_input;
      opts.output = c_out;
      opts.examples_output = c_examples;
      opts.jobs = c_jobs;
      opts.chunk_records = c_chunk;
      opts.abox.ns = env.ctx.ns;
      opts.abox.include_derived = !c_ignore_derived;
      opts.abox.format = parse_format(c_format);
      ConvertReport r = peo::convert(opts, env.ctx);
      for (const auto& d : r.diagnostics) err << d << '\n';
      err << r.ingest.to_json() << '\n';
      const auto counts = ordered_json::parse(r.to_json());
      for (const auto& [k, v] : counts.items()) report[k] = v;
    } else if (command == "tbox") {
      Environment env(flags, false);
      TboxOptions opts{env.ctx.ns, env.ctx.derivation};
      std::string doc = export_tbox(*env.ctx.vocabulary, opts);
      if (t_out.empty()) out << doc;
      else write_text(t_out, doc);
      report["classes"] = env.ctx.vocabulary->classes.size();
    } else if (command == "fractions") {
      Environment env(flags, true);
      std::vector<FractionSpec> specs;
      try {
        specs = f_sizes.empty() ? default_fraction_table() : parse_sizes(f_sizes);
      } catch (const SamplingError& e) {
        throw UsageError(e.what());
      }
      AboxOptions abox;
      abox.ns = env.ctx.ns;
      abox.include_derived = !f_ignore_derived;
      abox.format = parse_format(f_format);
      FractionRun r = write_fractions(f_input, specs, f_seed, f_out, env.ctx, abox);
      err << IngestReport{r.stats.parsed, r.stats.skipped, 0}.to_json() << '\n';
      merge_stats(report, r.stats);
      report["written"] = r.files.size();
    } else if (command == "folds") {
      auto examples = parse_examples(read_text(k_examples));
      auto folds = kfold(examples, k_k, k_seed);
      std::string doc = folds_to_json(folds, k_k, k_seed);
      if (k_out.empty()) out << doc;
      else write_text(k_out, doc);
      report["examples"] = examples.size();
    } else if (command == "query") {
      Environment env(flags, false);
      KnowledgeBase kb = kb_from_triples(parse_turtle(read_text(q_kb)), *env.ctx.vocabulary, env.ctx.ns);
      std::string examples_path = q_examples;
      if (examples_path.empty()) {
        auto sibling = default_examples_path(q_kb);
        if (std::filesystem::exists(sibling)) examples_path = sibling.string();
      }
      if (!examples_path.empty()) report["labeled"] = apply_examples(kb, read_text(examples_path));
      ClassExpression e = parse_expression(q_expr, *env.ctx.vocabulary);
      QueryModel model(kb, *env.ctx.vocabulary, QueryOptions{env.ctx.ns, true});
      ordered_json result;
      result["expression"] = to_string(e);
      result["matches"] = model.evaluate_files(e);
      if (q_score) result["score"] = ordered_json::parse(score(e, model).to_json());
      std::string doc = result.dump(2) + "\n";
      if (q_out.empty()) out << doc;
      else write_text(q_out, doc);
      report["files"] = kb.files.size();
      report["matches"] = result["matches"].size();
    } else if (command == "stats") {
      Metric metric = s_metric == "imports" ? Metric::Imports : Metric::Entropy;
      double width = s_width.value_or(metric == Metric::Entropy ? 0.1 : 10.0);
      double threshold = s_threshold.value_or(metric == Metric::Entropy ? 7.0 : 10.0);
      StatsRun r = [&] {
        try {
          return compute_stats(s_input, metric, width, threshold);
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      }();
      err << r.ingest.to_json() << '\n';
      if (s_out.empty()) {
        out << r.histogram.to_csv();
        err << r.report.to_json() << '\n';
      } else {
        write_text(s_out, r.histogram.to_csv());
        out << r.report.to_json() << '\n';
      }
      report["parsed"] = r.ingest.ok;
      report["skipped"] = r.ingest.skipped;
      report["clamped_entropies"] = r.ingest.clamped_entropies;
    } else if (command == "validate-map") {
      Environment env(flags, true);
      const ApiActionMap& m = *env.ctx.action_map;
      std::set<std::string> categories;
      for (const auto& id : m.action_ids()) categories.insert(env.ctx.vocabulary->find_action(id)->category);
      ordered_json result;
      result["entries"] = m.size();
      result["actions"] = m.action_ids().size();
      result["categories"] = categories.size();
      out << result.dump() << '\n';
    }
  } catch (const UsageError& e) {
    report["status"] = "usage_error";
    report["message"] = e.what();
    err << report.dump() << '\n';
    return kExitUsageError;
  } catch (const std::exception& e) {
    report["status"] = "error";
    report["error"] = error_kind(e);
    report["message"] = e.what();
    err << report.dump() << '\n';
    return kExitInputError;
  }
  err << report.dump() << '\n';
  return kExitOk;
}

}  // namespace peo::cli
