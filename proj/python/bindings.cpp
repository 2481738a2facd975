#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>

#include "peo/cli.hpp"
#include "peo/concept_query.hpp"
#include "peo/convert.hpp"
#include "peo/error.hpp"
#include "peo/fractional.hpp"
#include "peo/kb.hpp"
#include "peo/rdf_emit.hpp"
#include "peo/stats.hpp"
#include "peo/vocabulary.hpp"

namespace py = pybind11;

namespace {

using peo::Namespace;

Namespace make_ns(const std::optional<std::string>& base_iri) {
  return base_iri ? Namespace(*base_iri) : Namespace();
}

peo::RdfFormat make_format(const std::string& f) {
  if (f == "turtle") return peo::RdfFormat::Turtle;
  if (f == "ntriples") return peo::RdfFormat::NTriples;
  throw py::value_error("format must be 'turtle' or 'ntriples'");
}

py::object loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

struct PyKnowledgeBase {
  peo::KnowledgeBase kb;
  Namespace ns;
};

py::dict individual_dict(const peo::PEFileIndividual& f) {
  py::dict d;
  d["iri"] = f.iri;
  d["sha256"] = f.sha256;
  d["class"] = std::string(peo::class_name(f.file_class));
  py::dict data;
  for (auto p : peo::kFileDataProperties) data[py::str(std::string(p))] = f.data.get(p);
  d["data"] = data;
  py::list features;
  f.features.for_each([&](peo::FileFeature x) { features.append(std::string(peo::class_name(x))); });
  d["features"] = features;
  d["actions"] = std::vector<std::string>(f.actions.begin(), f.actions.end());
  py::list sections;
  for (const auto& s : f.sections) {
    py::dict sd;
    sd["iri"] = s.iri;
    sd["class"] = std::string(peo::class_name(s.section_class));
    sd["name"] = s.section_name;
    sd["entropy"] = s.section_entropy;
    py::list flags, sfeatures;
    s.flags.for_each([&](peo::SectionFlag x) { flags.append(std::string(peo::class_name(x))); });
    s.features.for_each([&](peo::SectionFeature x) { sfeatures.append(std::string(peo::class_name(x))); });
    sd["flags"] = flags;
    sd["features"] = sfeatures;
    sections.append(sd);
  }
  d["sections"] = sections;
  d["label"] = f.label;
  return d;
}

std::vector<peo::LabeledId> labeled(const std::vector<std::pair<std::string, int>>& items) {
  std::vector<peo::LabeledId> out;
  out.reserve(items.size());
  for (const auto& [id, label] : items) out.push_back({id, label});
  return out;
}

}  // namespace

PYBIND11_MODULE(_peo, m) {
  m.doc() = "PE malware ontology: EMBER records to OWL knowledge bases";

  static py::exception<peo::Error> base(m, "PeoError", PyExc_ValueError);
  py::register_exception<peo::IoError>(m, "IoError", base.ptr());
  py::register_exception<peo::IngestError>(m, "IngestError", base.ptr());
  py::register_exception<peo::VocabularyError>(m, "VocabularyError", base.ptr());
  py::register_exception<peo::ActionMapError>(m, "ActionMapError", base.ptr());
  py::register_exception<peo::UnknownPrototypeError>(m, "UnknownPrototypeError", base.ptr());
  py::register_exception<peo::RdfSyntaxError>(m, "RdfSyntaxError", base.ptr());
  py::register_exception<peo::QueryError>(m, "QueryError", base.ptr());
  py::register_exception<peo::SamplingError>(m, "SamplingError", base.ptr());

  m.attr("DEFAULT_BASE_IRI") = std::string(peo::kDefaultBaseIri);

  m.def(
      "convert",
      [](const std::filesystem::path& input, const std::filesystem::path& output,
         std::optional<std::filesystem::path> examples, unsigned jobs, std::size_t chunk_records, bool include_derived,
         const std::string& format, std::optional<std::string> base_iri) {
        peo::ConvertOptions opts;
        opts.input = input;
        opts.output = output;
        if (examples) opts.examples_output = *examples;
        opts.jobs = jobs;
        opts.chunk_records = chunk_records;
        opts.abox.include_derived = include_derived;
        opts.abox.format = make_format(format);
        peo::BuildContext ctx;
        ctx.ns = make_ns(base_iri);
        opts.abox.ns = ctx.ns;
        std::string report;
        {
          py::gil_scoped_release release;
          report = peo::convert(opts, ctx).to_json();
        }
        return loads(report);
      },
      py::arg("input"), py::arg("output"), py::arg("examples") = py::none(), py::kw_only(), py::arg("jobs") = 1,
      py::arg("chunk_records") = 4096, py::arg("include_derived") = true, py::arg("format") = "turtle",
      py::arg("base_iri") = py::none(),
      "Convert a JSON-Lines file into an ABox and an examples file; returns the run report.");

  m.def(
      "export_tbox",
      [](std::optional<std::string> base_iri, std::uint64_t imports_threshold, double entropy_threshold) {
        peo::TboxOptions opts;
        opts.ns = make_ns(base_iri);
        opts.derivation.imports_threshold = imports_threshold;
        opts.derivation.entropy_threshold = entropy_threshold;
        opts.derivation.validate();
        return peo::export_tbox(peo::builtin_vocabulary(), opts);
      },
      py::kw_only(), py::arg("base_iri") = py::none(), py::arg("imports_threshold") = 10,
      py::arg("entropy_threshold") = 7.0, "Turtle rendering of the ontology schema.");

  m.def(
      "derive",
      [](const std::string& line, std::optional<std::string> base_iri) {
        peo::BuildContext ctx;
        ctx.ns = make_ns(base_iri);
        return individual_dict(peo::build_individual(peo::parse_sample(line), ctx));
      },
      py::arg("line"), py::kw_only(), py::arg("base_iri") = py::none(),
      "Individual (class, data values, features, actions, sections) built from one JSON record.");

  py::class_<PyKnowledgeBase>(m, "KnowledgeBase")
      .def_static(
          "from_jsonl",
          [](const std::filesystem::path& path, unsigned jobs, std::optional<std::string> base_iri) {
            peo::BuildContext ctx;
            ctx.ns = make_ns(base_iri);
            std::vector<peo::RawSample> samples;
            peo::SampleStream stream(path);
            while (auto rec = stream.next())
              if (rec->ok()) samples.push_back(rec->sample());
            return PyKnowledgeBase{peo::build_kb(samples, ctx, nullptr, jobs), ctx.ns};
          },
          py::arg("path"), py::kw_only(), py::arg("jobs") = 1, py::arg("base_iri") = py::none())
      .def_static(
          "from_turtle",
          [](const std::string& text, std::optional<std::string> examples, std::optional<std::string> base_iri) {
            Namespace ns = make_ns(base_iri);
            PyKnowledgeBase out{peo::kb_from_triples(peo::parse_turtle(text), peo::builtin_vocabulary(), ns), ns};
            if (examples) peo::apply_examples(out.kb, *examples);
            return out;
          },
          py::arg("text"), py::arg("examples") = py::none(), py::kw_only(), py::arg("base_iri") = py::none(),
          "Rebuild from an ABox; `examples` is an examples JSON document supplying labels.")
      .def("__len__", [](const PyKnowledgeBase& k) { return k.kb.files.size(); })
      .def_property_readonly("iris",
                             [](const PyKnowledgeBase& k) {
                               std::vector<std::string> out;
                               for (const auto& f : k.kb.files) out.push_back(f.iri);
                               return out;
                             })
      .def_property_readonly("section_count", [](const PyKnowledgeBase& k) { return k.kb.section_count(); })
      .def(
          "individual",
          [](const PyKnowledgeBase& k, const std::string& iri) {
            const auto* f = k.kb.find(iri);
            if (!f) throw py::key_error(iri);
            return individual_dict(*f);
          },
          py::arg("iri"))
      .def(
          "to_turtle",
          [](const PyKnowledgeBase& k, bool include_derived, const std::string& format) {
            peo::AboxOptions opts;
            opts.ns = k.ns;
            opts.include_derived = include_derived;
            opts.format = make_format(format);
            return peo::emit_abox(k.kb, peo::builtin_vocabulary(), opts);
          },
          py::kw_only(), py::arg("include_derived") = true, py::arg("format") = "turtle")
      .def("examples", [](const PyKnowledgeBase& k) { return loads(peo::emit_examples(k.kb)); })
      .def(
          "query",
          [](const PyKnowledgeBase& k, const std::string& expr, bool include_derived) {
            auto e = peo::parse_expression(expr);
            peo::QueryModel model(k.kb, peo::builtin_vocabulary(), peo::QueryOptions{k.ns, include_derived});
            return model.evaluate_files(e);
          },
          py::arg("expr"), py::kw_only(), py::arg("include_derived") = true,
          "IRIs of the files satisfying a class expression (closed-world).")
      .def(
          "score",
          [](const PyKnowledgeBase& k, const std::string& expr) {
            auto e = peo::parse_expression(expr);
            peo::QueryModel model(k.kb, peo::builtin_vocabulary(), peo::QueryOptions{k.ns, true});
            return loads(peo::score(e, model).to_json());
          },
          py::arg("expr"));

  m.def(
      "select_fraction",
      [](const std::vector<std::pair<std::string, int>>& pool, std::size_t size, std::size_t variant,
         std::uint64_t seed) { return peo::select_fraction(labeled(pool), size, variant, seed); },
      py::arg("pool"), py::arg("size"), py::arg("variant"), py::arg("seed"),
      "Balanced, sorted selection of size/2 ids per label from (id, label) pairs.");

  m.def(
      "kfold",
      [](const std::vector<std::pair<std::string, int>>& examples, std::size_t k, std::uint64_t seed) {
        std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> out;
        for (auto& f : peo::kfold(labeled(examples), k, seed)) out.emplace_back(f.positive, f.negative);
        return out;
      },
      py::arg("examples"), py::arg("k"), py::arg("seed"), "Stratified folds as (positive, negative) lists.");

  m.def(
      "write_fractions",
      [](const std::filesystem::path& input, const std::string& sizes, std::uint64_t seed,
         const std::filesystem::path& out_dir, std::optional<std::string> base_iri) {
        peo::BuildContext ctx;
        ctx.ns = make_ns(base_iri);
        peo::AboxOptions abox;
        abox.ns = ctx.ns;
        auto specs = peo::parse_sizes(sizes);
        py::gil_scoped_release release;
        return peo::write_fractions(input, specs, seed, out_dir, ctx, abox).files;
      },
      py::arg("input"), py::arg("sizes"), py::arg("seed"), py::arg("out_dir"), py::kw_only(),
      py::arg("base_iri") = py::none(), "Write dataset_<variant>_<size> triples; returns the written paths.");

  m.def(
      "stats",
      [](const std::filesystem::path& input, const std::string& metric, std::optional<double> bin_width,
         std::optional<double> threshold) {
        if (metric != "entropy" && metric != "imports") throw py::value_error("metric must be 'entropy' or 'imports'");
        peo::Metric mt = metric == "entropy" ? peo::Metric::Entropy : peo::Metric::Imports;
        double w = bin_width.value_or(mt == peo::Metric::Entropy ? 0.1 : 10.0);
        double t = threshold.value_or(mt == peo::Metric::Entropy ? 7.0 : 10.0);
        peo::StatsRun run = peo::compute_stats(input, mt, w, t);
        return py::make_tuple(run.histogram.to_csv(), loads(run.report.to_json()));
      },
      py::arg("input"), py::arg("metric") = "entropy", py::kw_only(), py::arg("bin_width") = py::none(),
      py::arg("threshold") = py::none(), "Histogram CSV and threshold report.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = peo::cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a peo subcommand in-process; returns (exit_code, stdout, stderr).");
}
