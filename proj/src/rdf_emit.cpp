#include "peo/rdf_emit.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "peo/error.hpp"
#include "rdf_writer.hpp"

namespace peo {

using detail::RdfNode;
using detail::SubjectBlock;

struct AboxRenderer::Impl {
  detail::PrefixMap prefixes;
  std::string type = std::string(kRdfNs) + "type";
  std::string has_section, has_file_feature, has_action, has_section_flag, has_section_feature;
  std::string section_name, section_entropy;
  std::array<std::string, 7> data_props;
  std::array<std::string, kFileFeatureCount> file_feature_targets;
  std::array<std::string, kSectionFeatureCount> section_feature_targets;
  std::array<std::string, kSectionFlagCount> flag_targets;
  std::array<std::string, 2> file_class_iris;
  std::array<std::string, 4> section_class_iris;
  const Vocabulary* vocab = nullptr;
};

namespace {

// Empty when the class has no prototype; the error is raised on first use so
// that a KB not using the class still renders.
std::string prototype_iri(const Vocabulary& v, const Namespace& ns, std::string_view cls) {
  auto it = v.prototypes.find(std::string(cls));
  return it == v.prototypes.end() ? std::string() : ns.iri(it->second);
}

const std::string& require(const std::string& iri, std::string_view cls) {
  if (iri.empty()) throw UnknownPrototypeError(std::string(cls));
  return iri;
}

}  // namespace

AboxRenderer::AboxRenderer(const Vocabulary& v, AboxOptions options) : options_(std::move(options)) {
  if (options_.ontology_iri.empty()) options_.ontology_iri = options_.ns.ontology_iri() + "/abox";
  if (options_.imports_iri.empty()) options_.imports_iri = options_.ns.ontology_iri();
  const Namespace& ns = options_.ns;
  auto impl = std::make_shared<Impl>();
  impl->vocab = &v;
  impl->prefixes = detail::standard_prefixes(ns.prefix_iri());
  impl->has_section = ns.iri("has_section");
  impl->has_file_feature = ns.iri("has_file_feature");
  impl->has_action = ns.iri("has_action");
  impl->has_section_flag = ns.iri("has_section_flag");
  impl->has_section_feature = ns.iri("has_section_feature");
  impl->section_name = ns.iri("section_name");
  impl->section_entropy = ns.iri("section_entropy");
  for (std::size_t i = 0; i < kFileDataProperties.size(); ++i) impl->data_props[i] = ns.iri(kFileDataProperties[i]);
  for (FileFeature f : all_file_features())
    impl->file_feature_targets[static_cast<std::size_t>(f)] = prototype_iri(v, ns, class_name(f));
  for (SectionFeature f : all_section_features())
    impl->section_feature_targets[static_cast<std::size_t>(f)] = prototype_iri(v, ns, class_name(f));
  for (SectionFlag f : all_section_flags())
    impl->flag_targets[static_cast<std::size_t>(f)] = prototype_iri(v, ns, class_name(f));
  for (FileClass c : {FileClass::ExecutableFile, FileClass::DynamicLinkLibrary})
    impl->file_class_iris[static_cast<std::size_t>(c)] = ns.iri(class_name(c));
  for (SectionClass c : {SectionClass::Section, SectionClass::CodeSection, SectionClass::InitializedDataSection,
                         SectionClass::UninitializedDataSection})
    impl->section_class_iris[static_cast<std::size_t>(c)] = ns.iri(class_name(c));
  impl_ = std::move(impl);
}

std::string AboxRenderer::prefix_header() const {
  return options_.format == RdfFormat::Turtle ? impl_->prefixes.header() : std::string();
}

std::string AboxRenderer::ontology_header() const {
  SubjectBlock b{options_.ontology_iri, {}};
  b.add(impl_->type, RdfNode::iri(std::string(kOwlNs) + "Ontology"));
  b.add(std::string(kOwlNs) + "imports", RdfNode::iri(options_.imports_iri));
  return options_.format == RdfFormat::Turtle ? detail::render_turtle(b, impl_->prefixes)
                                              : detail::render_ntriples(b);
}

std::string AboxRenderer::render(const PEFileIndividual& f) const {
  const Impl& m = *impl_;
  const Vocabulary& v = *m.vocab;
  const bool derived = options_.include_derived;

  SubjectBlock fb{f.iri, {}};
  fb.add(m.type, RdfNode::iri(m.file_class_iris[static_cast<std::size_t>(f.file_class)]));
  for (std::size_t i = 0; i < kFileDataProperties.size(); ++i)
    fb.add(m.data_props[i], RdfNode::integer(std::to_string(f.data.values[i])));
  f.features.for_each([&](FileFeature ff) {
    if (!derived && is_derived(ff)) return;
    fb.add(m.has_file_feature,
           RdfNode::iri(require(m.file_feature_targets[static_cast<std::size_t>(ff)], class_name(ff))));
  });
  for (const auto& id : f.actions) {
    if (!v.find_action(id)) throw UnknownPrototypeError(id);
    fb.add(m.has_action, RdfNode::iri(options_.ns.iri(id)));
  }

  std::vector<SubjectBlock> blocks;
  blocks.reserve(f.sections.size());
  for (const auto& s : f.sections) {
    fb.add(m.has_section, RdfNode::iri(s.iri));
    SubjectBlock sb{s.iri, {}};
    sb.add(m.type, RdfNode::iri(m.section_class_iris[static_cast<std::size_t>(s.section_class)]));
    sb.add(m.section_name, RdfNode::string(s.section_name));
    sb.add(m.section_entropy, RdfNode::dbl(format_double(s.section_entropy)));
    s.flags.for_each([&](SectionFlag fl) {
      sb.add(m.has_section_flag, RdfNode::iri(require(m.flag_targets[static_cast<std::size_t>(fl)], class_name(fl))));
    });
    if (derived) {
      s.features.for_each([&](SectionFeature sf) {
        sb.add(m.has_section_feature,
               RdfNode::iri(require(m.section_feature_targets[static_cast<std::size_t>(sf)], class_name(sf))));
      });
    }
    blocks.push_back(std::move(sb));
  }
  blocks.push_back(std::move(fb));
  std::sort(blocks.begin(), blocks.end(),
            [](const SubjectBlock& a, const SubjectBlock& b) { return a.subject < b.subject; });

  std::string out;
  for (const auto& b : blocks)
    out += options_.format == RdfFormat::Turtle ? detail::render_turtle(b, m.prefixes) : detail::render_ntriples(b);
  return out;
}

AboxWriter::AboxWriter(std::ostream& out, const AboxRenderer& renderer) : out_(out), renderer_(renderer) {
  out_ << renderer_.prefix_header();
}

void AboxWriter::write(const PEFileIndividual& f) { write_rendered(renderer_.render(f)); }

void AboxWriter::write_rendered(std::string_view block) {
  if (count_ == 0) out_ << renderer_.ontology_header();
  out_ << block;
  ++count_;
}

std::string emit_abox(const KnowledgeBase& kb, const Vocabulary& v, const AboxOptions& options) {
  AboxRenderer renderer(v, options);
  std::ostringstream out;
  AboxWriter writer(out, renderer);
  for (const auto& f : kb.files) writer.write(f);
  return out.str();
}

ExamplesWriter::ExamplesWriter(std::ostream& out) : out_(out) { out_ << "{\n"; }

void ExamplesWriter::close_list() {
  out_ << (first_ ? "]" : "\n  ]");
  first_ = true;
}

void ExamplesWriter::begin_positive() {
  if (state_ != 0) throw Error("examples writer: positive list must come first");
  out_ << "  \"positive\": [";
  state_ = 1;
}

void ExamplesWriter::begin_negative() {
  if (state_ == 0) begin_positive();
  if (state_ != 1) throw Error("examples writer: negative list already started");
  close_list();
  out_ << ",\n  \"negative\": [";
  state_ = 2;
}

void ExamplesWriter::add(std::string_view iri) {
  if (state_ != 1 && state_ != 2) throw Error("examples writer: no open list");
  out_ << (first_ ? "\n    " : ",\n    ") << nlohmann::json(std::string(iri)).dump();
  first_ = false;
}

void ExamplesWriter::finish() {
  if (state_ == 3) return;
  if (state_ < 2) begin_negative();
  close_list();
  out_ << "\n}\n";
  state_ = 3;
}

std::string render_examples(const std::vector<std::string>& positive, const std::vector<std::string>& negative) {
  std::vector<std::string> pos = positive, neg = negative;
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  std::ostringstream out;
  ExamplesWriter w(out);
  w.begin_positive();
  for (const auto& iri : pos) w.add(iri);
  w.begin_negative();
  for (const auto& iri : neg) w.add(iri);
  w.finish();
  return out.str();
}

std::string emit_examples(const KnowledgeBase& kb) {
  std::vector<std::string> pos, neg;
  for (const auto& f : kb.files) {
    if (f.label == 1) pos.push_back(f.iri);
    if (f.label == 0) neg.push_back(f.iri);
  }
  return render_examples(pos, neg);
}

}  // namespace peo
