#include "peo/convert.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <queue>
#include <thread>

#include <unistd.h>

#include "json.hpp"
#include "peo/error.hpp"

namespace peo {

namespace {

constexpr std::size_t kMaxFanIn = 64;

struct Item {
  std::string sha;
  std::size_t index = 0;
  int label = -1;
  std::size_t sections = 0;
  std::string iri;
  std::string text;
};

bool item_less(const Item& a, const Item& b) { return a.sha != b.sha ? a.sha < b.sha : a.index < b.index; }

void write_item(std::ostream& out, const Item& it) {
  out << it.sha << '\t' << it.index << '\t' << it.label << '\t' << it.sections << '\t' << it.iri.size() << '\t'
      << it.text.size() << '\n'
      << it.iri << it.text;
}

class RunReader {
 public:
  explicit RunReader(const std::filesystem::path& p) : in_(p, std::ios::binary), path_(p) {
    if (!in_) throw IoError(p.string(), "cannot open run file");
  }

  bool next(Item& it) {
    std::string header;
    if (!std::getline(in_, header)) return false;
    std::size_t iri_len = 0, text_len = 0;
    std::size_t pos = 0;
    auto field = [&]() {
      std::size_t tab = header.find('\t', pos);
      std::string f = header.substr(pos, tab - pos);
      pos = tab == std::string::npos ? header.size() : tab + 1;
      return f;
    };
    it.sha = field();
    it.index = std::stoull(field());
    it.label = std::stoi(field());
    it.sections = std::stoull(field());
    iri_len = std::stoull(field());
    text_len = std::stoull(field());
    it.iri.resize(iri_len);
    it.text.resize(text_len);
    in_.read(it.iri.data(), static_cast<std::streamsize>(iri_len));
    in_.read(it.text.data(), static_cast<std::streamsize>(text_len));
    if (!in_) throw IoError(path_.string(), "truncated run file");
    return true;
  }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

class TempDir {
 public:
  explicit TempDir(std::filesystem::path p) : path_(std::move(p)) {
    std::error_code ec;
    std::filesystem::create_directories(path_, ec);
    if (ec) throw IoError(path_.string(), ec.message());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(p.string(), "cannot open for writing");
  return out;
}

void check_written(std::ostream& out, const std::filesystem::path& p) {
  out.flush();
  if (!out) throw IoError(p.string(), "write failed");
}

// Merges `inputs` in (sha, index) order, calling `emit` for every item.
template <class Emit>
void merge_runs(const std::vector<std::filesystem::path>& inputs, Emit&& emit) {
  std::vector<std::unique_ptr<RunReader>> readers;
  std::vector<Item> heads(inputs.size());
  auto greater = [&](std::size_t a, std::size_t b) { return item_less(heads[b], heads[a]); };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(greater)> queue(greater);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    readers.push_back(std::make_unique<RunReader>(inputs[i]));
    if (readers[i]->next(heads[i])) queue.push(i);
  }
  while (!queue.empty()) {
    std::size_t i = queue.top();
    queue.pop();
    emit(heads[i]);
    if (readers[i]->next(heads[i])) queue.push(i);
  }
}

}  // namespace

std::filesystem::path default_examples_path(const std::filesystem::path& output) {
  return output.parent_path() / (output.stem().string() + "_examples.json");
}

std::string ConvertReport::to_json() const {
  auto j = nlohmann::ordered_json::parse(stats.to_json());
  j["files"] = files;
  j["sections"] = sections;
  j["positive"] = positives;
  j["negative"] = negatives;
  if (diagnostics_dropped) j["diagnostics_dropped"] = diagnostics_dropped;
  return j.dump();
}

ConvertReport convert(const ConvertOptions& options, const BuildContext& ctx) {
  const unsigned jobs = std::max(1u, options.jobs);
  const std::size_t chunk = std::max<std::size_t>(1, options.chunk_records);
  const auto examples_path =
      options.examples_output.empty() ? default_examples_path(options.output) : options.examples_output;
  auto temp_parent = options.temp_dir.empty() ? options.output.parent_path() : options.temp_dir;
  if (temp_parent.empty()) temp_parent = ".";
  TempDir tmp(temp_parent / ("." + options.output.filename().string() + ".tmp." + std::to_string(::getpid())));

  AboxRenderer renderer(*ctx.vocabulary, options.abox);
  SampleStream stream(options.input);
  ConvertReport report;

  // Phase 1: sorted runs.
  std::vector<std::filesystem::path> runs;
  std::vector<std::pair<std::size_t, std::string>> lines;
  while (true) {
    lines.clear();
    while (lines.size() < chunk) {
      auto l = stream.next_line();
      if (!l) break;
      lines.push_back(std::move(*l));
    }
    if (lines.empty()) break;

    std::vector<SampleStream::Record> records(lines.size());
    std::vector<ParseDiagnostics> diags(lines.size());
    std::vector<Item> items(lines.size());
    std::vector<BuildStats> partial(jobs);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&](unsigned t) {
      try {
        for (std::size_t i = t; i < lines.size(); i += jobs) {
          records[i] = parse_line(lines[i].first, lines[i].second, &diags[i]);
          if (!records[i].ok()) continue;
          const RawSample& s = records[i].sample();
          PEFileIndividual f = build_individual(s, ctx, &partial[t]);
          Item& it = items[i];
          it.sha = s.sha256;
          it.index = lines[i].first;
          it.label = s.label;
          it.sections = f.sections.size();
          it.text = renderer.render(f);
          it.iri = std::move(f.iri);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    };
    if (jobs == 1) {
      work(0);
    } else {
      std::vector<std::jthread> threads;
      for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(work, t);
    }
    if (failure) std::rethrow_exception(failure);
    for (const auto& p : partial) report.stats += p;

    std::vector<Item> ok;
    ok.reserve(items.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      stream.account(records[i], diags[i]);
      if (records[i].ok()) {
        ok.push_back(std::move(items[i]));
        continue;
      }
      const IngestError& e = records[i].error();
      if (report.diagnostics.size() < options.max_diagnostics) {
        nlohmann::ordered_json d;
        d["line"] = e.line();
        d["error"] = to_string(e.kind());
        d["field"] = e.field();
        d["detail"] = e.what();
        report.diagnostics.push_back(d.dump());
      } else {
        ++report.diagnostics_dropped;
      }
    }
    std::sort(ok.begin(), ok.end(), item_less);
    auto run_path = tmp.path() / ("run" + std::to_string(runs.size()));
    auto out = open_out(run_path);
    for (const auto& it : ok) write_item(out, it);
    check_written(out, run_path);
    runs.push_back(run_path);
  }

  // Reduce the number of runs until one merge pass can take them all.
  std::size_t generation = 0;
  while (runs.size() > kMaxFanIn) {
    std::vector<std::filesystem::path> next;
    for (std::size_t start = 0; start < runs.size(); start += kMaxFanIn) {
      std::vector<std::filesystem::path> group(runs.begin() + static_cast<std::ptrdiff_t>(start),
                                               runs.begin() + static_cast<std::ptrdiff_t>(std::min(runs.size(), start + kMaxFanIn)));
      auto path = tmp.path() / ("merge" + std::to_string(generation) + "_" + std::to_string(next.size()));
      auto out = open_out(path);
      merge_runs(group, [&](const Item& it) { write_item(out, it); });
      check_written(out, path);
      for (const auto& g : group) std::filesystem::remove(g);
      next.push_back(path);
    }
    runs = std::move(next);
    ++generation;
  }

  // Phase 2: final merge with duplicate removal.
  const auto pos_path = tmp.path() / "positive";
  const auto neg_path = tmp.path() / "negative";
  const auto part_path = tmp.path() / "output.part";
  {
    auto out = open_out(part_path);
    auto pos = open_out(pos_path);
    auto neg = open_out(neg_path);
    AboxWriter writer(out, renderer);
    std::string last_sha;
    bool any = false;
    merge_runs(runs, [&](const Item& it) {
      if (any && it.sha == last_sha) {
        ++report.stats.duplicates;
        return;
      }
      any = true;
      last_sha = it.sha;
      writer.write_rendered(it.text);
      ++report.files;
      report.sections += it.sections;
      if (it.label == 1) {
        pos << it.iri << '\n';
        ++report.positives;
      } else if (it.label == 0) {
        neg << it.iri << '\n';
        ++report.negatives;
      }
    });
    check_written(out, part_path);
    check_written(pos, pos_path);
    check_written(neg, neg_path);
  }
  {
    auto ex = open_out(examples_path);
    ExamplesWriter w(ex);
    std::string iri;
    w.begin_positive();
    std::ifstream pos(pos_path, std::ios::binary);
    while (std::getline(pos, iri)) w.add(iri);
    w.begin_negative();
    std::ifstream neg(neg_path, std::ios::binary);
    while (std::getline(neg, iri)) w.add(iri);
    w.finish();
    check_written(ex, examples_path);
  }
  std::error_code ec;
  std::filesystem::rename(part_path, options.output, ec);
  if (ec) {
    std::filesystem::copy_file(part_path, options.output, std::filesystem::copy_options::overwrite_existing, ec);
    if (ec) throw IoError(options.output.string(), ec.message());
  }

  report.ingest = stream.report();
  report.stats.parsed = report.ingest.ok;
  report.stats.skipped = report.ingest.skipped;
  report.stats.clamped_entropies = report.ingest.clamped_entropies;
  return report;
}

}  // namespace peo
