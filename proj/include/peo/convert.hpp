#pragma once

// Streaming JSON-Lines to ABox conversion with bounded memory: records are
// processed in chunks, each chunk is written as a run sorted by sha256, and
// the runs are merged into the final document.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "peo/ember.hpp"
#include "peo/kb.hpp"
#include "peo/rdf_emit.hpp"

namespace peo {

struct ConvertOptions {
  std::filesystem::path input;
  std::filesystem::path output;
  /// Defaults to `<output stem>_examples.json` beside the output.
  std::filesystem::path examples_output;
  /// Defaults to the output directory.
  std::filesystem::path temp_dir;
  AboxOptions abox;
  unsigned jobs = 1;
  std::size_t chunk_records = 4096;
  /// Skipped-record diagnostics kept in the report; the rest are only counted.
  std::size_t max_diagnostics = 100;
};

struct ConvertReport {
  BuildStats stats;
  IngestReport ingest;
  std::size_t files = 0;
  std::size_t sections = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  /// One JSON object per skipped record: line, error, field, detail.
  std::vector<std::string> diagnostics;
  std::size_t diagnostics_dropped = 0;

  std::string to_json() const;
};

std::filesystem::path default_examples_path(const std::filesystem::path& output);

/// Output bytes depend only on the input, the options and the context, never
/// on `jobs` or `chunk_records`. Throws IoError.
ConvertReport convert(const ConvertOptions& options, const BuildContext& ctx);

}  // namespace peo
