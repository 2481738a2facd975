#pragma once

// Model and reader for EMBER-style static-analysis records (one JSON object
// per line). Only the blocks used by the ontology are retained; histogram
// style arrays are ignored.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "peo/error.hpp"

namespace peo {

struct GeneralInfo {
  std::uint64_t size = 0;
  std::uint64_t vsize = 0;
  bool has_debug = false;
  bool has_relocations = false;
  bool has_resources = false;
  bool has_signature = false;
  bool has_tls = false;
  std::uint64_t exports = 0;
  std::uint64_t imports = 0;
  std::uint64_t symbols = 0;

  bool operator==(const GeneralInfo&) const = default;
};

struct StringStats {
  std::uint64_t numstrings = 0;
  std::uint64_t printables = 0;
  double avlength = 0.0;
  double entropy = 0.0;
  std::uint64_t paths = 0;
  std::uint64_t urls = 0;
  std::uint64_t registry = 0;
  std::uint64_t mz = 0;

  bool operator==(const StringStats&) const = default;
};

struct HeaderInfo {
  std::int64_t coff_timestamp = 0;
  // Kept as opaque text; some extractors emit odd spellings.
  std::string coff_machine;
  std::vector<std::string> coff_characteristics;
  std::string optional_subsystem;
  std::string optional_magic;
  std::vector<std::string> dll_characteristics;

  bool operator==(const HeaderInfo&) const = default;
};

struct SectionEntry {
  std::string name;
  std::uint64_t size = 0;
  std::uint64_t vsize = 0;
  double entropy = 0.0;  // clamped to [0, 8]
  std::vector<std::string> props;

  bool has_prop(std::string_view prop) const;
  bool operator==(const SectionEntry&) const = default;
};

struct SectionTable {
  std::string entry;
  std::vector<SectionEntry> sections;

  /// Section named by `entry`, if any.
  const SectionEntry* entry_section() const;
  bool operator==(const SectionTable&) const = default;
};

struct DataDirectoryEntry {
  std::string name;
  std::uint64_t virtual_address = 0;
  std::optional<std::uint64_t> size;

  bool operator==(const DataDirectoryEntry&) const = default;
};

using ImportTable = std::map<std::string, std::vector<std::string>>;

struct RawSample {
  std::string sha256;
  std::optional<std::string> md5;
  std::optional<std::string> appeared;
  int label = -1;  // -1 unlabeled, 0 benign, 1 malware
  std::optional<std::string> avclass;
  GeneralInfo general;
  StringStats strings;
  HeaderInfo header;
  SectionTable section;
  ImportTable imports;
  std::vector<std::string> exports;
  std::vector<DataDirectoryEntry> datadirectories;

  bool operator==(const RawSample&) const = default;
};

/// Non-fatal observations made while parsing one record.
struct ParseDiagnostics {
  std::size_t clamped_entropies = 0;
};

/// Parses one JSON object. Throws IngestError tagged with `line_number`.
RawSample parse_sample(std::string_view line, std::size_t line_number = 1,
                       ParseDiagnostics* diagnostics = nullptr);

/// Serializes the retained fields as compact JSON with sorted keys.
/// parse_sample(to_canonical_json(s)) == s.
std::string to_canonical_json(const RawSample& sample);

struct IngestReport {
  std::size_t ok = 0;
  std::size_t skipped = 0;
  std::size_t clamped_entropies = 0;

  /// `{"ok":N,"skipped":M}`
  std::string to_json() const;
};

/// Lazily reads a JSON-Lines file one record at a time. Every physical line
/// produces exactly one record, either a sample or the error that rejected it.
class SampleStream {
 public:
  struct Record {
    std::size_t index = 0;  // 1-based line number
    std::string line;       // verbatim text, without the line terminator
    std::variant<RawSample, IngestError> result;

    bool ok() const { return std::holds_alternative<RawSample>(result); }
    const RawSample& sample() const { return std::get<RawSample>(result); }
    const IngestError& error() const { return std::get<IngestError>(result); }
  };

  /// Throws IoError when the file cannot be opened.
  explicit SampleStream(const std::filesystem::path& path);

  /// Next record, or nullopt at end of file.
  std::optional<Record> next();

  /// Reads the next raw line without parsing it. Used by callers that parse
  /// in parallel; pair with `parse_record`.
  std::optional<std::pair<std::size_t, std::string>> next_line();

  /// Parses a line previously returned by next_line and updates the report.
  /// Not thread-safe with respect to the report; see `parse_line`.
  Record parse_record(std::size_t index, std::string line);

  /// Records a parse outcome produced elsewhere (e.g. on a worker thread).
  void account(const Record& record, const ParseDiagnostics& diagnostics);

  const IngestReport& report() const noexcept { return report_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
  IngestReport report_;
};

/// Thread-safe, report-free variant of SampleStream::parse_record.
SampleStream::Record parse_line(std::size_t index, std::string line, ParseDiagnostics* diagnostics);

}  // namespace peo
