#pragma once

// Per-label histograms of section entropy and import counts.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "peo/ember.hpp"

namespace peo {

enum class Metric { Entropy, Imports };

/// Bins are [k*w, (k+1)*w) evaluated in double arithmetic. Unlabeled
/// samples are not counted.
class Histogram {
 public:
  /// Throws std::invalid_argument unless bin_width > 0 (>= 1 for imports).
  Histogram(Metric metric, double bin_width);

  void add(int label, double value);
  /// Adds every value of `other`; widths and metrics must match.
  void merge(const Histogram& other);

  Metric metric() const noexcept { return metric_; }
  double bin_width() const noexcept { return width_; }
  /// Number of bins from 0 through the highest non-empty bin.
  std::size_t bins() const noexcept { return counts_.size(); }
  /// Count in bin k for label 0 (benign) or 1 (malware).
  std::uint64_t count(std::size_t bin, int label) const;
  std::uint64_t total(int label) const;
  /// Bin k holds start(k) <= value < start(k+1), where start(k) is k * width
  /// rounded to the decimals of width (the value printed in the CSV).
  static std::size_t bin_of(double value, double width);

  /// `bin_start,benign_count,malware_count`, one row per bin from 0.
  std::string to_csv() const;

  bool operator==(const Histogram&) const = default;

 private:
  Metric metric_;
  double width_;
  std::vector<std::array<std::uint64_t, 2>> counts_;
};

/// One count per section of each labeled sample.
Histogram entropy_histogram(std::span<const RawSample> samples, double bin_width);
/// One count per labeled sample, over general.imports.
Histogram imports_histogram(std::span<const RawSample> samples, std::uint64_t bin_width);

/// Share of values past the threshold per label: entropy strictly above,
/// imports strictly below.
struct ThresholdReport {
  Metric metric = Metric::Entropy;
  double threshold = 0.0;
  std::array<std::uint64_t, 2> total{};
  std::array<std::uint64_t, 2> hits{};

  void add(int label, double value);
  double fraction(int label) const;
  std::string to_json() const;
};

struct StatsRun {
  Histogram histogram;
  ThresholdReport report;
  IngestReport ingest;
};

/// Streams a JSON-Lines file once. Entropy threshold 7.0 or imports
/// threshold 10 unless overridden.
StatsRun compute_stats(const std::filesystem::path& input, Metric metric, double bin_width, double threshold);

}  // namespace peo
