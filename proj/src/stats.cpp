#include "peo/stats.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "json.hpp"
#include "peo/turtle.hpp"

namespace peo {

Histogram::Histogram(Metric metric, double bin_width) : metric_(metric), width_(bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw std::invalid_argument("bin width must be positive");
  if (metric == Metric::Imports && (bin_width < 1.0 || bin_width != std::floor(bin_width)))
    throw std::invalid_argument("imports bin width must be a positive integer");
}

namespace {

// Decimals in the shortest text of `width`; -1 when it needs an exponent.
int width_decimals(double width) {
  std::string w = format_double(width);
  if (w.find_first_of("eE") != std::string::npos) return -1;
  auto dot = w.find('.');
  if (dot == std::string::npos || w.substr(dot + 1) == "0") return 0;
  return static_cast<int>(w.size() - dot - 1);
}

std::string start_text(std::size_t k, double width, int decimals) {
  char buf[64];
  if (decimals < 0) std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(k) * width);
  else std::snprintf(buf, sizeof buf, "%.*f", decimals, static_cast<double>(k) * width);
  return buf;
}

// Bin starts are the decimal values printed in the CSV, so 0.3 falls in the
// bin labelled 0.3 even though 3 * 0.1 > 0.3 in binary.
double bin_start(std::size_t k, double width, int decimals) {
  if (decimals < 0) return static_cast<double>(k) * width;
  return std::strtod(start_text(k, width, decimals).c_str(), nullptr);
}

}  // namespace

std::size_t Histogram::bin_of(double value, double width) {
  if (!(value > 0.0)) return 0;
  const int d = width_decimals(width);
  auto k = static_cast<std::size_t>(std::floor(value / width));
  while (bin_start(k + 1, width, d) <= value) ++k;
  while (k > 0 && bin_start(k, width, d) > value) --k;
  return k;
}

void Histogram::add(int label, double value) {
  if (label != 0 && label != 1) return;
  std::size_t k = bin_of(value, width_);
  if (k >= counts_.size()) counts_.resize(k + 1, {0, 0});
  ++counts_[k][static_cast<std::size_t>(label)];
}

void Histogram::merge(const Histogram& other) {
  if (other.metric_ != metric_ || other.width_ != width_) throw std::invalid_argument("histogram shapes differ");
  if (other.counts_.size() > counts_.size()) counts_.resize(other.counts_.size(), {0, 0});
  for (std::size_t k = 0; k < other.counts_.size(); ++k) {
    counts_[k][0] += other.counts_[k][0];
    counts_[k][1] += other.counts_[k][1];
  }
}

std::uint64_t Histogram::count(std::size_t bin, int label) const {
  if (bin >= counts_.size() || (label != 0 && label != 1)) return 0;
  return counts_[bin][static_cast<std::size_t>(label)];
}

std::uint64_t Histogram::total(int label) const {
  std::uint64_t n = 0;
  for (std::size_t k = 0; k < counts_.size(); ++k) n += count(k, label);
  return n;
}

std::string Histogram::to_csv() const {
  const int d = width_decimals(width_);
  std::string out = "bin_start,benign_count,malware_count\n";
  for (std::size_t k = 0; k < counts_.size(); ++k)
    out += start_text(k, width_, d) + "," + std::to_string(counts_[k][0]) + "," + std::to_string(counts_[k][1]) + "\n";
  return out;
}

Histogram entropy_histogram(std::span<const RawSample> samples, double bin_width) {
  Histogram h(Metric::Entropy, bin_width);
  for (const auto& s : samples)
    for (const auto& sec : s.section.sections) h.add(s.label, sec.entropy);
  return h;
}

Histogram imports_histogram(std::span<const RawSample> samples, std::uint64_t bin_width) {
  Histogram h(Metric::Imports, static_cast<double>(bin_width));
  for (const auto& s : samples) h.add(s.label, static_cast<double>(s.general.imports));
  return h;
}

void ThresholdReport::add(int label, double value) {
  if (label != 0 && label != 1) return;
  auto l = static_cast<std::size_t>(label);
  ++total[l];
  bool hit = metric == Metric::Entropy ? value > threshold : value < threshold;
  if (hit) ++hits[l];
}

double ThresholdReport::fraction(int label) const {
  auto l = static_cast<std::size_t>(label);
  return total[l] == 0 ? 0.0 : static_cast<double>(hits[l]) / static_cast<double>(total[l]);
}

std::string ThresholdReport::to_json() const {
  nlohmann::ordered_json j;
  j["metric"] = metric == Metric::Entropy ? "entropy" : "imports";
  j["threshold"] = threshold;
  j["comparison"] = metric == Metric::Entropy ? ">" : "<";
  for (auto [name, label] : {std::pair{"benign", 0}, std::pair{"malware", 1}}) {
    auto l = static_cast<std::size_t>(label);
    j[name] = {{"total", total[l]}, {"matching", hits[l]}, {"fraction", fraction(label)}};
  }
  return j.dump();
}

StatsRun compute_stats(const std::filesystem::path& input, Metric metric, double bin_width, double threshold) {
  StatsRun run{Histogram(metric, bin_width), ThresholdReport{metric, threshold, {}, {}}, {}};
  SampleStream stream(input);
  while (auto rec = stream.next()) {
    if (!rec->ok()) continue;
    const RawSample& s = rec->sample();
    if (metric == Metric::Entropy) {
      for (const auto& sec : s.section.sections) {
        run.histogram.add(s.label, sec.entropy);
        run.report.add(s.label, sec.entropy);
      }
    } else {
      auto v = static_cast<double>(s.general.imports);
      run.histogram.add(s.label, v);
      run.report.add(s.label, v);
    }
  }
  run.ingest = stream.report();
  return run;
}

}  // namespace peo
