#include "maub/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "maub/error.hpp"
#include "maub/text.hpp"

namespace maub {

MetricReport& MetricReport::operator+=(const MetricReport& other) {
  numerator += other.numerator;
  denominator += other.denominator;
  recompute();
  return *this;
}

MetricReport feature_accuracy(std::span<const FeatureVector> predicted, std::span<const FeatureVector> gold) {
  if (predicted.size() != gold.size()) throw Error(Errc::kDimensionMismatch, "frame counts differ");
  MetricReport r{"feature_accuracy", 0.0, 0, 0};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predicted[i].size() != gold[i].size()) throw Error(Errc::kDimensionMismatch, "vector widths differ");
    for (std::size_t f = 0; f < gold[i].size(); ++f) {
      if (gold[i][f] == FeatureValue::kZero) continue;
      ++r.denominator;
      if (predicted[i][f] == gold[i][f]) ++r.numerator;
    }
  }
  if (r.denominator == 0) throw Error(Errc::kAllZeroTargets, "every gold feature is zero");
  r.recompute();
  return r;
}

MetricReport phone_accuracy(std::span<const ClassId> predicted, std::span<const ClassId> gold,
                            std::span<const std::uint8_t> silence_mask) {
  if (predicted.size() != gold.size() || silence_mask.size() != gold.size()) {
    throw Error(Errc::kDimensionMismatch, "frame counts differ");
  }
  MetricReport r{"phone_accuracy", 0.0, 0, 0};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (silence_mask[i]) continue;
    ++r.denominator;
    if (predicted[i] == gold[i]) ++r.numerator;
  }
  if (r.denominator == 0) throw Error(Errc::kAllMasked, "every frame is masked");
  r.recompute();
  return r;
}

std::vector<ClassId> collapse_frames(std::span<const ClassId> labels, std::span<const std::uint8_t> silence_mask) {
  std::vector<ClassId> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!silence_mask.empty() && silence_mask[i]) continue;
    if (out.empty() || out.back() != labels[i]) out.push_back(labels[i]);
  }
  return out;
}

std::size_t edit_distance(std::span<const ClassId> a, std::span<const ClassId> b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

MetricReport per(std::span<const ClassId> predicted, std::span<const ClassId> gold) {
  if (gold.empty()) throw Error(Errc::kEmptyReference, "PER needs a non-empty reference");
  MetricReport r{"per", 0.0, edit_distance(predicted, gold), gold.size()};
  r.recompute();
  return r;
}

std::vector<FeatureVector> phones_to_features(std::span<const ClassId> phones, const CollapsedTable& table) {
  std::vector<FeatureVector> out;
  out.reserve(phones.size());
  for (auto c : phones) {
    if (c < 0 || static_cast<std::size_t>(c) >= table.size()) {
      throw Error(Errc::kInvalidArgument, "class " + std::to_string(c) + " outside the table");
    }
    out.push_back(table[c].vector);
  }
  return out;
}

void write_metrics_header(std::ostream& out) { out << "metric\tsplit\tlanguage\tvalue\tnumerator\tdenominator\n"; }

void write_metric_row(std::ostream& out, const MetricReport& report, const std::string& split,
                      const std::string& language) {
  out << report.name << '\t' << split << '\t' << language << '\t' << text::format_fixed(report.value, 6) << '\t'
      << report.numerator << '\t' << report.denominator << '\n';
}

}  // namespace maub
