#pragma once

// Frame-wise feature and phone accuracy, and phone error rate.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "maub/phoneset.hpp"

namespace maub {

struct MetricReport {
  std::string name;
  double value = 0.0;
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 0;

  MetricReport& operator+=(const MetricReport& other);
  void recompute() {
    value = denominator ? static_cast<double>(numerator) / static_cast<double>(denominator) : 0.0;
  }
};

// Counted over (frame, feature) positions whose gold value is non-zero.
// Throws kDimensionMismatch, kAllZeroTargets.
MetricReport feature_accuracy(std::span<const FeatureVector> predicted, std::span<const FeatureVector> gold);

// Over frames whose mask is 0. Throws kDimensionMismatch, kAllMasked.
MetricReport phone_accuracy(std::span<const ClassId> predicted, std::span<const ClassId> gold,
                            std::span<const std::uint8_t> silence_mask);

// Drops masked frames, then merges runs of identical labels.
std::vector<ClassId> collapse_frames(std::span<const ClassId> labels, std::span<const std::uint8_t> silence_mask);

// Levenshtein distance with unit costs.
std::size_t edit_distance(std::span<const ClassId> a, std::span<const ClassId> b);

// edits / |gold|; can exceed 1. Throws kEmptyReference.
MetricReport per(std::span<const ClassId> predicted, std::span<const ClassId> gold);

std::vector<FeatureVector> phones_to_features(std::span<const ClassId> phones, const CollapsedTable& table);

// TSV: metric, split, language, value, numerator, denominator.
void write_metrics_header(std::ostream& out);
void write_metric_row(std::ostream& out, const MetricReport& report, const std::string& split,
                      const std::string& language);

}  // namespace maub
