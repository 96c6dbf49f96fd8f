#pragma once

// Phonetic inventory discovery from the frequency distribution of discrete
// feature vectors, and its evaluation against a gold phone set.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maub/phoneset.hpp"

namespace maub {

struct FrequencyDistribution {
  std::map<FeatureVector, std::uint64_t> counts;
  std::uint64_t total = 0;

  // Count descending, ties by the + < 0 < - order.
  std::vector<std::pair<FeatureVector, std::uint64_t>> ranked() const;
};

// Throws kEmptyInput, kDimensionMismatch.
FrequencyDistribution feature_vector_frequencies(std::span<const FeatureVector> frame_vectors);

struct VectorMapping {
  FeatureVector vector;
  std::uint64_t count = 0;
  ClassId phone_class = 0;
  bool exact = false;  // false: nearest class by l1 with the codebook tie chain
};

// In ranked order.
std::vector<VectorMapping> vectors_to_phones(const FrequencyDistribution& dist, const CollapsedTable& table);

struct InventoryRule {
  enum class Kind { kTopK, kMinCount };
  Kind kind = Kind::kTopK;
  std::uint64_t value = 100;

  static InventoryRule top_k(std::uint64_t k) { return {Kind::kTopK, k}; }
  static InventoryRule min_count(std::uint64_t c) { return {Kind::kMinCount, c}; }
  std::string name() const;
};

struct InventoryPrediction {
  std::set<std::string> phones;  // class representatives
  InventoryRule rule;
  std::vector<VectorMapping> kept;
};

InventoryPrediction predict_inventory(const FrequencyDistribution& dist, const CollapsedTable& table,
                                      const InventoryRule& rule);

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // Set when the ratio had a zero denominator against a non-empty other
  // side; the value is then reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

double f1_score(double precision, double recall);

PRF evaluate_inventory(const std::set<std::string>& predicted, const std::set<std::string>& gold);

struct ThresholdResult {
  std::uint64_t min_count = 0;
  PRF prf;
  InventoryPrediction prediction;
};

// Scans every distinct count (plus max + 1, the empty inventory) as a
// min-count threshold and keeps the best F1; ties go to the larger threshold.
// Throws kEmptyGold.
ThresholdResult f1_optimal_threshold(const FrequencyDistribution& dist, const CollapsedTable& table,
                                     const std::set<std::string>& gold);

// One segment per line; each is normalized and mapped to its class
// representative.
std::set<std::string> load_gold_inventory(const std::filesystem::path& path, const CollapsedTable& table,
                                          const PhoneRules& rules);

// TSV `phone, count, in_gold` rows followed by a `# key=value ...` summary.
void write_inventory_report(std::ostream& out, const InventoryPrediction& prediction, const CollapsedTable& table,
                            const std::set<std::string>& gold, const PRF& prf);

}  // namespace maub
