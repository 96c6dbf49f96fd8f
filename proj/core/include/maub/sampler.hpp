#pragma once

// Multilingual balancing: up-sampling weights, per-language caps and length
// buckets.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "maub/corpus.hpp"
#include "maub/random.hpp"

namespace maub {

struct LanguageWeights {
  std::vector<std::string> languages;  // sorted
  std::vector<double> probabilities;
  double alpha = 1.0;

  double weight(const std::string& language) const;
};

// p_l = n_l^alpha / sum_m n_m^alpha, which equals the (n_l / N)^alpha form
// with N cancelled. Throws kInvalidCount, kInvalidArgument (alpha < 0),
// kEmptyInput.
LanguageWeights language_weights(const std::map<std::string, double>& counts, double alpha);

enum class CountUnit { kUtterances, kSeconds };

std::map<std::string, double> language_counts(const Corpus& corpus, CountUnit unit = CountUnit::kUtterances);

// Inverse-CDF draw over languages in sorted order.
const std::string& sample_language(const LanguageWeights& weights, Rng& rng);

// Per language (sorted), a seeded shuffle of its utterances is walked and
// utterances are kept while the running total stays within cap_s; the first
// one that would exceed it ends the walk. Kept utterances retain corpus order.
Corpus cap_language_hours(const Corpus& corpus, double cap_s, std::uint64_t seed);

struct LengthBucket {
  std::vector<std::size_t> members;  // indices into the corpus
  double min_s = 0.0;
  double max_s = 0.0;

  double ratio() const { return min_s > 0.0 ? max_s / min_s : 0.0; }
};

// Sorted by (duration, id) and cut into n contiguous groups whose sizes
// differ by at most one, larger groups first. Throws kInvalidArgument unless
// 1 <= n <= corpus size.
std::vector<LengthBucket> length_buckets(const Corpus& corpus, std::size_t n_buckets);

void write_sampling_plan(std::ostream& out, const std::map<std::string, double>& counts,
                         const LanguageWeights& weights);
void write_bucket_manifest(std::ostream& out, const Corpus& corpus, const std::vector<LengthBucket>& buckets);

}  // namespace maub
