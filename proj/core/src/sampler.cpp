#include "maub/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "maub/error.hpp"
#include "maub/text.hpp"

namespace maub {

double LanguageWeights::weight(const std::string& language) const {
  const auto it = std::lower_bound(languages.begin(), languages.end(), language);
  if (it == languages.end() || *it != language) return 0.0;
  return probabilities[static_cast<std::size_t>(it - languages.begin())];
}

LanguageWeights language_weights(const std::map<std::string, double>& counts, double alpha) {
  if (counts.empty()) throw Error(Errc::kEmptyInput, "no languages");
  if (!(alpha >= 0.0)) throw Error(Errc::kInvalidArgument, "alpha must be >= 0");
  LanguageWeights w;
  w.alpha = alpha;
  double total = 0.0;
  for (const auto& [lang, n] : counts) {
    if (!(n > 0.0)) throw Error(Errc::kInvalidCount, lang + " has count " + text::format_double(n));
    w.languages.push_back(lang);
    w.probabilities.push_back(std::pow(n, alpha));
    total += w.probabilities.back();
  }
  for (auto& p : w.probabilities) p /= total;
  return w;
}

std::map<std::string, double> language_counts(const Corpus& corpus, CountUnit unit) {
  std::map<std::string, double> counts;
  for (const auto& u : corpus.utterances()) counts[u.language] += unit == CountUnit::kUtterances ? 1.0 : u.duration();
  return counts;
}

const std::string& sample_language(const LanguageWeights& weights, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.probabilities.size(); ++i) {
    if (weights.probabilities[i] <= 0.0) continue;
    last_positive = i;
    cumulative += weights.probabilities[i];
    if (u < cumulative) return weights.languages[i];
  }
  return weights.languages[last_positive];
}

Corpus cap_language_hours(const Corpus& corpus, double cap_s, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<char> keep(corpus.size(), 0);
  for (const auto& [lang, indices] : corpus.by_language()) {
    std::vector<std::size_t> order = indices;
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (auto i : order) {
      const double d = corpus.utterances()[i].duration();
      if (total + d > cap_s) break;
      total += d;
      keep[i] = 1;
    }
  }
  std::vector<Utterance> kept;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (keep[i]) kept.push_back(corpus.utterances()[i]);
  }
  return Corpus(std::move(kept));
}

std::vector<LengthBucket> length_buckets(const Corpus& corpus, std::size_t n_buckets) {
  const std::size_t n = corpus.size();
  if (n_buckets == 0 || n_buckets > n) {
    throw Error(Errc::kInvalidArgument, "need 1 <= buckets <= " + std::to_string(n) + ", got " + std::to_string(n_buckets));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& utts = corpus.utterances();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (utts[a].duration() != utts[b].duration()) return utts[a].duration() < utts[b].duration();
    return utts[a].id < utts[b].id;
  });

  std::vector<LengthBucket> buckets(n_buckets);
  std::size_t pos = 0;
  for (std::size_t b = 0; b < n_buckets; ++b) {
    const std::size_t size = n / n_buckets + (b < n % n_buckets ? 1 : 0);
    auto& bucket = buckets[b];
    bucket.members.assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                          order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    bucket.min_s = utts[bucket.members.front()].duration();
    bucket.max_s = utts[bucket.members.back()].duration();
    pos += size;
  }
  return buckets;
}

void write_sampling_plan(std::ostream& out, const std::map<std::string, double>& counts,
                         const LanguageWeights& weights) {
  out << "language\tcount\tweight\n";
  for (std::size_t i = 0; i < weights.languages.size(); ++i) {
    const auto& lang = weights.languages[i];
    out << lang << '\t' << text::format_double(counts.at(lang)) << '\t'
        << text::format_fixed(weights.probabilities[i], 12) << '\n';
  }
}

void write_bucket_manifest(std::ostream& out, const Corpus& corpus, const std::vector<LengthBucket>& buckets) {
  std::vector<std::size_t> bucket_of(corpus.size());
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    for (auto i : buckets[b].members) bucket_of[i] = b;
  }
  out << "utt_id\tbucket\n";
  for (std::size_t i = 0; i < corpus.size(); ++i) out << corpus.utterances()[i].id << '\t' << bucket_of[i] << '\n';
}

}  // namespace maub
