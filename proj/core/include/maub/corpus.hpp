#pragma once

// Phone alignments: loading, Appendix-style filtering, frame-level targets and
// speaker-disjoint splits.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "maub/phoneset.hpp"

namespace maub {

struct AlignedSegment {
  std::string phone;
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
};

struct Utterance {
  std::string id;
  std::string speaker;
  std::string language;
  std::vector<AlignedSegment> segments;  // sorted, non-overlapping

  double duration() const { return segments.empty() ? 0.0 : segments.back().end; }
};

class Corpus {
 public:
  Corpus() = default;
  // Throws kMalformedRow on duplicate utterance ids.
  explicit Corpus(std::vector<Utterance> utterances);

  const std::vector<Utterance>& utterances() const { return utterances_; }
  std::size_t size() const { return utterances_.size(); }
  bool empty() const { return utterances_.empty(); }

  const Utterance* find(std::string_view id) const;

  // Indices into utterances(), keyed by speaker / language.
  const std::map<std::string, std::vector<std::size_t>>& by_speaker() const { return by_speaker_; }
  const std::map<std::string, std::vector<std::size_t>>& by_language() const { return by_language_; }

  double total_duration() const;

 private:
  std::vector<Utterance> utterances_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  std::map<std::string, std::vector<std::size_t>> by_speaker_;
  std::map<std::string, std::vector<std::size_t>> by_language_;
};

// TSV with header utt_id, speaker, language, start_s, end_s, phone. Rows of an
// utterance are contiguous. Throws kMalformedRow, kOverlapError.
Corpus parse_alignments(std::istream& in);
Corpus load_alignments(const std::filesystem::path& path);
void write_alignments(std::ostream& out, const Corpus& corpus);
void write_alignments(const Corpus& corpus, const std::filesystem::path& path);

std::set<std::string> default_silence_labels();

struct FilterRules {
  std::string drop_label = "spn";
  double max_phone_s = 0.5;
  double min_utt_s = 2.0;
  double max_utt_s = 20.0;  // bounds inclusive
  std::set<std::string> silence_labels = default_silence_labels();
};

Corpus filter_corpus(const Corpus& corpus, const FilterRules& rules);

// Shared by frame targets and ABX item extraction.
struct LabelingOptions {
  double frame_rate = 50.0;
  std::set<std::string> silence_labels = default_silence_labels();
};

std::size_t frame_count(double duration, double frame_rate);

// An utterance segment after normalization and multiphthong splitting.
struct ResolvedSegment {
  ClassId phone_class = kSilenceClass;  // kSilenceClass for silence
  double start = 0.0;
  double end = 0.0;

  bool silence() const { return phone_class == kSilenceClass; }
};

// Throws kUnknownSegment naming the utterance and time.
std::vector<ResolvedSegment> resolve_segments(const Utterance& utt, const CollapsedTable& table,
                                              const PhoneRules& rules, const LabelingOptions& options);

struct FrameTargets {
  std::vector<ClassId> phone_class;  // kSilenceClass on silence frames
  std::vector<FeatureVector> feature;  // all-zero on silence frames
  std::vector<std::uint8_t> silence_mask;

  std::size_t size() const { return phone_class.size(); }
};

// Frame i takes the label of the segment covering (i + 0.5) / frame_rate;
// frames in gaps count as silence.
FrameTargets frame_targets(const Utterance& utt, const CollapsedTable& table, const PhoneRules& rules,
                           const LabelingOptions& options);

struct SplitBudgets {
  double train_s = 0.0;
  double valid_s = 0.0;
  double test_s = 0.0;
};

struct SplitResult {
  Corpus train;
  Corpus valid;
  Corpus test;
  double realized_s[3] = {0.0, 0.0, 0.0};
  double shortfall_s[3] = {0.0, 0.0, 0.0};

  bool complete() const { return shortfall_s[0] <= 0.0 && shortfall_s[1] <= 0.0 && shortfall_s[2] <= 0.0; }
};

// Speakers (sorted, then shuffled by seed) are dealt greedily to the first
// split whose budget is still unmet. With strict = true an unmet budget throws
// kInsufficientData; otherwise the shortfall is reported in the result.
SplitResult speaker_disjoint_split(const Corpus& corpus, const SplitBudgets& budgets, std::uint64_t seed,
                                   bool strict = true);

}  // namespace maub
