#pragma once

// ABX phonetic discriminability: triphone items, task cells per
// speaker/context condition, per-cell scoring and hierarchical aggregation.
//
// A scoring unit is an unordered pair of centre phones {p, q} inside a cell.
// For the ordered direction (A = p, B = q):
//
//   score(p, q) = mean over a in A_p, b in A_q, x in X_p (x != a) of
//                 1 if d(a, x) < d(b, x), 0.5 if equal, 0 otherwise
//
// where X_p is A_p itself within speaker, or the p-items of the cell's X
// speaker across speakers. The unit error is the mean of 1 - score over the
// directions that have a non-empty X pool.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maub/corpus.hpp"
#include "maub/dtw.hpp"
#include "maub/matrix.hpp"
#include "maub/phoneset.hpp"

namespace maub {

enum class SpeakerMode { kWithin, kAcross };
enum class ContextMode { kWithin, kAny };
enum class SpanMode { kTriphone, kPhoneme };

std::string_view to_string(SpeakerMode m);
std::string_view to_string(ContextMode m);
std::string_view to_string(SpanMode m);
SpeakerMode parse_speaker_mode(std::string_view s);
ContextMode parse_context_mode(std::string_view s);
SpanMode parse_span_mode(std::string_view s);

struct Condition {
  SpeakerMode speaker = SpeakerMode::kWithin;
  ContextMode context = ContextMode::kWithin;
  SpanMode span = SpanMode::kTriphone;

  // Triphone spans with unconstrained context are rejected (kInvalidCondition).
  void validate() const;
  // e.g. "within-speaker/any-context/phoneme"
  std::string name() const;
};

inline constexpr std::string_view kBoundaryLabel = "#";

struct AbxItem {
  std::string file;  // utterance id
  double onset = 0.0;
  double offset = 0.0;
  std::string phone;
  std::string prev;
  std::string next;
  std::string speaker;
};

// One item per non-silence phone occurrence. Utterance edges and silence
// neighbours become kBoundaryLabel. Spans cover the centre phone (phoneme) or
// centre plus its phone neighbours (triphone), snapped outward to the frame
// grid; zero-frame spans are dropped.
std::vector<AbxItem> extract_items(const Corpus& corpus, const CollapsedTable& table, const PhoneRules& rules,
                                   const LabelingOptions& options, SpanMode span);

void write_items(std::ostream& out, std::span<const AbxItem> items);
std::vector<AbxItem> parse_items(std::istream& in);
std::vector<AbxItem> load_items(const std::filesystem::path& path);

struct CellKey {
  std::string context;    // "prev_next" within context, empty for any context
  std::string speaker;    // A/B speaker (all roles within speaker)
  std::string x_speaker;  // X speaker across speakers, empty within

  auto operator<=>(const CellKey&) const = default;
  std::string speaker_key() const { return x_speaker.empty() ? speaker : speaker + ">" + x_speaker; }
};

struct AbxTaskCell {
  CellKey key;
  std::vector<std::string> phones;           // sorted centre phones present in the A/B pool
  std::vector<std::vector<std::size_t>> ab;  // per phone: item indices
  std::vector<std::vector<std::size_t>> x;   // per phone: X pool (equals ab within speaker)
};

struct AbxTask {
  Condition condition;
  std::vector<AbxTaskCell> cells;  // sorted by key
};

AbxTask build_task(std::span<const AbxItem> items, const Condition& condition);

// Distance between two items, addressed by index into the item list.
using DistanceFn = std::function<double(std::size_t, std::size_t)>;

struct PairScore {
  std::size_t first = 0;  // phone indices into the cell, first < second
  std::size_t second = 0;
  double error = 0.0;
  std::uint64_t n_triples = 0;
  int directions = 0;
};

struct CellScore {
  std::vector<PairScore> pairs;
  std::size_t skipped = 0;  // directions without an X pool
};

CellScore score_cell(const AbxTaskCell& cell, const Condition& condition, const DistanceFn& distance);

enum class Aggregation {
  kHierarchical,  // contexts -> speaker cells -> phone pairs -> overall
  kFlat,          // plain mean over all scoring units
};

struct AbxScoreRow {
  std::string level;  // overall / pair / speaker / context
  std::string key;
  double error = 0.0;
  std::uint64_t n_triples = 0;
};

struct AbxScore {
  Condition condition;
  double error = 0.0;
  std::uint64_t n_triples = 0;
  std::size_t n_cells = 0;
  std::size_t n_units = 0;
  std::size_t n_skipped = 0;
  std::vector<AbxScoreRow> rows;
};

// Throws kEmptyInput when no unit could be scored.
AbxScore aggregate_scores(const AbxTask& task, std::span<const CellScore> cells, Aggregation aggregation);

// Cells are scored on up to `jobs` threads; the reduction order is fixed by
// the sorted cell keys so the result does not depend on `jobs`.
AbxScore score_task(const AbxTask& task, const DistanceFn& distance, unsigned jobs = 1,
                    Aggregation aggregation = Aggregation::kHierarchical);

struct AbxOptions {
  FrameMetric metric = FrameMetric::kAngular;
  unsigned jobs = 1;
  Aggregation aggregation = Aggregation::kHierarchical;
};

using RepresentationSet = std::map<std::string, RepresentationMatrix, std::less<>>;

// DTW over the items' frame spans. Throws kMissingRepresentation naming the
// first utterance without a matrix.
AbxScore abx_error(std::span<const AbxItem> items, const RepresentationSet& representations,
                   const Condition& condition, const AbxOptions& options = {});

AbxScore abx_error(const Corpus& corpus, const CollapsedTable& table, const PhoneRules& rules,
                   const LabelingOptions& labeling, const RepresentationSet& representations,
                   const Condition& condition, const AbxOptions& options = {});

// TSV: condition, level, key, error, n_triples.
void write_score_report(std::ostream& out, const AbxScore& score);

}  // namespace maub
