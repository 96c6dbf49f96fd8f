#include "maub/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "maub/error.hpp"
#include "maub/random.hpp"
#include "maub/text.hpp"

namespace maub {

namespace {

// Times come from decimal text; comparisons against thresholds allow this
// much slack so that e.g. 0.7 - 0.2 is not treated as exceeding 0.5.
constexpr double kTimeEps = 1e-9;
// Split budgets compare against sums over many utterances.
constexpr double kBudgetEps = 1e-6;

}  // namespace

Corpus::Corpus(std::vector<Utterance> utterances) : utterances_(std::move(utterances)) {
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    const auto& u = utterances_[i];
    if (!by_id_.emplace(u.id, i).second) throw Error(Errc::kMalformedRow, "duplicate utterance id " + u.id);
    by_speaker_[u.speaker].push_back(i);
    by_language_[u.language].push_back(i);
  }
}

const Utterance* Corpus::find(std::string_view id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &utterances_[it->second];
}

double Corpus::total_duration() const {
  double total = 0.0;
  for (const auto& u : utterances_) total += u.duration();
  return total;
}

namespace {

void finish_utterance(Utterance& utt, std::vector<Utterance>& out) {
  std::stable_sort(utt.segments.begin(), utt.segments.end(),
                   [](const AlignedSegment& a, const AlignedSegment& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < utt.segments.size(); ++i) {
    const auto& prev = utt.segments[i - 1];
    const auto& cur = utt.segments[i];
    if (cur.start < prev.end) {
      throw Error(Errc::kOverlapError, utt.id + ": '" + prev.phone + "' [" + text::format_double(prev.start) +
                                           ", " + text::format_double(prev.end) + ") overlaps '" + cur.phone +
                                           "' starting at " + text::format_double(cur.start));
    }
  }
  out.push_back(std::move(utt));
}

}  // namespace

Corpus parse_alignments(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::kMalformedRow, "alignment file is empty");
  const auto header = text::split(text::chomp(line), '\t');
  const std::vector<std::string_view> expected{"utt_id", "speaker", "language", "start_s", "end_s", "phone"};
  if (header != expected) throw Error(Errc::kMalformedRow, "alignment header must be utt_id/speaker/language/start_s/end_s/phone");

  std::vector<Utterance> utterances;
  std::set<std::string, std::less<>> finished;
  Utterance current;
  bool open = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (row.empty()) continue;
    const auto cells = text::split(row, '\t');
    const auto where = "line " + std::to_string(line_no);
    if (cells.size() != 6) throw Error(Errc::kMalformedRow, where + ": expected 6 columns");
    double start = 0.0;
    double end = 0.0;
    if (!text::parse_double(cells[3], start) || !text::parse_double(cells[4], end) || !std::isfinite(start) ||
        !std::isfinite(end)) {
      throw Error(Errc::kMalformedRow, where + ": non-numeric time");
    }
    if (start < 0.0 || !(start < end)) throw Error(Errc::kMalformedRow, where + ": need 0 <= start < end");

    if (!open || cells[0] != current.id) {
      if (open) {
        finished.insert(current.id);
        finish_utterance(current, utterances);
      }
      if (finished.contains(cells[0])) {
        throw Error(Errc::kMalformedRow, where + ": rows of utterance " + std::string(cells[0]) + " are not contiguous");
      }
      current = Utterance{std::string(cells[0]), std::string(cells[1]), std::string(cells[2]), {}};
      open = true;
    } else if (cells[1] != current.speaker || cells[2] != current.language) {
      throw Error(Errc::kMalformedRow, where + ": speaker/language changes within utterance " + current.id);
    }
    current.segments.push_back({std::string(cells[5]), start, end});
  }
  if (open) finish_utterance(current, utterances);
  return Corpus(std::move(utterances));
}

Corpus load_alignments(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  return parse_alignments(in);
}

void write_alignments(std::ostream& out, const Corpus& corpus) {
  out << "utt_id\tspeaker\tlanguage\tstart_s\tend_s\tphone\n";
  for (const auto& u : corpus.utterances()) {
    for (const auto& s : u.segments) {
      out << u.id << '\t' << u.speaker << '\t' << u.language << '\t' << text::format_double(s.start) << '\t'
          << text::format_double(s.end) << '\t' << s.phone << '\n';
    }
  }
}

void write_alignments(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = text::open_output(path);
  write_alignments(out, corpus);
}

std::set<std::string> default_silence_labels() { return {"", "sil", "sp", "spn-silence"}; }

Corpus filter_corpus(const Corpus& corpus, const FilterRules& rules) {
  std::vector<Utterance> kept;
  for (const auto& u : corpus.utterances()) {
    const bool has_dropped = std::any_of(u.segments.begin(), u.segments.end(),
                                         [&](const AlignedSegment& s) { return s.phone == rules.drop_label; });
    if (has_dropped) continue;
    const bool too_long_phone = std::any_of(u.segments.begin(), u.segments.end(), [&](const AlignedSegment& s) {
      return !rules.silence_labels.contains(s.phone) && s.duration() > rules.max_phone_s + kTimeEps;
    });
    if (too_long_phone) continue;
    const double d = u.duration();
    if (d < rules.min_utt_s - kTimeEps || d > rules.max_utt_s + kTimeEps) continue;
    kept.push_back(u);
  }
  return Corpus(std::move(kept));
}

std::size_t frame_count(double duration, double frame_rate) {
  if (duration <= 0.0) return 0;
  return static_cast<std::size_t>(std::floor(duration * frame_rate + kTimeEps));
}

std::vector<ResolvedSegment> resolve_segments(const Utterance& utt, const CollapsedTable& table,
                                              const PhoneRules& rules, const LabelingOptions& options) {
  std::vector<ResolvedSegment> out;
  out.reserve(utt.segments.size());
  for (const auto& seg : utt.segments) {
    if (options.silence_labels.contains(seg.phone)) {
      out.push_back({kSilenceClass, seg.start, seg.end});
      continue;
    }
    const auto parts = expand_segment(seg.phone, rules);
    const auto timed = split_multiphthong(parts, seg.duration(), options.frame_rate);
    double t = seg.start;
    for (std::size_t i = 0; i < timed.size(); ++i) {
      const auto id = table.find_class(timed[i].segment);
      if (!id) {
        throw Error(Errc::kUnknownSegment, "'" + timed[i].segment + "' (from '" + seg.phone + "') in " + utt.id +
                                               " at " + text::format_double(seg.start) + " s");
      }
      const double end = i + 1 == timed.size() ? seg.end : t + timed[i].duration;
      out.push_back({*id, t, end});
      t = end;
    }
  }
  return out;
}

FrameTargets frame_targets(const Utterance& utt, const CollapsedTable& table, const PhoneRules& rules,
                           const LabelingOptions& options) {
  const auto segments = resolve_segments(utt, table, rules, options);
  const std::size_t n = frame_count(utt.duration(), options.frame_rate);
  const FeatureVector silence(table.feature_count(), FeatureValue::kZero);

  FrameTargets targets;
  targets.phone_class.resize(n, kSilenceClass);
  targets.feature.resize(n, silence);
  targets.silence_mask.resize(n, 1);

  for (std::size_t i = 0; i < n; ++i) {
    const double mid = (static_cast<double>(i) + 0.5) / options.frame_rate;
    auto it = std::upper_bound(segments.begin(), segments.end(), mid,
                               [](double t, const ResolvedSegment& s) { return t < s.start; });
    if (it == segments.begin()) continue;
    --it;
    if (!(mid < it->end) || it->silence()) continue;
    targets.phone_class[i] = it->phone_class;
    targets.feature[i] = table[it->phone_class].vector;
    targets.silence_mask[i] = 0;
  }
  return targets;
}

SplitResult speaker_disjoint_split(const Corpus& corpus, const SplitBudgets& budgets, std::uint64_t seed,
                                   bool strict) {
  std::vector<std::string> speakers;
  std::map<std::string, double> speaker_s;
  for (const auto& [spk, idx] : corpus.by_speaker()) {
    speakers.push_back(spk);
    double total = 0.0;
    for (auto i : idx) total += corpus.utterances()[i].duration();
    speaker_s[spk] = total;
  }
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(speakers));

  const double budget[3] = {budgets.train_s, budgets.valid_s, budgets.test_s};
  SplitResult result;
  std::map<std::string, int> assignment;
  for (const auto& spk : speakers) {
    int target = -1;
    for (int s = 0; s < 3; ++s) {
      if (result.realized_s[s] + kBudgetEps < budget[s]) {
        target = s;
        break;
      }
    }
    if (target < 0) break;
    assignment[spk] = target;
    result.realized_s[target] += speaker_s[spk];
  }

  std::vector<Utterance> parts[3];
  for (const auto& u : corpus.utterances()) {
    const auto it = assignment.find(u.speaker);
    if (it != assignment.end()) parts[it->second].push_back(u);
  }
  result.train = Corpus(std::move(parts[0]));
  result.valid = Corpus(std::move(parts[1]));
  result.test = Corpus(std::move(parts[2]));
  for (int s = 0; s < 3; ++s) {
    const double missing = budget[s] - result.realized_s[s];
    result.shortfall_s[s] = missing > kBudgetEps ? missing : 0.0;
  }

  if (strict && !result.complete()) {
    throw Error(Errc::kInsufficientData,
                "speaker-disjoint budgets not met; shortfall train=" + text::format_double(result.shortfall_s[0]) +
                    " valid=" + text::format_double(result.shortfall_s[1]) +
                    " test=" + text::format_double(result.shortfall_s[2]) + " s");
  }
  return result;
}

}  // namespace maub
