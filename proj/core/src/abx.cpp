#include "maub/abx.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "maub/error.hpp"
#include "maub/parallel.hpp"
#include "maub/text.hpp"

namespace maub {

std::string_view to_string(SpeakerMode m) { return m == SpeakerMode::kWithin ? "within" : "across"; }
std::string_view to_string(ContextMode m) { return m == ContextMode::kWithin ? "within" : "any"; }
std::string_view to_string(SpanMode m) { return m == SpanMode::kTriphone ? "triphone" : "phoneme"; }

SpeakerMode parse_speaker_mode(std::string_view s) {
  if (s == "within") return SpeakerMode::kWithin;
  if (s == "across") return SpeakerMode::kAcross;
  throw Error(Errc::kInvalidCondition, "speaker mode must be within|across, got '" + std::string(s) + "'");
}

ContextMode parse_context_mode(std::string_view s) {
  if (s == "within") return ContextMode::kWithin;
  if (s == "any") return ContextMode::kAny;
  throw Error(Errc::kInvalidCondition, "context mode must be within|any, got '" + std::string(s) + "'");
}

SpanMode parse_span_mode(std::string_view s) {
  if (s == "triphone") return SpanMode::kTriphone;
  if (s == "phoneme") return SpanMode::kPhoneme;
  throw Error(Errc::kInvalidCondition, "span must be triphone|phoneme, got '" + std::string(s) + "'");
}

void Condition::validate() const {
  if (span == SpanMode::kTriphone && context == ContextMode::kAny) {
    throw Error(Errc::kInvalidCondition, "triphone span requires within-context evaluation");
  }
}

std::string Condition::name() const {
  return std::string(to_string(speaker)) + "-speaker/" + std::string(to_string(context)) + "-context/" +
         std::string(to_string(span));
}

// ---------------------------------------------------------------------------
// Items

namespace {

constexpr double kSnapEps = 1e-9;

std::int64_t first_frame(double onset, double frame_rate) {
  return static_cast<std::int64_t>(std::floor(onset * frame_rate + kSnapEps));
}

std::int64_t end_frame(double offset, double frame_rate) {
  return static_cast<std::int64_t>(std::ceil(offset * frame_rate - kSnapEps));
}

}  // namespace

std::vector<AbxItem> extract_items(const Corpus& corpus, const CollapsedTable& table, const PhoneRules& rules,
                                   const LabelingOptions& options, SpanMode span) {
  std::vector<AbxItem> items;
  const double fps = options.frame_rate;
  for (const auto& utt : corpus.utterances()) {
    const auto segs = resolve_segments(utt, table, rules, options);
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const auto& center = segs[k];
      if (center.silence()) continue;
      const ResolvedSegment* prev = k > 0 && !segs[k - 1].silence() ? &segs[k - 1] : nullptr;
      const ResolvedSegment* next = k + 1 < segs.size() && !segs[k + 1].silence() ? &segs[k + 1] : nullptr;

      double onset = center.start;
      double offset = center.end;
      if (span == SpanMode::kTriphone) {
        if (prev) onset = prev->start;
        if (next) offset = next->end;
      }
      const auto begin = first_frame(onset, fps);
      const auto end = end_frame(offset, fps);
      if (end <= begin) continue;

      items.push_back({utt.id, static_cast<double>(begin) / fps, static_cast<double>(end) / fps,
                       table[center.phone_class].representative,
                       prev ? table[prev->phone_class].representative : std::string(kBoundaryLabel),
                       next ? table[next->phone_class].representative : std::string(kBoundaryLabel), utt.speaker});
    }
  }
  return items;
}

void write_items(std::ostream& out, std::span<const AbxItem> items) {
  out << "#file onset offset #phone prev-phone next-phone speaker\n";
  for (const auto& it : items) {
    out << it.file << ' ' << text::format_double(it.onset) << ' ' << text::format_double(it.offset) << ' '
        << it.phone << ' ' << it.prev << ' ' << it.next << ' ' << it.speaker << '\n';
  }
}

std::vector<AbxItem> parse_items(std::istream& in) {
  std::vector<AbxItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (row.empty() || row.starts_with("#file")) continue;
    std::istringstream fields{std::string(row)};
    AbxItem item;
    std::string onset;
    std::string offset;
    if (!(fields >> item.file >> onset >> offset >> item.phone >> item.prev >> item.next >> item.speaker) ||
        !text::parse_double(onset, item.onset) || !text::parse_double(offset, item.offset) ||
        !(item.onset < item.offset)) {
      throw Error(Errc::kMalformedRow, "item file line " + std::to_string(line_no));
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<AbxItem> load_items(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  return parse_items(in);
}

// ---------------------------------------------------------------------------
// Task construction

namespace {

using PhoneMap = std::map<std::string, std::vector<std::size_t>>;

void add_cell(std::vector<AbxTaskCell>& cells, CellKey key, const PhoneMap& ab, const PhoneMap* x) {
  if (ab.size() < 2) return;
  AbxTaskCell cell;
  cell.key = std::move(key);
  bool any_x = x == nullptr;
  for (const auto& [phone, idx] : ab) {
    cell.phones.push_back(phone);
    cell.ab.push_back(idx);
    if (x) {
      const auto it = x->find(phone);
      cell.x.push_back(it == x->end() ? std::vector<std::size_t>{} : it->second);
      any_x = any_x || !cell.x.back().empty();
    } else {
      cell.x.push_back(idx);
    }
  }
  if (any_x) cells.push_back(std::move(cell));
}

}  // namespace

AbxTask build_task(std::span<const AbxItem> items, const Condition& condition) {
  condition.validate();
  // context -> speaker -> phone -> items
  std::map<std::string, std::map<std::string, PhoneMap>> groups;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    std::string context = condition.context == ContextMode::kWithin ? it.prev + "_" + it.next : std::string();
    groups[context][it.speaker][it.phone].push_back(i);
  }

  AbxTask task{condition, {}};
  for (const auto& [context, speakers] : groups) {
    for (const auto& [s1, phones] : speakers) {
      if (condition.speaker == SpeakerMode::kWithin) {
        add_cell(task.cells, CellKey{context, s1, {}}, phones, nullptr);
        continue;
      }
      for (const auto& [s2, x_phones] : speakers) {
        if (s2 == s1) continue;
        add_cell(task.cells, CellKey{context, s1, s2}, phones, &x_phones);
      }
    }
  }
  std::sort(task.cells.begin(), task.cells.end(),
            [](const AbxTaskCell& a, const AbxTaskCell& b) { return a.key < b.key; });
  return task;
}

// ---------------------------------------------------------------------------
// Scoring

CellScore score_cell(const AbxTaskCell& cell, const Condition& condition, const DistanceFn& distance) {
  const bool within = condition.speaker == SpeakerMode::kWithin;

  // Local numbering of the A/B pool (rows) and X pool (columns); every
  // distance the cell needs is computed exactly once.
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  std::vector<std::vector<std::size_t>> ab_local(cell.phones.size());
  std::vector<std::vector<std::size_t>> x_local(cell.phones.size());
  for (std::size_t p = 0; p < cell.phones.size(); ++p) {
    for (auto i : cell.ab[p]) {
      ab_local[p].push_back(rows.size());
      rows.push_back(i);
    }
    for (auto i : cell.x[p]) {
      x_local[p].push_back(cols.size());
      cols.push_back(i);
    }
  }
  std::vector<double> dist(rows.size() * cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (within && rows[r] == cols[c]) continue;
      dist[r * cols.size() + c] = distance(rows[r], cols[c]);
    }
  }
  auto d = [&](std::size_t r, std::size_t c) { return dist[r * cols.size() + c]; };

  // Returns (sum of scores, triple count) for A = phone p, B = phone q.
  auto direction = [&](std::size_t p, std::size_t q) {
    double sum = 0.0;
    std::uint64_t n = 0;
    for (auto a : ab_local[p]) {
      for (auto b : ab_local[q]) {
        for (auto x : x_local[p]) {
          if (within && rows[a] == cols[x]) continue;
          const double dax = d(a, x);
          const double dbx = d(b, x);
          sum += dax < dbx ? 1.0 : (dax == dbx ? 0.5 : 0.0);
          ++n;
        }
      }
    }
    return std::pair{sum, n};
  };

  CellScore out;
  for (std::size_t p = 0; p < cell.phones.size(); ++p) {
    for (std::size_t q = p + 1; q < cell.phones.size(); ++q) {
      PairScore unit{p, q, 0.0, 0, 0};
      double error_sum = 0.0;
      for (auto [a, b] : {std::pair{p, q}, std::pair{q, p}}) {
        const auto [sum, n] = direction(a, b);
        if (n == 0) {
          ++out.skipped;
          continue;
        }
        error_sum += 1.0 - sum / static_cast<double>(n);
        unit.n_triples += n;
        ++unit.directions;
      }
      if (unit.directions == 0) continue;
      unit.error = error_sum / unit.directions;
      out.pairs.push_back(unit);
    }
  }
  return out;
}

namespace {

struct Unit {
  double error;
  std::uint64_t n_triples;
};

struct Mean {
  double sum = 0.0;
  std::size_t count = 0;
  std::uint64_t n_triples = 0;

  void add(double e, std::uint64_t n) {
    sum += e;
    ++count;
    n_triples += n;
  }
  double value() const { return sum / static_cast<double>(count); }
};

}  // namespace

AbxScore aggregate_scores(const AbxTask& task, std::span<const CellScore> cells, Aggregation aggregation) {
  AbxScore score;
  score.condition = task.condition;
  score.n_cells = task.cells.size();

  // pair -> speaker cell -> context -> unit, all keys sorted.
  std::map<std::string, std::map<std::string, std::map<std::string, Unit>>> units;
  for (std::size_t c = 0; c < task.cells.size(); ++c) {
    const auto& cell = task.cells[c];
    score.n_skipped += cells[c].skipped;
    for (const auto& u : cells[c].pairs) {
      const auto pair = cell.phones[u.first] + "|" + cell.phones[u.second];
      units[pair][cell.key.speaker_key()][cell.key.context] = {u.error, u.n_triples};
      ++score.n_units;
      score.n_triples += u.n_triples;
    }
  }
  if (score.n_units == 0) throw Error(Errc::kEmptyInput, "no scorable ABX units for " + task.condition.name());

  const bool with_context = task.condition.context == ContextMode::kWithin;
  if (aggregation == Aggregation::kFlat) {
    Mean overall;
    for (const auto& [pair, speakers] : units) {
      for (const auto& [spk, contexts] : speakers) {
        for (const auto& [ctx, u] : contexts) {
          overall.add(u.error, u.n_triples);
          score.rows.push_back({"context", pair + "|" + spk + (with_context ? "|" + ctx : ""), u.error, u.n_triples});
        }
      }
    }
    score.error = overall.value();
    score.rows.insert(score.rows.begin(), {"overall", "all", score.error, score.n_triples});
    return score;
  }

  std::vector<AbxScoreRow> pair_rows;
  std::vector<AbxScoreRow> speaker_rows;
  std::vector<AbxScoreRow> context_rows;
  Mean overall;
  for (const auto& [pair, speakers] : units) {
    Mean pair_mean;
    for (const auto& [spk, contexts] : speakers) {
      Mean spk_mean;
      for (const auto& [ctx, u] : contexts) {
        spk_mean.add(u.error, u.n_triples);
        if (with_context) context_rows.push_back({"context", pair + "|" + spk + "|" + ctx, u.error, u.n_triples});
      }
      pair_mean.add(spk_mean.value(), spk_mean.n_triples);
      speaker_rows.push_back({"speaker", pair + "|" + spk, spk_mean.value(), spk_mean.n_triples});
    }
    overall.add(pair_mean.value(), pair_mean.n_triples);
    pair_rows.push_back({"pair", pair, pair_mean.value(), pair_mean.n_triples});
  }
  score.error = overall.value();
  score.rows.push_back({"overall", "all", score.error, score.n_triples});
  for (auto* rows : {&pair_rows, &speaker_rows, &context_rows}) {
    score.rows.insert(score.rows.end(), rows->begin(), rows->end());
  }
  return score;
}

AbxScore score_task(const AbxTask& task, const DistanceFn& distance, unsigned jobs, Aggregation aggregation) {
  std::vector<CellScore> cells(task.cells.size());
  parallel_for(task.cells.size(), jobs,
               [&](std::size_t c) { cells[c] = score_cell(task.cells[c], task.condition, distance); });
  return aggregate_scores(task, cells, aggregation);
}

AbxScore abx_error(std::span<const AbxItem> items, const RepresentationSet& representations,
                   const Condition& condition, const AbxOptions& options) {
  condition.validate();
  std::vector<FrameSlice> slices;
  slices.reserve(items.size());
  for (const auto& it : items) {
    const auto rep = representations.find(it.file);
    if (rep == representations.end()) throw Error(Errc::kMissingRepresentation, it.file);
    const auto& m = rep->second;
    if (m.rows() == 0) throw Error(Errc::kEmptySequence, "matrix for " + it.file + " has no frames");
    const auto rows = static_cast<std::int64_t>(m.rows());
    // Representations may be a frame shorter than the alignment; clip to the
    // matrix and keep at least its last frame.
    auto end = std::min(end_frame(it.offset, m.frame_rate()), rows);
    auto begin = std::clamp<std::int64_t>(first_frame(it.onset, m.frame_rate()), 0, rows - 1);
    if (end <= begin) end = begin + 1;
    slices.push_back(m.slice(static_cast<std::size_t>(begin), static_cast<std::size_t>(end)));
  }

  const auto task = build_task(items, condition);
  const DistanceFn distance = [&](std::size_t i, std::size_t j) {
    return dtw_distance(slices[i], slices[j], options.metric);
  };
  return score_task(task, distance, options.jobs, options.aggregation);
}

AbxScore abx_error(const Corpus& corpus, const CollapsedTable& table, const PhoneRules& rules,
                   const LabelingOptions& labeling, const RepresentationSet& representations,
                   const Condition& condition, const AbxOptions& options) {
  condition.validate();
  const auto items = extract_items(corpus, table, rules, labeling, condition.span);
  return abx_error(items, representations, condition, options);
}

void write_score_report(std::ostream& out, const AbxScore& score) {
  out << "condition\tlevel\tkey\terror\tn_triples\n";
  const auto name = score.condition.name();
  for (const auto& r : score.rows) {
    out << name << '\t' << r.level << '\t' << r.key << '\t' << text::format_double(r.error) << '\t' << r.n_triples
        << '\n';
  }
}

}  // namespace maub
