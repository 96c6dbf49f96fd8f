#include "maub/phoneset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>

#include "maub/error.hpp"
#include "maub/text.hpp"

namespace maub {

char to_char(FeatureValue v) {
  switch (v) {
    case FeatureValue::kPlus: return '+';
    case FeatureValue::kMinus: return '-';
    case FeatureValue::kZero: break;
  }
  return '0';
}

std::optional<FeatureValue> feature_value_from_char(char c) {
  switch (c) {
    case '+': return FeatureValue::kPlus;
    case '-': return FeatureValue::kMinus;
    case '0': return FeatureValue::kZero;
    default: return std::nullopt;
  }
}

std::string to_string(const FeatureVector& v) {
  std::string s;
  s.reserve(v.size());
  for (auto f : v) s.push_back(to_char(f));
  return s;
}

FeatureVector parse_feature_vector(std::string_view s) {
  FeatureVector v;
  v.reserve(s.size());
  for (char c : s) {
    const auto f = feature_value_from_char(c);
    if (!f) throw Error(Errc::kMalformedFeatureCell, "bad feature character in '" + std::string(s) + "'");
    v.push_back(*f);
  }
  return v;
}

int l1_distance(const FeatureVector& a, const FeatureVector& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += std::abs(static_cast<int>(a[i]) - static_cast<int>(b[i]));
  }
  return d;
}

int zero_count(const FeatureVector& v) {
  return static_cast<int>(std::count(v.begin(), v.end(), FeatureValue::kZero));
}

namespace {

int rank(FeatureValue v) {
  switch (v) {
    case FeatureValue::kPlus: return 0;
    case FeatureValue::kZero: return 1;
    case FeatureValue::kMinus: break;
  }
  return 2;
}

}  // namespace

bool ranked_less(const FeatureVector& a, const FeatureVector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](FeatureValue x, FeatureValue y) { return rank(x) < rank(y); });
}

std::size_t nearest_by_l1(std::span<const FeatureVector> candidates, const FeatureVector& v) {
  std::size_t best = 0;
  int best_dist = l1_distance(candidates[0], v);
  int best_zeros = zero_count(candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const int d = l1_distance(candidates[i], v);
    if (d > best_dist) continue;
    const int z = zero_count(candidates[i]);
    if (d < best_dist || z < best_zeros) {
      best = i;
      best_dist = d;
      best_zeros = z;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

FeatureTable::FeatureTable(std::vector<std::string> feature_names)
    : feature_names_(std::move(feature_names)) {}

void FeatureTable::add(std::string segment, FeatureVector vector) {
  if (vector.size() != feature_names_.size()) {
    throw Error(Errc::kMalformedRow, "segment '" + segment + "' has " + std::to_string(vector.size()) +
                                         " features, expected " + std::to_string(feature_names_.size()));
  }
  if (index_.contains(segment)) throw Error(Errc::kDuplicateSegment, segment);
  index_.emplace(segment, entries_.size());
  entries_.push_back({std::move(segment), std::move(vector)});
}

const FeatureVector* FeatureTable::find(std::string_view segment) const {
  const auto it = index_.find(segment);
  return it == index_.end() ? nullptr : &entries_[it->second].vector;
}

const FeatureVector& FeatureTable::lookup(std::string_view segment) const {
  const auto* v = find(segment);
  if (!v) throw Error(Errc::kUnknownSegment, std::string(segment));
  return *v;
}

FeatureTable parse_feature_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::kMalformedRow, "feature table is empty");
  const auto header = text::split(text::chomp(line), ',');
  if (header.size() < 2 || header[0] != "segment") {
    throw Error(Errc::kMalformedRow, "feature table header must start with 'segment'");
  }
  FeatureTable table(std::vector<std::string>(header.begin() + 1, header.end()));

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (row.empty()) continue;
    const auto cells = text::split(row, ',');
    if (cells.size() != header.size()) {
      throw Error(Errc::kMalformedRow, "line " + std::to_string(line_no) + ": expected " +
                                           std::to_string(header.size()) + " cells, got " +
                                           std::to_string(cells.size()));
    }
    FeatureVector v;
    v.reserve(cells.size() - 1);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const auto f = cells[i].size() == 1 ? feature_value_from_char(cells[i][0]) : std::nullopt;
      if (!f) {
        throw Error(Errc::kMalformedFeatureCell, "line " + std::to_string(line_no) + ", column " +
                                                     std::string(header[i]) + ": '" +
                                                     std::string(cells[i]) + "'");
      }
      v.push_back(*f);
    }
    table.add(std::string(cells[0]), std::move(v));
  }
  return table;
}

FeatureTable load_feature_table(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  return parse_feature_table(in);
}

// ---------------------------------------------------------------------------

CollapsedTable::CollapsedTable(const FeatureTable& table) : feature_names_(table.feature_names()) {
  // Smallest segment per distinct vector.
  std::map<FeatureVector, std::string> smallest;
  for (const auto& e : table.entries()) {
    auto [it, inserted] = smallest.try_emplace(e.vector, e.segment);
    if (!inserted && e.segment < it->second) it->second = e.segment;
  }
  classes_.reserve(smallest.size());
  for (auto& [vec, rep] : smallest) classes_.push_back({vec, rep});
  std::sort(classes_.begin(), classes_.end(),
            [](const PhoneClass& a, const PhoneClass& b) { return a.representative < b.representative; });

  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto id = static_cast<ClassId>(i);
    vector_to_class_.emplace(classes_[i].vector, id);
    representative_to_class_.emplace(classes_[i].representative, id);
  }
  for (const auto& e : table.entries()) segment_to_class_.emplace(e.segment, vector_to_class_.at(e.vector));
}

std::optional<ClassId> CollapsedTable::find_class(std::string_view segment) const {
  const auto it = segment_to_class_.find(segment);
  if (it == segment_to_class_.end()) return std::nullopt;
  return it->second;
}

ClassId CollapsedTable::class_of(std::string_view segment) const {
  const auto id = find_class(segment);
  if (!id) throw Error(Errc::kUnknownSegment, std::string(segment));
  return *id;
}

std::optional<ClassId> CollapsedTable::find_vector(const FeatureVector& v) const {
  const auto it = vector_to_class_.find(v);
  if (it == vector_to_class_.end()) return std::nullopt;
  return it->second;
}

std::optional<ClassId> CollapsedTable::find_representative(std::string_view segment) const {
  const auto it = representative_to_class_.find(segment);
  if (it == representative_to_class_.end()) return std::nullopt;
  return it->second;
}

CollapsedTable collapse_table(const FeatureTable& table) { return CollapsedTable(table); }

// ---------------------------------------------------------------------------

PhoneRules parse_rules(std::istream& in) {
  PhoneRules rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (row.empty() || row.front() == '#') continue;
    const auto cells = text::split(row, '\t');
    const auto where = "rules line " + std::to_string(line_no);
    if (cells.size() != 3 || cells[1].empty()) throw Error(Errc::kMalformedRow, where + ": expected 3 fields");
    if (cells[0] == "REWRITE") {
      rules.rewrites.emplace_back(std::string(cells[1]), std::string(cells[2]));
    } else if (cells[0] == "SPLIT") {
      std::vector<std::string> parts;
      for (auto p : text::split(cells[2], ',')) {
        if (p.empty()) throw Error(Errc::kEmptyMultiphthong, where + ": empty component");
        parts.emplace_back(p);
      }
      if (!rules.splits.emplace(std::string(cells[1]), std::move(parts)).second) {
        throw Error(Errc::kDuplicateSegment, where + ": " + std::string(cells[1]));
      }
    } else {
      throw Error(Errc::kMalformedRow, where + ": unknown directive '" + std::string(cells[0]) + "'");
    }
  }
  return rules;
}

PhoneRules load_rules(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  return parse_rules(in);
}

namespace {

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

std::string rewrite_once(std::string_view s, const std::vector<std::size_t>& order,
                         const PhoneRules& rules) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    bool matched = false;
    for (std::size_t r : order) {
      const auto& [pattern, replacement] = rules.rewrites[r];
      if (s.substr(pos).starts_with(pattern)) {
        out += replacement;
        pos += pattern.size();
        matched = true;
        break;
      }
    }
    if (!matched) {
      const auto n = std::min(utf8_length(static_cast<unsigned char>(s[pos])), s.size() - pos);
      out.append(s.substr(pos, n));
      pos += n;
    }
  }
  return out;
}

constexpr int kMaxRewritePasses = 32;

}  // namespace

std::string normalize_segment(std::string_view raw, const PhoneRules& rules) {
  if (rules.rewrites.empty()) return std::string(raw);
  std::vector<std::size_t> order(rules.rewrites.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rules.rewrites[a].first.size() > rules.rewrites[b].first.size();
  });

  std::string current(raw);
  for (int pass = 0; pass < kMaxRewritePasses; ++pass) {
    auto next = rewrite_once(current, order, rules);
    if (next == current) return current;
    current = std::move(next);
  }
  throw Error(Errc::kCyclicRewrite, "rewrite rules do not settle on '" + std::string(raw) + "'");
}

std::vector<TimedPhone> split_multiphthong(std::span<const std::string> components, double duration,
                                           double frame_rate) {
  if (components.empty()) throw Error(Errc::kEmptyMultiphthong, "no components");
  if (!(duration > 0.0)) throw Error(Errc::kInvalidArgument, "multiphthong duration must be positive");
  const auto n = components.size();
  double part = duration / static_cast<double>(n);
  if (frame_rate > 0.0) {
    const double frames = std::floor(part * frame_rate + 1e-9);
    if (frames >= 1.0) part = frames / frame_rate;
  }

  std::vector<TimedPhone> out;
  out.reserve(n);
  double used = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.push_back({components[i], part});
    used += part;
  }
  out.push_back({components[n - 1], duration - used});
  return out;
}

std::vector<std::string> expand_segment(std::string_view raw, const PhoneRules& rules) {
  auto normalized = normalize_segment(raw, rules);
  const auto it = rules.splits.find(normalized);
  if (it == rules.splits.end()) return {std::move(normalized)};
  std::vector<std::string> parts;
  parts.reserve(it->second.size());
  for (const auto& c : it->second) parts.push_back(normalize_segment(c, rules));
  return parts;
}

}  // namespace maub
