#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "maub/error.hpp"
#include "maub/labeler.hpp"
#include "maub/text.hpp"

namespace maub {

void write_labels(std::ostream& out, std::span<const LabelSequence> sequences) {
  for (const auto& s : sequences) {
    out << s.utterance << '\t';
    for (std::size_t i = 0; i < s.labels.size(); ++i) {
      if (i) out << ' ';
      out << s.labels[i];
    }
    out << '\n';
  }
}

std::vector<LabelSequence> parse_labels(std::istream& in) {
  std::vector<LabelSequence> out;
  std::string line;
  std::size_t line_no = 0;
  std::int32_t max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (row.empty()) continue;
    const auto tab = row.find('\t');
    if (tab == std::string_view::npos) throw Error(Errc::kMalformedRow, "labels line " + std::to_string(line_no));
    LabelSequence seq;
    seq.utterance = std::string(row.substr(0, tab));
    std::istringstream fields{std::string(row.substr(tab + 1))};
    std::string tok;
    while (fields >> tok) {
      long long v = 0;
      if (!text::parse_int(tok, v)) throw Error(Errc::kMalformedRow, "labels line " + std::to_string(line_no));
      seq.labels.push_back(static_cast<std::int32_t>(v));
      max_label = std::max(max_label, seq.labels.back());
    }
    out.push_back(std::move(seq));
  }
  for (auto& s : out) s.space_size = static_cast<std::size_t>(max_label + 1);
  return out;
}

std::vector<LabelSequence> load_labels(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  return parse_labels(in);
}

namespace {

std::map<ClassId, std::uint64_t> class_counts(std::span<const LabelSequence> frame_labels) {
  std::map<ClassId, std::uint64_t> counts;
  for (const auto& s : frame_labels) {
    for (auto l : s.labels) {
      if (l >= 0) ++counts[l];
    }
  }
  if (counts.empty()) throw Error(Errc::kEmptyInput, "no labeled frames");
  return counts;
}

}  // namespace

std::vector<ClassId> top_frequent_phones(std::span<const LabelSequence> frame_labels, std::size_t k) {
  const auto counts = class_counts(frame_labels);
  std::vector<std::pair<ClassId, std::uint64_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<ClassId> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

std::vector<ClassId> observed_phones(std::span<const LabelSequence> frame_labels) {
  std::vector<ClassId> out;
  for (const auto& [c, n] : class_counts(frame_labels)) out.push_back(c);
  return out;
}

PhoneRelabeler::PhoneRelabeler(std::vector<ClassId> allowed, const CollapsedTable& table)
    : allowed_(std::move(allowed)) {
  if (allowed_.empty()) throw Error(Errc::kEmptyInput, "allowed phone set is empty");
  std::vector<FeatureVector> vectors;
  for (auto c : allowed_) {
    if (c < 0 || static_cast<std::size_t>(c) >= table.size()) {
      throw Error(Errc::kInvalidArgument, "class " + std::to_string(c) + " outside the table");
    }
    vectors.push_back(table[c].vector);
  }
  by_class_.resize(table.size());
  for (std::size_t c = 0; c < table.size(); ++c) {
    const auto it = std::find(allowed_.begin(), allowed_.end(), static_cast<ClassId>(c));
    by_class_[c] = it != allowed_.end() ? static_cast<std::int32_t>(it - allowed_.begin())
                                        : static_cast<std::int32_t>(nearest_by_l1(vectors, table[static_cast<ClassId>(c)].vector));
  }
  silence_ = static_cast<std::int32_t>(nearest_by_l1(vectors, FeatureVector(table.feature_count(), FeatureValue::kZero)));
}

std::int32_t PhoneRelabeler::map(ClassId c) const {
  if (c < 0) return silence_;
  if (static_cast<std::size_t>(c) >= by_class_.size()) {
    throw Error(Errc::kInvalidArgument, "class " + std::to_string(c) + " outside the table");
  }
  return by_class_[static_cast<std::size_t>(c)];
}

LabelSequence PhoneRelabeler::apply(const LabelSequence& labels) const {
  LabelSequence out{labels.utterance, {}, space_size()};
  out.labels.reserve(labels.labels.size());
  for (auto l : labels.labels) out.labels.push_back(map(l));
  return out;
}

LabelSequence restrict_phone_set(const LabelSequence& labels, const std::vector<ClassId>& allowed,
                                 const CollapsedTable& table) {
  if (labels.labels.empty()) throw Error(Errc::kEmptyInput, "empty label sequence " + labels.utterance);
  return PhoneRelabeler(allowed, table).apply(labels);
}

}  // namespace maub
