#include <istream>
#include <ostream>

#include "maub/error.hpp"
#include "maub/inventory.hpp"
#include "maub/labeler.hpp"
#include "maub/text.hpp"

namespace maub {

FeatureVector hard_threshold(std::span<const float> values) {
  FeatureVector v;
  v.reserve(values.size());
  for (float x : values) v.push_back(x > 0.0f ? FeatureValue::kPlus : FeatureValue::kMinus);
  return v;
}

FeatureCodebook top_frequent_vectors(std::span<const FeatureVector> frames, std::size_t k) {
  const auto ranked = feature_vector_frequencies(frames).ranked();
  FeatureCodebook book;
  book.saturated = ranked.size() < k;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    book.entries.push_back(ranked[i].first);
    book.counts.push_back(ranked[i].second);
  }
  return book;
}

std::int32_t assign_feature_codebook(const FeatureCodebook& codebook, const FeatureVector& v) {
  if (codebook.entries.empty()) throw Error(Errc::kEmptyCodebook, "cannot assign against an empty codebook");
  if (v.size() != codebook.entries.front().size()) {
    throw Error(Errc::kDimensionMismatch, "vector length " + std::to_string(v.size()) + " != codebook width " +
                                              std::to_string(codebook.entries.front().size()));
  }
  return static_cast<std::int32_t>(nearest_by_l1(codebook.entries, v));
}

void write_codebook(std::ostream& out, const FeatureCodebook& codebook) {
  for (std::size_t i = 0; i < codebook.size(); ++i) out << to_string(codebook.entries[i]) << '\t' << codebook.counts[i] << '\n';
}

FeatureCodebook parse_codebook(std::istream& in) {
  FeatureCodebook book;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (row.empty()) continue;
    const auto cells = text::split(row, '\t');
    long long count = 0;
    if (cells.size() != 2 || !text::parse_int(cells[1], count) || count < 0) {
      throw Error(Errc::kMalformedRow, "codebook line " + std::to_string(line_no));
    }
    book.entries.push_back(parse_feature_vector(cells[0]));
    book.counts.push_back(static_cast<std::uint64_t>(count));
    if (book.entries.back().size() != book.entries.front().size()) {
      throw Error(Errc::kMalformedRow, "codebook line " + std::to_string(line_no) + ": width differs");
    }
  }
  return book;
}

}  // namespace maub
