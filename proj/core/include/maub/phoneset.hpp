#pragma once

// Articulatory feature table: loading, segment normalization, collapsing to
// distinct feature vectors, and multiphthong splitting.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace maub {

enum class FeatureValue : std::int8_t { kMinus = -1, kZero = 0, kPlus = 1 };

char to_char(FeatureValue v);
std::optional<FeatureValue> feature_value_from_char(char c);

using FeatureVector = std::vector<FeatureValue>;

// "+-0..." one character per feature.
std::string to_string(const FeatureVector& v);
// Throws kMalformedFeatureCell on any character outside {+,-,0}.
FeatureVector parse_feature_vector(std::string_view s);

// Numeric encoding + = 1, 0 = 0, - = -1.
int l1_distance(const FeatureVector& a, const FeatureVector& b);
int zero_count(const FeatureVector& v);

// Fixed lexicographic order used for frequency tie-breaks: + < 0 < -.
bool ranked_less(const FeatureVector& a, const FeatureVector& b);

// Index of the candidate closest to `v` in l1; ties go to the candidate with
// the fewest zero-valued features, then to the lowest index. Candidates must
// be non-empty and share v's length.
std::size_t nearest_by_l1(std::span<const FeatureVector> candidates, const FeatureVector& v);

class FeatureTable {
 public:
  struct Entry {
    std::string segment;
    FeatureVector vector;
  };

  FeatureTable() = default;
  explicit FeatureTable(std::vector<std::string> feature_names);

  // Throws kDuplicateSegment or kMalformedRow (width mismatch).
  void add(std::string segment, FeatureVector vector);

  const FeatureVector* find(std::string_view segment) const;
  // Throws kUnknownSegment carrying the offending string.
  const FeatureVector& lookup(std::string_view segment) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t feature_count() const { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<std::string> feature_names_;
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

FeatureTable parse_feature_table(std::istream& in);
FeatureTable load_feature_table(const std::filesystem::path& path);

using ClassId = std::int32_t;
inline constexpr ClassId kSilenceClass = -1;

struct PhoneClass {
  FeatureVector vector;
  std::string representative;
};

// The table reduced to its distinct feature vectors. Classes are ordered by
// representative (byte order of UTF-8, i.e. code point order), and each
// representative is the smallest segment sharing that vector.
class CollapsedTable {
 public:
  CollapsedTable() = default;
  explicit CollapsedTable(const FeatureTable& table);

  std::size_t size() const { return classes_.size(); }
  const PhoneClass& operator[](ClassId id) const { return classes_[static_cast<std::size_t>(id)]; }
  const std::vector<PhoneClass>& classes() const { return classes_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  std::size_t feature_count() const { return feature_names_.size(); }

  std::optional<ClassId> find_class(std::string_view segment) const;
  // Throws kUnknownSegment.
  ClassId class_of(std::string_view segment) const;
  std::optional<ClassId> find_vector(const FeatureVector& v) const;
  std::optional<ClassId> find_representative(std::string_view segment) const;

  std::size_t segment_count() const { return segment_to_class_.size(); }
  const std::map<std::string, ClassId, std::less<>>& segment_to_class() const {
    return segment_to_class_;
  }

 private:
  std::vector<std::string> feature_names_;
  std::vector<PhoneClass> classes_;
  std::map<std::string, ClassId, std::less<>> segment_to_class_;
  std::map<FeatureVector, ClassId> vector_to_class_;
  std::map<std::string, ClassId, std::less<>> representative_to_class_;
};

CollapsedTable collapse_table(const FeatureTable& table);

// Corpus-specific fixes, read from a tab-separated rules file:
//   REWRITE <pattern> <replacement>
//   SPLIT   <multiphthong> <comp1,comp2[,...]>
struct PhoneRules {
  std::vector<std::pair<std::string, std::string>> rewrites;
  std::map<std::string, std::vector<std::string>, std::less<>> splits;
};

PhoneRules parse_rules(std::istream& in);
PhoneRules load_rules(const std::filesystem::path& path);

// Exact-substring rewriting. One pass scans left to right; at each position
// the longest matching pattern wins (first listed on equal length) and the
// scan resumes after it. Passes repeat until the string stops changing, so the
// result is a fixed point; rule sets that never settle throw kCyclicRewrite.
std::string normalize_segment(std::string_view raw, const PhoneRules& rules);

struct TimedPhone {
  std::string segment;
  double duration = 0.0;
};

// Uniform split of a multiphthong's duration over its components. With a
// positive frame_rate the first n-1 parts are floored to whole frames and the
// last part takes the residue, unless a part would be shorter than one frame. Throws kEmptyMultiphthong, kInvalidArgument for
// duration <= 0.
std::vector<TimedPhone> split_multiphthong(std::span<const std::string> components, double duration,
                                           double frame_rate = 0.0);

// Normalizes `raw`, then expands it through the SPLIT rules (components are
// normalized too). A segment without a SPLIT rule yields itself.
std::vector<std::string> expand_segment(std::string_view raw, const PhoneRules& rules);

}  // namespace maub
