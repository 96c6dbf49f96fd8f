#include "maub/inventory.hpp"

#include <algorithm>
#include <ostream>

#include "maub/error.hpp"
#include "maub/text.hpp"

namespace maub {

std::vector<std::pair<FeatureVector, std::uint64_t>> FrequencyDistribution::ranked() const {
  std::vector<std::pair<FeatureVector, std::uint64_t>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return ranked_less(a.first, b.first);
  });
  return out;
}

FrequencyDistribution feature_vector_frequencies(std::span<const FeatureVector> frame_vectors) {
  if (frame_vectors.empty()) throw Error(Errc::kEmptyInput, "no frame vectors");
  FrequencyDistribution dist;
  const auto width = frame_vectors.front().size();
  for (const auto& v : frame_vectors) {
    if (v.size() != width) throw Error(Errc::kDimensionMismatch, "frame vectors differ in length");
    ++dist.counts[v];
  }
  dist.total = frame_vectors.size();
  return dist;
}

std::vector<VectorMapping> vectors_to_phones(const FrequencyDistribution& dist, const CollapsedTable& table) {
  std::vector<FeatureVector> class_vectors;
  class_vectors.reserve(table.size());
  for (const auto& c : table.classes()) class_vectors.push_back(c.vector);

  std::vector<VectorMapping> out;
  for (auto& [vec, count] : dist.ranked()) {
    VectorMapping m{vec, count, 0, false};
    if (const auto exact = table.find_vector(vec)) {
      m.phone_class = *exact;
      m.exact = true;
    } else {
      if (class_vectors.empty()) throw Error(Errc::kEmptyInput, "feature table is empty");
      if (vec.size() != table.feature_count()) throw Error(Errc::kDimensionMismatch, "vector width != table width");
      m.phone_class = static_cast<ClassId>(nearest_by_l1(class_vectors, vec));
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string InventoryRule::name() const {
  return (kind == Kind::kTopK ? "topk:" : "min-count:") + std::to_string(value);
}

namespace {

InventoryPrediction select(const std::vector<VectorMapping>& mapped, const CollapsedTable& table,
                           const InventoryRule& rule) {
  InventoryPrediction pred;
  pred.rule = rule;
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    const bool keep = rule.kind == InventoryRule::Kind::kTopK ? i < rule.value : mapped[i].count >= rule.value;
    if (!keep) continue;
    pred.kept.push_back(mapped[i]);
    pred.phones.insert(table[mapped[i].phone_class].representative);
  }
  return pred;
}

}  // namespace

InventoryPrediction predict_inventory(const FrequencyDistribution& dist, const CollapsedTable& table,
                                      const InventoryRule& rule) {
  return select(vectors_to_phones(dist, table), table, rule);
}

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

PRF evaluate_inventory(const std::set<std::string>& predicted, const std::set<std::string>& gold) {
  PRF r;
  for (const auto& p : predicted) {
    if (gold.contains(p)) {
      ++r.tp;
    } else {
      ++r.fp;
    }
  }
  r.fn = gold.size() - r.tp;
  if (r.tp + r.fp > 0) {
    r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  } else {
    r.precision = gold.empty() ? 1.0 : 0.0;
    r.precision_undefined = !gold.empty();
  }
  if (r.tp + r.fn > 0) {
    r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  } else {
    r.recall = predicted.empty() ? 1.0 : 0.0;
    r.recall_undefined = !predicted.empty();
  }
  r.f1 = f1_score(r.precision, r.recall);
  return r;
}

ThresholdResult f1_optimal_threshold(const FrequencyDistribution& dist, const CollapsedTable& table,
                                     const std::set<std::string>& gold) {
  if (gold.empty()) throw Error(Errc::kEmptyGold, "gold inventory is empty");
  const auto mapped = vectors_to_phones(dist, table);

  std::set<std::uint64_t> candidates;
  std::uint64_t max_count = 0;
  for (const auto& m : mapped) {
    candidates.insert(m.count);
    max_count = std::max(max_count, m.count);
  }
  candidates.insert(max_count + 1);

  ThresholdResult best;
  bool have = false;
  // Descending, so an F1 tie keeps the larger threshold.
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
    auto pred = select(mapped, table, InventoryRule::min_count(*it));
    const auto prf = evaluate_inventory(pred.phones, gold);
    if (!have || prf.f1 > best.prf.f1) {
      best = {*it, prf, std::move(pred)};
      have = true;
    }
  }
  return best;
}

std::set<std::string> load_gold_inventory(const std::filesystem::path& path, const CollapsedTable& table,
                                          const PhoneRules& rules) {
  auto in = text::open_input(path);
  std::set<std::string> gold;
  std::string line;
  while (std::getline(in, line)) {
    const auto seg = text::chomp(line);
    if (seg.empty()) continue;
    gold.insert(table[table.class_of(normalize_segment(seg, rules))].representative);
  }
  return gold;
}

void write_inventory_report(std::ostream& out, const InventoryPrediction& prediction, const CollapsedTable& table,
                            const std::set<std::string>& gold, const PRF& prf) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& m : prediction.kept) counts[table[m.phone_class].representative] += m.count;

  out << "phone\tcount\tin_gold\n";
  for (const auto& [phone, count] : counts) out << phone << '\t' << count << '\t' << (gold.contains(phone) ? 1 : 0) << '\n';
  out << "# rule=" << prediction.rule.name() << " tp=" << prf.tp << " fp=" << prf.fp << " fn=" << prf.fn
      << " precision=" << text::format_fixed(prf.precision, 6) << " recall=" << text::format_fixed(prf.recall, 6)
      << " f1=" << text::format_fixed(prf.f1, 6) << '\n';
}

}  // namespace maub
