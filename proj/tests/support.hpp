#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "maub/abx.hpp"
#include "maub/corpus.hpp"
#include "maub/phoneset.hpp"
#include "maub/random.hpp"
#include "oracles.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return MAUB_TEST_DATA; }
inline std::filesystem::path toy_dir() { return data_dir() / "toy"; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("maub_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline maub::Corpus corpus_from(const std::string& tsv) {
  std::istringstream in(tsv);
  return maub::parse_alignments(in);
}

inline maub::FeatureTable table_from(const std::string& csv) {
  std::istringstream in(csv);
  return maub::parse_feature_table(in);
}

inline maub::PhoneRules rules_from(const std::string& tsv) {
  std::istringstream in(tsv);
  return maub::parse_rules(in);
}

// A random ABX problem: items with phones, contexts and speakers drawn from
// small alphabets, plus a symmetric distance matrix of small integers so
// that ties are frequent.
struct RandomTask {
  std::vector<maub::AbxItem> items;
  std::vector<std::vector<double>> distance;
};

inline RandomTask random_task(maub::Rng& rng, std::size_t max_phones = 5, std::size_t max_items = 4,
                              std::size_t max_speakers = 3, std::size_t n_contexts = 2, int max_distance = 4) {
  static const char* kPhones[] = {"a", "b", "c", "d", "e"};
  static const char* kContexts[] = {"x", "y", "z"};
  RandomTask t;
  const auto n_phones = 2 + rng.below(max_phones - 1);
  const auto n_speakers = 1 + rng.below(max_speakers);
  for (std::size_t s = 0; s < n_speakers; ++s) {
    for (std::size_t p = 0; p < n_phones; ++p) {
      for (std::size_t c = 0; c < n_contexts; ++c) {
        const auto count = rng.below(max_items + 1);
        for (std::size_t k = 0; k < count; ++k) {
          maub::AbxItem it;
          it.file = "u" + std::to_string(t.items.size());
          it.onset = 0.0;
          it.offset = 0.1;
          it.phone = kPhones[p];
          it.prev = kContexts[c];
          it.next = kContexts[c];
          it.speaker = "s" + std::to_string(s);
          t.items.push_back(it);
        }
      }
    }
  }
  const auto n = t.items.size();
  t.distance.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      t.distance[i][j] = t.distance[j][i] = static_cast<double>(rng.below(static_cast<std::uint64_t>(max_distance) + 1));
    }
  }
  return t;
}

inline std::vector<oracle::Item> oracle_items(const std::vector<maub::AbxItem>& items) {
  std::vector<oracle::Item> out;
  for (const auto& it : items) out.push_back({it.phone, it.prev + "_" + it.next, it.speaker});
  return out;
}

// 3 * per_blob 2-D points around (0,0), (5,5) and (-5,5), interleaved.
inline maub::RepresentationMatrix blobs(std::uint64_t seed, std::size_t per_blob, double sigma) {
  const double means[3][2] = {{0.0, 0.0}, {5.0, 5.0}, {-5.0, 5.0}};
  maub::Rng rng(seed);
  std::vector<float> d;
  for (std::size_t i = 0; i < 3 * per_blob; ++i) {
    const auto& m = means[i % 3];
    d.push_back(static_cast<float>(m[0] + sigma * rng.normal()));
    d.push_back(static_cast<float>(m[1] + sigma * rng.normal()));
  }
  return {3 * per_blob, 2, 50.0, d};
}

// Utterances whose boundaries all fall on 20 ms frame edges, over the given
// phones, each at least 2.2 s long. Neighbouring phones always differ.
inline maub::Corpus aligned_corpus(maub::Rng& rng, std::size_t n_utts, std::size_t n_speakers,
                                   const std::vector<std::string>& phones, const std::string& language = "xx") {
  constexpr double kFps = 50.0;
  std::vector<maub::Utterance> utts;
  for (std::size_t u = 0; u < n_utts; ++u) {
    maub::Utterance utt;
    utt.id = language + "_" + std::to_string(u);
    utt.speaker = "s" + std::to_string(u % n_speakers);
    utt.language = language;
    std::uint64_t f = 2 + rng.below(4);
    utt.segments.push_back({"sil", 0.0, f / kFps});
    std::size_t last = phones.size();
    while (f < 110) {
      const auto len = 2 + rng.below(5);
      auto p = rng.below(phones.size() - 1);
      if (p >= last) ++p;
      last = p;
      utt.segments.push_back({phones[p], f / kFps, (f + len) / kFps});
      f += len;
    }
    utt.segments.push_back({"sil", f / kFps, (f + 3) / kFps});
    utts.push_back(std::move(utt));
  }
  return maub::Corpus(std::move(utts));
}

// One column per phone class plus one for silence.
inline maub::RepresentationSet one_hot(const maub::Corpus& corpus, const maub::CollapsedTable& table,
                                       const maub::PhoneRules& rules, const maub::LabelingOptions& labeling) {
  maub::RepresentationSet reps;
  for (const auto& u : corpus.utterances()) {
    const auto t = maub::frame_targets(u, table, rules, labeling);
    maub::RepresentationMatrix m(t.size(), table.size() + 1, labeling.frame_rate);
    for (std::size_t i = 0; i < t.size(); ++i) {
      m(i, t.silence_mask[i] ? table.size() : static_cast<std::size_t>(t.phone_class[i])) = 1.0f;
    }
    reps.emplace(u.id, std::move(m));
  }
  return reps;
}

}  // namespace testing

namespace testing {

// Eight utterances, one per filtering rule and boundary.
inline const char* kFilterFixture =
    "utt_id\tspeaker\tlanguage\tstart_s\tend_s\tphone\n"
    // exactly 2.0 s, with a 0.7 s silence: kept
    "u1_min\ts1\txx\t0\t0.5\tsil\n"
    "u1_min\ts1\txx\t0.5\t0.9\ta\n"
    "u1_min\ts1\txx\t0.9\t1.3\tt\n"
    "u1_min\ts1\txx\t1.3\t2.0\tsil\n"
    // 1.5 s: removed
    "u2_short\ts1\txx\t0\t0.5\tsil\n"
    "u2_short\ts1\txx\t0.5\t0.9\ta\n"
    "u2_short\ts1\txx\t0.9\t1.5\tsil\n"
    // spn segment: removed
    "u3_spn\ts2\txx\t0\t1.0\tsil\n"
    "u3_spn\ts2\txx\t1.0\t1.3\tspn\n"
    "u3_spn\ts2\txx\t1.3\t1.6\ta\n"
    "u3_spn\ts2\txx\t1.6\t3.0\tsil\n"
    // 0.6 s vowel: removed
    "u4_long_vowel\ts2\txx\t0\t1.0\tsil\n"
    "u4_long_vowel\ts2\txx\t1.0\t1.6\ta\n"
    "u4_long_vowel\ts2\txx\t1.6\t3.0\tsil\n"
    // 0.6 s silence between phones: kept
    "u5_long_sil\ts3\txx\t0\t0.6\tsil\n"
    "u5_long_sil\ts3\txx\t0.6\t1.0\ta\n"
    "u5_long_sil\ts3\txx\t1.0\t1.4\tt\n"
    "u5_long_sil\ts3\txx\t1.4\t2.0\tsil\n"
    "u5_long_sil\ts3\txx\t2.0\t2.4\ti\n"
    "u5_long_sil\ts3\txx\t2.4\t3.0\tsp\n"
    // exactly 20 s: kept
    "u6_max\ts3\txx\t0\t19.6\tsil\n"
    "u6_max\ts3\txx\t19.6\t20.0\ta\n"
    // 20.5 s: removed
    "u7_over\ts4\txx\t0\t20.1\tsil\n"
    "u7_over\ts4\txx\t20.1\t20.5\ta\n"
    // a phone of exactly 0.5 s (0.7 - 0.2 in binary): kept
    "u8_phone_at_cap\ts4\txx\t0\t0.2\tsil\n"
    "u8_phone_at_cap\ts4\txx\t0.2\t0.7\ta\n"
    "u8_phone_at_cap\ts4\txx\t0.7\t2.5\tsil\n";

inline const std::vector<std::string> kFilterSurvivors{"u1_min", "u5_long_sil", "u6_max", "u8_phone_at_cap"};

}  // namespace testing
