#include <doctest.h>

#include <sstream>

#include "maub/abx.hpp"
#include "maub/error.hpp"
#include "support.hpp"

using namespace maub;

namespace {

AbxItem item(std::string file, std::string phone, std::string prev, std::string next, std::string speaker) {
  return {std::move(file), 0.0, 0.1, std::move(phone), std::move(prev), std::move(next), std::move(speaker)};
}

const std::string kHeader = "utt_id\tspeaker\tlanguage\tstart_s\tend_s\tphone\n";

CollapsedTable toy_table() { return CollapsedTable(load_feature_table(testing::toy_dir() / "table.csv")); }

DistanceFn from_matrix(const std::vector<std::vector<double>>& d) {
  return [&d](std::size_t i, std::size_t j) { return d[i][j]; };
}

const Condition kWithinWithin{SpeakerMode::kWithin, ContextMode::kWithin, SpanMode::kTriphone};
const Condition kAcrossWithin{SpeakerMode::kAcross, ContextMode::kWithin, SpanMode::kTriphone};
const Condition kWithinAny{SpeakerMode::kWithin, ContextMode::kAny, SpanMode::kPhoneme};
const Condition kAcrossAny{SpeakerMode::kAcross, ContextMode::kAny, SpanMode::kPhoneme};

}  // namespace

TEST_CASE("condition parsing and validation") {
  CHECK(parse_speaker_mode("across") == SpeakerMode::kAcross);
  CHECK(parse_context_mode("any") == ContextMode::kAny);
  CHECK(parse_span_mode("phoneme") == SpanMode::kPhoneme);
  CHECK_THROWS_AS(parse_span_mode("diphone"), Error);
  const Condition bad{SpeakerMode::kWithin, ContextMode::kAny, SpanMode::kTriphone};
  try {
    bad.validate();
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kInvalidCondition);
  }
  CHECK(kWithinAny.name() == "within-speaker/any-context/phoneme");
  CHECK_THROWS_AS(build_task({}, bad), Error);
}

TEST_CASE("item extraction") {
  const auto table = toy_table();
  const auto rules = load_rules(testing::toy_dir() / "rules.tsv");
  LabelingOptions opts;

  SUBCASE("silence neighbours become boundaries") {
    const auto c = testing::corpus_from(kHeader + "u\ts\tl\t0\t0.1\tsil\nu\ts\tl\t0.1\t0.2\tb\n"
                                                  "u\ts\tl\t0.2\t0.3\ti\nu\ts\tl\t0.3\t0.4\tt\nu\ts\tl\t0.4\t0.5\tsil\n");
    const auto items = extract_items(c, table, rules, opts, SpanMode::kTriphone);
    REQUIRE(items.size() == 3);
    CHECK(items[0].phone == "b");
    CHECK(items[0].prev == "#");
    CHECK(items[0].next == "i");
    CHECK(items[1].phone == "i");
    CHECK(items[1].prev == "b");
    CHECK(items[1].next == "t");
    CHECK(items[2].next == "#");
    // triphone span of i covers b..t
    CHECK(items[1].onset == doctest::Approx(0.1));
    CHECK(items[1].offset == doctest::Approx(0.4));
    // b has no phone on its left, so its span starts at its own onset
    CHECK(items[0].onset == doctest::Approx(0.1));
    CHECK(items[0].offset == doctest::Approx(0.3));

    const auto ph = extract_items(c, table, rules, opts, SpanMode::kPhoneme);
    REQUIRE(ph.size() == 3);
    CHECK(ph[1].onset == doctest::Approx(0.2));
    CHECK(ph[1].offset == doctest::Approx(0.3));
  }
  SUBCASE("single phone utterance") {
    const auto c = testing::corpus_from(kHeader + "u\ts\tl\t0\t0.1\ta\n");
    const auto items = extract_items(c, table, rules, opts, SpanMode::kTriphone);
    REQUIRE(items.size() == 1);
    CHECK(items[0].prev == "#");
    CHECK(items[0].next == "#");
  }
  SUBCASE("short phones snap outward") {
    const auto c = testing::corpus_from(kHeader + "u\ts\tl\t0\t0.101\tsil\nu\ts\tl\t0.101\t0.106\ta\nu\ts\tl\t0.106\t0.2\tsil\n");
    const auto items = extract_items(c, table, rules, opts, SpanMode::kPhoneme);
    REQUIRE(items.size() == 1);
    CHECK(items[0].onset == doctest::Approx(0.10));
    CHECK(items[0].offset == doctest::Approx(0.12));
  }
  SUBCASE("normalized and split labels") {
    const auto c = testing::corpus_from(kHeader + "u\ts\tl\t0\t0.1\ttʃ\nu\ts\tl\t0.1\t0.3\taɪ\n");
    const auto items = extract_items(c, table, rules, opts, SpanMode::kTriphone);
    REQUIRE(items.size() == 3);
    CHECK(items[0].phone == "t͡ʃ");
    CHECK(items[1].phone == "a");
    CHECK(items[2].phone == "i");
    CHECK(items[2].prev == "a");
  }
}

TEST_CASE("item file round trip") {
  std::vector<AbxItem> items{{"u1", 0.02, 0.1, "a", "#", "t", "s1"}, {"u2", 0.5, 0.56, "t͡ʃ", "a", "i", "s2"}};
  std::ostringstream out;
  write_items(out, items);
  CHECK(out.str().starts_with("#file onset offset #phone prev-phone next-phone speaker\n"));
  std::istringstream in(out.str());
  const auto back = parse_items(in);
  REQUIRE(back.size() == 2);
  CHECK(back[1].phone == "t͡ʃ");
  CHECK(back[1].onset == 0.5);
  std::istringstream bad("#file onset offset #phone prev-phone next-phone speaker\nu1 x 0.1 a # t s1\n");
  CHECK_THROWS_AS(parse_items(bad), Error);
}

TEST_CASE("task construction") {
  SUBCASE("2 phones x 2 items x 1 speaker") {
    const std::vector<AbxItem> items{item("f0", "a", "x", "y", "s"), item("f1", "a", "x", "y", "s"),
                                     item("f2", "b", "x", "y", "s"), item("f3", "b", "x", "y", "s")};
    const auto task = build_task(items, kWithinWithin);
    REQUIRE(task.cells.size() == 1);
    CHECK(task.cells[0].phones == std::vector<std::string>{"a", "b"});
    const std::vector<std::vector<double>> d(4, std::vector<double>(4, 1.0));
    const auto cs = score_cell(task.cells[0], kWithinWithin, from_matrix(d));
    CHECK(cs.pairs.size() == 1);
  }
  SUBCASE("two speakers across gives ordered pairs") {
    std::vector<AbxItem> items;
    for (const char* s : {"s1", "s2"}) {
      for (const char* p : {"a", "b"}) {
        items.push_back(item("f", p, "x", "y", s));
        items.push_back(item("f", p, "x", "y", s));
      }
    }
    const auto task = build_task(items, kAcrossWithin);
    REQUIRE(task.cells.size() == 2);
    CHECK(task.cells[0].key.speaker_key() == "s1>s2");
    CHECK(task.cells[1].key.speaker_key() == "s2>s1");
  }
  SUBCASE("six items, one shared context") {
    // a and b meet only in context x_y; c occurs only in z_z.
    const std::vector<AbxItem> items{item("0", "a", "x", "y", "s"), item("1", "a", "x", "y", "s"),
                                     item("2", "b", "x", "y", "s"), item("3", "b", "x", "y", "s"),
                                     item("4", "a", "z", "z", "s"), item("5", "c", "w", "w", "s")};
    const auto within = build_task(items, kWithinWithin);
    REQUIRE(within.cells.size() == 1);
    CHECK(within.cells[0].key.context == "x_y");
    CHECK(within.cells[0].phones == std::vector<std::string>{"a", "b"});
    const auto any = build_task(items, kWithinAny);
    REQUIRE(any.cells.size() == 1);
    CHECK(any.cells[0].phones == std::vector<std::string>{"a", "b", "c"});
    CHECK(any.cells[0].ab[0].size() == 3);
  }
}

TEST_CASE("score_cell on a 2x2 task matches the brute force") {
  const std::vector<AbxItem> items{item("0", "a", "x", "y", "s"), item("1", "a", "x", "y", "s"),
                                   item("2", "b", "x", "y", "s"), item("3", "b", "x", "y", "s")};
  const std::vector<std::vector<double>> d{{0, 1, 2, 3}, {1, 0, 1, 4}, {2, 1, 0, 1}, {3, 4, 1, 0}};
  const auto task = build_task(items, kWithinWithin);
  const auto score = score_task(task, from_matrix(d));
  // (a,b): a0 x=a1: d01=1 vs d21=1 tie, d31=4 win -> 1.5/2;
  //        a1 x=a0: d10=1 vs d20=2 win, d30=3 win -> 2/2   => 3.5/4, err 0.125
  // (b,a): b2 x=b3: d23=1 vs d03=3 win, d13=4 win -> 2/2;
  //        b3 x=b2: d32=1 vs d02=2 win, d12=1 tie -> 1.5/2 => err 0.125
  CHECK(score.error == doctest::Approx(0.125));
  CHECK(score.n_triples == 8);
  const auto brute = oracle::abx(testing::oracle_items(items), d, true, true);
  CHECK(brute == oracle::Rational(1, 8));
}

TEST_CASE("engine equals the brute force on random tasks") {
  Rng rng(99);
  const Condition conditions[] = {kWithinWithin, kAcrossWithin, kWithinAny, kAcrossAny};
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto t = testing::random_task(rng);
    for (const auto& cond : conditions) {
      const auto expected = oracle::abx(testing::oracle_items(t.items), t.distance,
                                        cond.speaker == SpeakerMode::kWithin, cond.context == ContextMode::kWithin);
      const auto task = build_task(t.items, cond);
      if (expected < 0) {
        CHECK_THROWS_AS(score_task(task, from_matrix(t.distance)), Error);
        continue;
      }
      const auto score = score_task(task, from_matrix(t.distance));
      CHECK(std::abs(score.error - expected.convert_to<double>()) <= 1e-12);
      ++compared;
    }
  }
  CHECK(compared > 100);
}

TEST_CASE("score does not depend on jobs") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = testing::random_task(rng, 5, 4, 3, 3);
    const auto task = build_task(t.items, kAcrossWithin);
    if (task.cells.empty()) continue;
    const auto one = score_task(task, from_matrix(t.distance), 1);
    const auto four = score_task(task, from_matrix(t.distance), 4);
    std::ostringstream a;
    std::ostringstream b;
    write_score_report(a, one);
    write_score_report(b, four);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("pair symmetry and report levels") {
  Rng rng(8);
  const auto t = testing::random_task(rng, 3, 4, 2, 2);
  const auto task = build_task(t.items, kWithinWithin);
  REQUIRE_FALSE(task.cells.empty());
  const auto s = score_task(task, from_matrix(t.distance));
  REQUIRE(s.rows.front().level == "overall");
  bool pair = false;
  bool speaker = false;
  bool context = false;
  for (const auto& r : s.rows) {
    CHECK(r.error >= 0.0);
    CHECK(r.error <= 1.0);
    pair = pair || r.level == "pair";
    speaker = speaker || r.level == "speaker";
    context = context || r.level == "context";
  }
  CHECK((pair && speaker && context));

  // Relabeling phones (swapping which one sorts first) leaves every pair
  // error unchanged.
  auto swapped = t.items;
  for (auto& it : swapped) it.phone = it.phone == "a" ? "zz" : it.phone;
  const auto s2 = score_task(build_task(swapped, kWithinWithin), from_matrix(t.distance));
  CHECK(s2.error == doctest::Approx(s.error).epsilon(1e-12));
}

TEST_CASE("flat aggregation is the mean over units") {
  Rng rng(12);
  const auto t = testing::random_task(rng, 4, 3, 2, 2);
  const auto task = build_task(t.items, kWithinWithin);
  const auto flat = score_task(task, from_matrix(t.distance), 1, Aggregation::kFlat);
  double sum = 0.0;
  int n = 0;
  for (const auto& r : flat.rows) {
    if (r.level != "context") continue;
    sum += r.error;
    ++n;
  }
  REQUIRE(n > 0);
  CHECK(flat.error == doctest::Approx(sum / n).epsilon(1e-12));
}

TEST_CASE("abx on matrices") {
  const auto table = toy_table();
  const auto rules = load_rules(testing::toy_dir() / "rules.tsv");
  const auto corpus = filter_corpus(load_alignments(testing::toy_dir() / "alignments.tsv"), {});
  LabelingOptions labeling;
  const auto reps = testing::one_hot(corpus, table, rules, labeling);

  // toy boundaries are off the frame grid, so snapped spans pick up a
  // neighbouring frame now and then
  for (const auto& cond : {kWithinWithin, kAcrossWithin, kWithinAny, kAcrossAny}) {
    const auto s = abx_error(corpus, table, rules, labeling, reps, cond);
    CHECK(s.error < 0.01);
    CHECK(s.n_triples > 0);
  }

  SUBCASE("one-hot on frame-aligned boundaries is exact") {
    Rng rng(31);
    const auto aligned = testing::aligned_corpus(rng, 12, 3, {"a", "i", "u", "t", "k", "m"});
    const auto hot = testing::one_hot(aligned, table, rules, labeling);
    for (const auto& cond : {kWithinWithin, kAcrossWithin, kWithinAny, kAcrossAny}) {
      const auto s = abx_error(aligned, table, rules, labeling, hot, cond);
      CHECK(s.error == 0.0);
      CHECK(s.n_triples > 0);
    }
  }
  SUBCASE("missing representation") {
    auto partial = reps;
    partial.erase(corpus.utterances()[3].id);
    try {
      abx_error(corpus, table, rules, labeling, partial, kWithinAny);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kMissingRepresentation);
      CHECK(std::string(e.what()).find(corpus.utterances()[3].id) != std::string::npos);
    }
  }
  SUBCASE("phoneme span ignores frames outside the centre phone") {
    const auto items = extract_items(corpus, table, rules, labeling, SpanMode::kPhoneme);
    Rng rng(6);
    RepresentationSet noisy;
    for (const auto& [id, m] : reps) {
      RepresentationMatrix r(m.rows(), 4, m.frame_rate());
      for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < 4; ++j) r(i, j) = static_cast<float>(rng.normal());
      }
      noisy.emplace(id, std::move(r));
    }
    const auto base = abx_error(items, noisy, kWithinAny);
    // Scramble every frame that no item covers.
    auto padded = noisy;
    std::map<std::string, std::vector<char>, std::less<>> covered;
    for (const auto& it : items) {
      auto& c = covered[it.file];
      c.resize(padded.at(it.file).rows(), 0);
      const auto b = static_cast<std::size_t>(std::floor(it.onset * 50.0 + 1e-9));
      const auto e = static_cast<std::size_t>(std::ceil(it.offset * 50.0 - 1e-9));
      for (std::size_t i = b; i < e && i < c.size(); ++i) c[i] = 1;
    }
    for (auto& [id, m] : padded) {
      const auto& c = covered[id];
      for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i < c.size() && c[i]) continue;
        for (std::size_t j = 0; j < 4; ++j) m(i, j) = 100.0f;
      }
    }
    const auto after = abx_error(items, padded, kWithinAny);
    CHECK(after.error == base.error);
  }
}
