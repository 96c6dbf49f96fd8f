#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "maub/abx.hpp"
#include "maub/corpus.hpp"
#include "maub/error.hpp"
#include "maub/inventory.hpp"
#include "maub/labeler.hpp"
#include "maub/matrix.hpp"
#include "maub/metrics.hpp"
#include "maub/parallel.hpp"
#include "maub/phoneset.hpp"
#include "maub/sampler.hpp"
#include "maub/text.hpp"

namespace fs = std::filesystem;
using namespace maub;

namespace {

constexpr int kExitModule = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;

// Raised for RunConfig problems found after parsing (exit 3).
struct ConfigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string table;
  std::string rules;
  double frame_rate = 50.0;
  unsigned jobs = 1;
  bool version = false;
};

class Summary {
 public:
  explicit Summary(std::string command) { add("command", std::move(command)); }
  Summary& add(const std::string& key, const std::string& value) {
    line_ += (line_.empty() ? "" : " ") + key + "=" + value;
    return *this;
  }
  Summary& add(const std::string& key, double v) { return add(key, text::format_fixed(v, 6)); }
  Summary& add(const std::string& key, std::uint64_t v) { return add(key, std::to_string(v)); }
  Summary& add(const std::string& key, std::size_t v, int) { return add(key, std::to_string(v)); }
  void print() const { std::cout << line_ << '\n'; }

 private:
  std::string line_;
};

// ---------------------------------------------------------------------------
// Shared loading

struct Phones {
  CollapsedTable table;
  PhoneRules rules;
};

Phones load_phones(const Globals& g) {
  if (g.table.empty()) throw ConfigFailure("--table is required for this subcommand");
  Phones p{CollapsedTable(load_feature_table(g.table)), {}};
  if (!g.rules.empty()) p.rules = load_rules(g.rules);
  return p;
}

LabelingOptions labeling(const Globals& g) {
  LabelingOptions o;
  o.frame_rate = g.frame_rate;
  return o;
}

fs::path matrix_path(const fs::path& dir, const std::string& utt) { return dir / (utt + ".maub"); }

// Every `<utt>.maub` in the directory, by utterance id.
RepresentationSet load_matrix_dir(const fs::path& dir, const std::set<std::string>* only = nullptr) {
  RepresentationSet out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto& p = entry.path();
    if (!entry.is_regular_file() || p.extension() != ".maub") continue;
    const auto id = p.stem().string();
    if (only && !only->contains(id)) continue;
    out.emplace(id, read_matrix(p));
  }
  if (out.empty()) throw Error(Errc::kEmptyInput, "no .maub matrices in " + dir.string());
  return out;
}

RepresentationSet load_matrices_for(const fs::path& dir, const std::set<std::string>& ids) {
  RepresentationSet out;
  for (const auto& id : ids) {
    const auto p = matrix_path(dir, id);
    if (!fs::exists(p)) throw Error(Errc::kMissingRepresentation, id + " (expected " + p.string() + ")");
    out.emplace(id, read_matrix(p));
  }
  return out;
}

std::set<std::string> utterance_ids(const Corpus& c) {
  std::set<std::string> ids;
  for (const auto& u : c.utterances()) ids.insert(u.id);
  return ids;
}

std::vector<FrameSlice> slices_of(const RepresentationSet& reps) {
  std::vector<FrameSlice> out;
  for (const auto& [id, m] : reps) out.push_back(m.slice(0, m.rows()));
  return out;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

template <typename Fn>
void write_file(const fs::path& p, Fn&& fn) {
  ensure_parent(p);
  auto out = text::open_output(p);
  fn(out);
  out.flush();
  if (!out) throw Error(Errc::kIoError, "write failed: " + p.string());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// Subcommands

struct IngestArgs {
  std::string corpus;
  std::string out;
};

void run_ingest(const Globals& g, const IngestArgs& a) {
  const auto corpus = load_alignments(a.corpus);
  std::size_t segments = 0;
  std::set<std::string> labels;
  for (const auto& u : corpus.utterances()) {
    segments += u.segments.size();
    for (const auto& s : u.segments) labels.insert(s.phone);
  }
  // every phone label must reach the table; silence and the drop label are
  // left to the filter
  std::size_t unknown = 0;
  if (!g.table.empty()) {
    const auto phones = load_phones(g);
    const auto silence = default_silence_labels();
    const FilterRules defaults;
    for (const auto& l : labels) {
      if (silence.contains(l) || l == defaults.drop_label) continue;
      for (const auto& part : expand_segment(l, phones.rules)) {
        if (!phones.table.find_class(part)) {
          std::cerr << "unknown segment: '" << part << "' (from '" << l << "')\n";
          ++unknown;
        }
      }
    }
    if (unknown) throw Error(Errc::kUnknownSegment, std::to_string(unknown) + " phone labels missing from the table");
  }
  write_file(a.out, [&](std::ostream& o) { write_alignments(o, corpus); });
  Summary("ingest")
      .add("utterances", corpus.size(), 0)
      .add("speakers", corpus.by_speaker().size(), 0)
      .add("languages", corpus.by_language().size(), 0)
      .add("segments", segments, 0)
      .add("labels", labels.size(), 0)
      .add("seconds", corpus.total_duration())
      .add("checked", std::string(g.table.empty() ? "no" : "yes"))
      .print();
}

struct FilterArgs {
  std::string corpus;
  std::string out;
  FilterRules rules;
  double cap_hours = -1.0;
  std::uint64_t seed = 0;
};

void run_filter(const Globals&, const FilterArgs& a) {
  const auto corpus = load_alignments(a.corpus);
  auto kept = filter_corpus(corpus, a.rules);
  if (a.cap_hours >= 0.0) kept = cap_language_hours(kept, a.cap_hours * 3600.0, a.seed);
  write_file(a.out, [&](std::ostream& o) { write_alignments(o, kept); });
  Summary("filter")
      .add("input", corpus.size(), 0)
      .add("kept", kept.size(), 0)
      .add("removed", corpus.size() - kept.size(), 0)
      .add("seconds", kept.total_duration())
      .print();
}

struct SplitArgs {
  std::string corpus;
  std::string out;
  double train_hours = 0.0;
  double valid_hours = 0.0;
  double test_hours = 0.0;
  std::uint64_t seed = 0;
  bool lenient = false;
};

void run_split(const Globals&, const SplitArgs& a) {
  const auto corpus = load_alignments(a.corpus);
  const SplitBudgets budgets{a.train_hours * 3600.0, a.valid_hours * 3600.0, a.test_hours * 3600.0};
  const auto r = speaker_disjoint_split(corpus, budgets, a.seed, !a.lenient);
  const fs::path dir = a.out;
  fs::create_directories(dir);
  write_alignments(r.train, dir / "train.tsv");
  write_alignments(r.valid, dir / "valid.tsv");
  write_alignments(r.test, dir / "test.tsv");
  Summary("split")
      .add("train", r.train.size(), 0)
      .add("valid", r.valid.size(), 0)
      .add("test", r.test.size(), 0)
      .add("train_s", r.realized_s[0])
      .add("valid_s", r.realized_s[1])
      .add("test_s", r.realized_s[2])
      .add("complete", std::string(r.complete() ? "yes" : "no"))
      .print();
}

struct TargetsArgs {
  std::string corpus;
  std::string out;
};

void run_targets(const Globals& g, const TargetsArgs& a) {
  const auto phones = load_phones(g);
  const auto corpus = load_alignments(a.corpus);
  const auto& utts = corpus.utterances();
  std::vector<FrameTargets> targets(utts.size());
  parallel_for(utts.size(), g.jobs,
               [&](std::size_t i) { targets[i] = frame_targets(utts[i], phones.table, phones.rules, labeling(g)); });

  std::vector<LabelSequence> labels;
  std::uint64_t frames = 0;
  std::uint64_t silence = 0;
  std::set<ClassId> seen;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    labels.push_back({utts[i].id, {targets[i].phone_class.begin(), targets[i].phone_class.end()}, phones.table.size()});
    frames += targets[i].size();
    for (std::size_t f = 0; f < targets[i].size(); ++f) {
      if (targets[i].silence_mask[f]) {
        ++silence;
      } else {
        seen.insert(targets[i].phone_class[f]);
      }
    }
  }
  const fs::path dir = a.out;
  fs::create_directories(dir);
  write_file(dir / "phones.tsv", [&](std::ostream& o) { write_labels(o, labels); });
  write_file(dir / "features.tsv", [&](std::ostream& o) {
    for (std::size_t i = 0; i < utts.size(); ++i) {
      o << utts[i].id << '\t';
      for (std::size_t f = 0; f < targets[i].size(); ++f) o << (f ? " " : "") << to_string(targets[i].feature[f]);
      o << '\n';
    }
  });
  Summary("targets")
      .add("utterances", utts.size(), 0)
      .add("frames", frames)
      .add("silence_frames", silence)
      .add("classes", seen.size(), 0)
      .print();
}

struct ItemsArgs {
  std::string corpus;
  std::string out;
  std::string span = "triphone";
};

void run_items(const Globals& g, const ItemsArgs& a) {
  const auto phones = load_phones(g);
  const auto corpus = load_alignments(a.corpus);
  const auto items = extract_items(corpus, phones.table, phones.rules, labeling(g), parse_span_mode(a.span));
  write_file(a.out, [&](std::ostream& o) { write_items(o, items); });
  std::set<std::string> centre;
  for (const auto& it : items) centre.insert(it.phone);
  Summary("items").add("items", items.size(), 0).add("phones", centre.size(), 0).add("span", a.span).print();
}

struct AbxArgs {
  std::string items;
  std::string corpus;
  std::string features;
  std::string out;
  std::string speaker = "within";
  std::string context = "within";
  std::string span = "triphone";
  std::string metric = "angular";
  std::string aggregation = "hierarchical";
};

void run_abx(const Globals& g, const AbxArgs& a) {
  Condition cond{parse_speaker_mode(a.speaker), parse_context_mode(a.context), parse_span_mode(a.span)};
  cond.validate();
  std::vector<AbxItem> items;
  if (!a.items.empty()) {
    items = load_items(a.items);
  } else if (!a.corpus.empty()) {
    const auto phones = load_phones(g);
    items = extract_items(load_alignments(a.corpus), phones.table, phones.rules, labeling(g), cond.span);
  } else {
    throw ConfigFailure("abx needs --items or --corpus");
  }
  std::set<std::string> files;
  for (const auto& it : items) files.insert(it.file);
  const auto reps = load_matrices_for(a.features, files);

  AbxOptions opts;
  opts.metric = parse_frame_metric(a.metric);
  opts.jobs = g.jobs;
  opts.aggregation = a.aggregation == "flat" ? Aggregation::kFlat : Aggregation::kHierarchical;
  const auto score = abx_error(items, reps, cond, opts);
  write_file(a.out, [&](std::ostream& o) { write_score_report(o, score); });
  Summary("abx")
      .add("condition", cond.name())
      .add("metric", a.metric)
      .add("error", score.error)
      .add("n_triples", score.n_triples)
      .add("cells", score.n_cells, 0)
      .add("units", score.n_units, 0)
      .add("skipped", score.n_skipped, 0)
      .print();
}

struct LabelerArgs {
  std::string features;
  std::string labels;
  std::string train_corpus;
  std::string out;
  KMeansOptions kmeans;
  std::size_t k = 100;
};

std::set<std::string> train_ids(const LabelerArgs& a) {
  if (a.train_corpus.empty()) return {};
  return utterance_ids(load_alignments(a.train_corpus));
}

void run_kmeans(const Globals& g, const LabelerArgs& a) {
  const auto all = load_matrix_dir(a.features);
  const auto ids = train_ids(a);
  RepresentationSet train_subset;
  const RepresentationSet* train = &all;
  if (!ids.empty()) {
    train_subset = load_matrix_dir(a.features, &ids);
    train = &train_subset;
  }
  const auto frames = slices_of(*train);
  const auto model = minibatch_kmeans(frames, a.kmeans);

  std::vector<const std::pair<const std::string, RepresentationMatrix>*> entries;
  for (const auto& e : all) entries.push_back(&e);
  std::vector<LabelSequence> labels(entries.size());
  parallel_for(entries.size(), g.jobs,
               [&](std::size_t i) { labels[i] = assign_kmeans(model, entries[i]->second, entries[i]->first); });

  const fs::path dir = a.out;
  fs::create_directories(dir);
  save_cluster_model(model, dir / "kmeans.maub");
  write_file(dir / "labels.tsv", [&](std::ostream& o) { write_labels(o, labels); });
  Summary("labeler.kmeans")
      .add("k", model.k(), 0)
      .add("dim", model.dim(), 0)
      .add("utterances", labels.size(), 0)
      .add("inertia", model.inertia_history.empty() ? 0.0 : model.inertia_history.back())
      .print();
}

std::vector<FeatureVector> thresholded(const RepresentationMatrix& m) {
  std::vector<FeatureVector> out;
  out.reserve(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(hard_threshold(m.row(i)));
  return out;
}

void run_feat_freq(const Globals& g, const LabelerArgs& a) {
  const auto all = load_matrix_dir(a.features);
  const auto ids = train_ids(a);
  std::vector<FeatureVector> train;
  for (const auto& [id, m] : all) {
    if (!ids.empty() && !ids.contains(id)) continue;
    const auto v = thresholded(m);
    train.insert(train.end(), v.begin(), v.end());
  }
  const auto book = top_frequent_vectors(train, a.k);

  std::vector<const std::pair<const std::string, RepresentationMatrix>*> entries;
  for (const auto& e : all) entries.push_back(&e);
  std::vector<LabelSequence> labels(entries.size());
  parallel_for(entries.size(), g.jobs, [&](std::size_t i) {
    auto& s = labels[i];
    s.utterance = entries[i]->first;
    s.space_size = book.size();
    for (const auto& v : thresholded(entries[i]->second)) s.labels.push_back(assign_feature_codebook(book, v));
  });

  const fs::path dir = a.out;
  fs::create_directories(dir);
  write_file(dir / "codebook.tsv", [&](std::ostream& o) { write_codebook(o, book); });
  write_file(dir / "labels.tsv", [&](std::ostream& o) { write_labels(o, labels); });
  if (book.saturated) std::cerr << "warning: only " << book.size() << " distinct vectors, fewer than k=" << a.k << '\n';
  Summary("labeler.feat-freq")
      .add("k", book.size(), 0)
      .add("saturated", std::string(book.saturated ? "yes" : "no"))
      .add("utterances", labels.size(), 0)
      .print();
}

void write_relabeled(const fs::path& dir, const PhoneRelabeler& relabel, const CollapsedTable& table,
                     std::span<const LabelSequence> input, unsigned jobs) {
  std::vector<LabelSequence> labels(input.size());
  parallel_for(input.size(), jobs, [&](std::size_t i) { labels[i] = relabel.apply(input[i]); });
  fs::create_directories(dir);
  write_file(dir / "phones.txt", [&](std::ostream& o) {
    for (std::size_t i = 0; i < relabel.allowed().size(); ++i) {
      o << i << '\t' << table[relabel.allowed()[i]].representative << '\n';
    }
  });
  write_file(dir / "labels.tsv", [&](std::ostream& o) { write_labels(o, labels); });
}

void run_phone_freq(const Globals& g, const LabelerArgs& a) {
  const auto phones = load_phones(g);
  const auto input = load_labels(a.labels);
  const PhoneRelabeler relabel(top_frequent_phones(input, a.k), phones.table);
  write_relabeled(a.out, relabel, phones.table, input, g.jobs);
  Summary("labeler.phone-freq").add("k", relabel.space_size(), 0).add("utterances", input.size(), 0).print();
}

void run_all_phones(const Globals& g, const LabelerArgs& a) {
  const auto phones = load_phones(g);
  const auto input = load_labels(a.labels);
  const auto train = load_alignments(a.train_corpus);
  std::vector<LabelSequence> observed;
  for (const auto& u : train.utterances()) {
    const auto t = frame_targets(u, phones.table, phones.rules, labeling(g));
    observed.push_back({u.id, {t.phone_class.begin(), t.phone_class.end()}, phones.table.size()});
  }
  const PhoneRelabeler relabel(observed_phones(observed), phones.table);
  write_relabeled(a.out, relabel, phones.table, input, g.jobs);
  Summary("labeler.all-phones").add("k", relabel.space_size(), 0).add("utterances", input.size(), 0).print();
}

struct InventoryArgs {
  std::string features;
  std::string labels;
  std::string gold;
  std::string rule = "topk:100";
  std::string out;
};

FrequencyDistribution inventory_distribution(const InventoryArgs& a, const CollapsedTable& table) {
  std::vector<FeatureVector> frames;
  if (!a.features.empty()) {
    for (const auto& [id, m] : load_matrix_dir(a.features)) {
      if (m.cols() != table.feature_count()) {
        throw Error(Errc::kDimensionMismatch, id + " has " + std::to_string(m.cols()) + " columns, table has " +
                                                  std::to_string(table.feature_count()) + " features");
      }
      const auto v = thresholded(m);
      frames.insert(frames.end(), v.begin(), v.end());
    }
  } else if (!a.labels.empty()) {
    for (const auto& s : load_labels(a.labels)) {
      for (auto l : s.labels) {
        if (l >= 0) frames.push_back(table[l].vector);
      }
    }
  } else {
    throw ConfigFailure("inventory discover needs --features or --labels");
  }
  return feature_vector_frequencies(frames);
}

void run_inventory(const Globals& g, const InventoryArgs& a) {
  const auto phones = load_phones(g);
  const auto dist = inventory_distribution(a, phones.table);
  std::set<std::string> gold;
  if (!a.gold.empty()) gold = load_gold_inventory(a.gold, phones.table, phones.rules);

  InventoryPrediction prediction;
  std::optional<std::uint64_t> threshold;
  const auto colon = a.rule.find(':');
  const auto kind = a.rule.substr(0, colon);
  const auto value = colon == std::string::npos ? std::string() : a.rule.substr(colon + 1);
  long long n = 0;
  if (kind == "min-count" && value == "auto") {
    if (gold.empty()) throw ConfigFailure("--rule min-count:auto needs a non-empty --gold inventory");
    const auto r = f1_optimal_threshold(dist, phones.table, gold);
    prediction = r.prediction;
    threshold = r.min_count;
  } else if ((kind == "topk" || kind == "min-count") && text::parse_int(value, n) && n >= 0) {
    const auto rule = kind == "topk" ? InventoryRule::top_k(static_cast<std::uint64_t>(n))
                                     : InventoryRule::min_count(static_cast<std::uint64_t>(n));
    prediction = predict_inventory(dist, phones.table, rule);
    if (kind == "min-count") threshold = static_cast<std::uint64_t>(n);
  } else {
    throw ConfigFailure("--rule must be topk:N, min-count:N or min-count:auto, got '" + a.rule + "'");
  }
  const auto prf = evaluate_inventory(prediction.phones, gold);
  write_file(a.out, [&](std::ostream& o) { write_inventory_report(o, prediction, phones.table, gold, prf); });

  Summary s("inventory.discover");
  s.add("rule", prediction.rule.name()).add("phones", prediction.phones.size(), 0);
  if (threshold) s.add("threshold", *threshold);
  if (!gold.empty()) {
    s.add("tp", prf.tp, 0).add("fp", prf.fp, 0).add("fn", prf.fn, 0);
    s.add("precision", prf.precision).add("recall", prf.recall).add("f1", prf.f1);
  }
  s.print();
}

struct MetricsArgs {
  std::string corpus;
  std::string labels;
  std::string features;
  std::string split = "test";
  std::string out;
  bool no_mask = false;
};

void run_metrics(const Globals& g, const MetricsArgs& a) {
  const auto phones = load_phones(g);
  const auto corpus = load_alignments(a.corpus);
  if (a.labels.empty() && a.features.empty()) throw ConfigFailure("metrics needs --labels or --features");

  std::map<std::string, LabelSequence, std::less<>> predicted;
  if (!a.labels.empty()) {
    for (auto& s : load_labels(a.labels)) predicted.emplace(s.utterance, std::move(s));
  }
  RepresentationSet feats;
  if (!a.features.empty()) feats = load_matrices_for(a.features, utterance_ids(corpus));

  // language -> metric -> running counts
  std::map<std::string, std::map<std::string, MetricReport>> totals;
  for (const auto& u : corpus.utterances()) {
    const auto gold = frame_targets(u, phones.table, phones.rules, labeling(g));
    std::vector<std::uint8_t> mask = gold.silence_mask;
    if (a.no_mask) std::fill(mask.begin(), mask.end(), 0);
    auto& lang = totals[u.language];
    auto accumulate = [&](const MetricReport& r) {
      auto [it, fresh] = lang.try_emplace(r.name, MetricReport{r.name, 0.0, 0, 0});
      it->second += r;
    };

    if (!a.labels.empty()) {
      const auto p = predicted.find(u.id);
      if (p == predicted.end()) throw Error(Errc::kMissingRepresentation, "no predicted labels for " + u.id);
      const auto& pl = p->second.labels;
      if (pl.size() != gold.size()) {
        throw Error(Errc::kDimensionMismatch, u.id + ": " + std::to_string(pl.size()) + " labels for " +
                                                  std::to_string(gold.size()) + " frames");
      }
      const std::vector<ClassId> pred(pl.begin(), pl.end());
      accumulate(phone_accuracy(pred, gold.phone_class, mask));
      const auto gold_seq = collapse_frames(gold.phone_class, gold.silence_mask);
      if (!gold_seq.empty()) accumulate(per(collapse_frames(pred, gold.silence_mask), gold_seq));

      std::vector<FeatureVector> pv;
      std::vector<FeatureVector> gv;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] < 0) continue;
        pv.push_back(phones.table[pred[i]].vector);
        gv.push_back(gold.feature[i]);
      }
      if (!gv.empty()) {
        auto r = feature_accuracy(pv, gv);
        r.name = "phone_feature_accuracy";
        accumulate(r);
      }
    }
    if (!a.features.empty()) {
      const auto& m = feats.at(u.id);
      if (m.cols() != phones.table.feature_count()) {
        throw Error(Errc::kDimensionMismatch, u.id + " matrix width does not match the feature table");
      }
      const auto rows = std::min(m.rows(), gold.size());
      std::vector<FeatureVector> pv;
      std::vector<FeatureVector> gv;
      for (std::size_t i = 0; i < rows; ++i) {
        pv.push_back(hard_threshold(m.row(i)));
        gv.push_back(gold.feature[i]);
      }
      accumulate(feature_accuracy(pv, gv));
    }
  }

  write_file(a.out, [&](std::ostream& o) {
    write_metrics_header(o);
    for (auto& [lang, metrics] : totals) {
      for (auto& [name, r] : metrics) {
        r.recompute();
        write_metric_row(o, r, a.split, lang);
      }
    }
  });
  std::map<std::string, MetricReport> overall;
  for (const auto& [lang, metrics] : totals) {
    for (const auto& [name, r] : metrics) {
      auto [it, fresh] = overall.try_emplace(name, MetricReport{name, 0.0, 0, 0});
      it->second += r;
    }
  }
  Summary s("metrics");
  s.add("split", a.split).add("languages", totals.size(), 0);
  for (auto& [name, r] : overall) {
    r.recompute();
    s.add(name, r.value);
  }
  s.print();
}

struct SampleArgs {
  std::string corpus;
  std::string out;
  std::string unit = "utterances";
  double alpha = 0.7;
  std::size_t buckets = 0;
  std::string bucket_out;
  std::uint64_t seed = 0;
  std::size_t draws = 0;
};

void run_sample_plan(const Globals&, const SampleArgs& a) {
  const auto corpus = load_alignments(a.corpus);
  const auto counts = language_counts(corpus, a.unit == "seconds" ? CountUnit::kSeconds : CountUnit::kUtterances);
  const auto weights = language_weights(counts, a.alpha);
  write_file(a.out, [&](std::ostream& o) { write_sampling_plan(o, counts, weights); });
  Summary s("sample-plan");
  s.add("languages", weights.languages.size(), 0).add("alpha", a.alpha).add("unit", a.unit);
  if (a.buckets > 0) {
    if (a.bucket_out.empty()) throw ConfigFailure("--buckets needs --bucket-out");
    const auto b = length_buckets(corpus, a.buckets);
    write_file(a.bucket_out, [&](std::ostream& o) { write_bucket_manifest(o, corpus, b); });
    double worst = 0.0;
    for (const auto& x : b) worst = std::max(worst, x.ratio());
    s.add("buckets", b.size(), 0).add("max_ratio", worst);
  }
  if (a.draws > 0) {
    Rng rng(a.seed);
    std::map<std::string, std::uint64_t> drawn;
    for (std::size_t i = 0; i < a.draws; ++i) ++drawn[sample_language(weights, rng)];
    for (const auto& l : weights.languages) s.add("drawn_" + l, drawn[l]);
  }
  s.print();
}

struct ConvertArgs {
  std::string in;
  std::string out;
  std::string to;
  double frame_rate = 0.0;
};

void run_convert(const Globals& g, const ConvertArgs& a) {
  const bool input_binary = fs::path(a.in).extension() == ".maub";
  const auto to = a.to.empty() ? std::string(input_binary ? "text" : "maub") : a.to;
  RepresentationMatrix m;
  if (input_binary) {
    m = read_matrix(a.in);
  } else {
    auto in = text::open_input(a.in);
    m = read_text_matrix(in, a.frame_rate > 0.0 ? a.frame_rate : g.frame_rate);
  }
  if (to == "maub") {
    ensure_parent(a.out);
    write_matrix(m, a.out);
  } else {
    write_file(a.out, [&](std::ostream& o) { write_text_matrix(o, m); });
  }
  Summary("convert-matrix")
      .add("rows", m.rows(), 0)
      .add("cols", m.cols(), 0)
      .add("frame_rate", m.frame_rate())
      .add("to", to)
      .print();
}

// ---------------------------------------------------------------------------

const std::vector<std::string> kSpeaker{"within", "across"};
const std::vector<std::string> kContext{"within", "any"};
const std::vector<std::string> kSpan{"triphone", "phoneme"};
const std::vector<std::string> kMetric{"angular", "cosine", "euclidean"};

void print_version(const Globals& g) {
  std::cout << "maub " << MAUB_VERSION;
  if (!g.table.empty()) std::cout << " table=" << g.table << " table_fnv1a=" << hex64(text::file_checksum(g.table));
  std::cout << '\n';
}

void validate_globals(const Globals& g) {
  if (!(g.frame_rate > 0.0)) throw ConfigFailure("frame_rate must be positive");
  if (g.jobs == 0) throw ConfigFailure("jobs must be at least 1");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Articulatory-feature phonetics, ABX evaluation and pseudo-labeling toolkit", "maub"};
  app.set_config("--config", "", "INI file; [section] per subcommand, flags override");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();

  Globals g;
  app.add_flag("--version", g.version, "Print version and table checksum");
  app.add_option("--table", g.table, "Feature table CSV")->check(CLI::ExistingFile);
  app.add_option("--rules", g.rules, "Rewrite/split rules TSV")->check(CLI::ExistingFile);
  app.add_option("--frame-rate", g.frame_rate, "Frames per second")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads; never changes output")->capture_default_str();

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Load, validate and re-serialize an alignment TSV");
  c_ingest->add_option("--corpus", ingest.corpus)->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--out", ingest.out)->required();

  FilterArgs filter;
  auto* c_filter = app.add_subcommand("filter", "Drop utterances by the corpus filtering rules");
  c_filter->add_option("--corpus", filter.corpus)->required()->check(CLI::ExistingFile);
  c_filter->add_option("--out", filter.out)->required();
  c_filter->add_option("--drop-label", filter.rules.drop_label)->capture_default_str();
  c_filter->add_option("--max-phone", filter.rules.max_phone_s, "Seconds")->capture_default_str();
  c_filter->add_option("--min-utt", filter.rules.min_utt_s, "Seconds")->capture_default_str();
  c_filter->add_option("--max-utt", filter.rules.max_utt_s, "Seconds")->capture_default_str();
  c_filter->add_option("--cap-hours", filter.cap_hours, "Per-language cap applied after filtering");
  c_filter->add_option("--seed", filter.seed)->capture_default_str();

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "Speaker-disjoint train/valid/test split");
  c_split->add_option("--corpus", split.corpus)->required()->check(CLI::ExistingFile);
  c_split->add_option("--out", split.out, "Output directory")->required();
  c_split->add_option("--train-hours", split.train_hours)->check(CLI::NonNegativeNumber);
  c_split->add_option("--valid-hours", split.valid_hours)->check(CLI::NonNegativeNumber);
  c_split->add_option("--test-hours", split.test_hours)->check(CLI::NonNegativeNumber);
  c_split->add_option("--seed", split.seed)->capture_default_str();
  c_split->add_flag("--lenient", split.lenient, "Report shortfall instead of failing");

  TargetsArgs targets;
  auto* c_targets = app.add_subcommand("targets", "Frame-level phone and feature targets");
  c_targets->add_option("--corpus", targets.corpus)->required()->check(CLI::ExistingFile);
  c_targets->add_option("--out", targets.out, "Output directory")->required();

  ItemsArgs items;
  auto* c_items = app.add_subcommand("items", "ABX item file from an alignment");
  c_items->add_option("--corpus", items.corpus)->required()->check(CLI::ExistingFile);
  c_items->add_option("--out", items.out)->required();
  c_items->add_option("--span", items.span)->check(CLI::IsMember(kSpan))->capture_default_str();

  AbxArgs abx;
  auto* c_abx = app.add_subcommand("abx", "ABX error over representation matrices");
  c_abx->add_option("--items", abx.items)->check(CLI::ExistingFile);
  c_abx->add_option("--corpus", abx.corpus)->check(CLI::ExistingFile);
  c_abx->add_option("--features", abx.features, "Directory of <utt>.maub")->required()->check(CLI::ExistingDirectory);
  c_abx->add_option("--out", abx.out, "Score report TSV")->required();
  c_abx->add_option("--speaker", abx.speaker)->check(CLI::IsMember(kSpeaker))->capture_default_str();
  c_abx->add_option("--context", abx.context)->check(CLI::IsMember(kContext))->capture_default_str();
  c_abx->add_option("--span", abx.span)->check(CLI::IsMember(kSpan))->capture_default_str();
  c_abx->add_option("--metric", abx.metric)->check(CLI::IsMember(kMetric))->capture_default_str();
  c_abx->add_option("--aggregation", abx.aggregation)
      ->check(CLI::IsMember({"hierarchical", "flat"}))
      ->capture_default_str();

  LabelerArgs lab;
  auto* c_labeler = app.add_subcommand("labeler", "Frame pseudo-labels");
  c_labeler->require_subcommand(1);
  auto* c_kmeans = c_labeler->add_subcommand("kmeans", "Mini-batch k-means on representation frames");
  c_kmeans->add_option("--features", lab.features)->required()->check(CLI::ExistingDirectory);
  c_kmeans->add_option("--train-corpus", lab.train_corpus, "Restrict training to these utterances")
      ->check(CLI::ExistingFile);
  c_kmeans->add_option("--out", lab.out, "Output directory")->required();
  c_kmeans->add_option("--k", lab.kmeans.k)->check(CLI::PositiveNumber)->capture_default_str();
  c_kmeans->add_option("--batch", lab.kmeans.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
  c_kmeans->add_option("--epochs", lab.kmeans.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  c_kmeans->add_option("--seed", lab.kmeans.seed)->capture_default_str();
  c_kmeans->add_option("--init-size", lab.kmeans.init_size)->capture_default_str();

  auto* c_feat = c_labeler->add_subcommand("feat-freq", "Most frequent hard-thresholded feature vectors");
  c_feat->add_option("--features", lab.features)->required()->check(CLI::ExistingDirectory);
  c_feat->add_option("--train-corpus", lab.train_corpus)->check(CLI::ExistingFile);
  c_feat->add_option("--out", lab.out)->required();
  c_feat->add_option("--k", lab.k)->check(CLI::PositiveNumber)->capture_default_str();

  auto* c_pfreq = c_labeler->add_subcommand("phone-freq", "Restrict phone labels to the k most frequent");
  c_pfreq->add_option("--labels", lab.labels, "Phone class labels file")->required()->check(CLI::ExistingFile);
  c_pfreq->add_option("--out", lab.out)->required();
  c_pfreq->add_option("--k", lab.k)->check(CLI::PositiveNumber)->capture_default_str();

  auto* c_allp = c_labeler->add_subcommand("all-phones", "Restrict phone labels to a training inventory");
  c_allp->add_option("--labels", lab.labels)->required()->check(CLI::ExistingFile);
  c_allp->add_option("--train-corpus", lab.train_corpus)->required()->check(CLI::ExistingFile);
  c_allp->add_option("--out", lab.out)->required();

  InventoryArgs inv;
  auto* c_inventory = app.add_subcommand("inventory", "Phonetic inventory discovery");
  c_inventory->require_subcommand(1);
  auto* c_discover = c_inventory->add_subcommand("discover", "Threshold the feature-vector distribution");
  c_discover->add_option("--features", inv.features, "Directory of predicted feature matrices")
      ->check(CLI::ExistingDirectory);
  c_discover->add_option("--labels", inv.labels, "Phone class labels file")->check(CLI::ExistingFile);
  c_discover->add_option("--gold", inv.gold, "Gold inventory, one segment per line")->check(CLI::ExistingFile);
  c_discover->add_option("--rule", inv.rule, "topk:N | min-count:N | min-count:auto")->capture_default_str();
  c_discover->add_option("--out", inv.out, "Inventory report TSV")->required();

  MetricsArgs met;
  auto* c_metrics = app.add_subcommand("metrics", "Frame accuracies and phone error rate");
  c_metrics->add_option("--corpus", met.corpus, "Gold alignment")->required()->check(CLI::ExistingFile);
  c_metrics->add_option("--labels", met.labels, "Predicted phone class labels")->check(CLI::ExistingFile);
  c_metrics->add_option("--features", met.features, "Predicted feature matrices")->check(CLI::ExistingDirectory);
  c_metrics->add_option("--split", met.split)->capture_default_str();
  c_metrics->add_option("--out", met.out)->required();
  c_metrics->add_flag("--no-mask-silence", met.no_mask, "Score silence frames in phone accuracy");

  SampleArgs smp;
  auto* c_sample = app.add_subcommand("sample-plan", "Language up-sampling weights and length buckets");
  c_sample->add_option("--corpus", smp.corpus)->required()->check(CLI::ExistingFile);
  c_sample->add_option("--out", smp.out, "Sampling plan TSV")->required();
  c_sample->add_option("--alpha", smp.alpha)->check(CLI::NonNegativeNumber)->capture_default_str();
  c_sample->add_option("--unit", smp.unit)->check(CLI::IsMember({"utterances", "seconds"}))->capture_default_str();
  c_sample->add_option("--buckets", smp.buckets);
  c_sample->add_option("--bucket-out", smp.bucket_out);
  c_sample->add_option("--draws", smp.draws, "Report counts of this many seeded draws");
  c_sample->add_option("--seed", smp.seed)->capture_default_str();

  ConvertArgs conv;
  auto* c_convert = app.add_subcommand("convert-matrix", "Convert between text and MAUB matrices");
  c_convert->add_option("--in", conv.in)->required()->check(CLI::ExistingFile);
  c_convert->add_option("--out", conv.out)->required();
  c_convert->add_option("--to", conv.to)->check(CLI::IsMember({"maub", "text"}));
  c_convert->add_option("--matrix-frame-rate", conv.frame_rate, "Frame rate stored for text input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CLI::RequiredError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CLI::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CLI::FileError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (g.version) {
    print_version(g);
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    validate_globals(g);
    if (c_ingest->parsed()) run_ingest(g, ingest);
    if (c_filter->parsed()) run_filter(g, filter);
    if (c_split->parsed()) run_split(g, split);
    if (c_targets->parsed()) run_targets(g, targets);
    if (c_items->parsed()) run_items(g, items);
    if (c_abx->parsed()) run_abx(g, abx);
    if (c_kmeans->parsed()) run_kmeans(g, lab);
    if (c_feat->parsed()) run_feat_freq(g, lab);
    if (c_pfreq->parsed()) run_phone_freq(g, lab);
    if (c_allp->parsed()) run_all_phones(g, lab);
    if (c_discover->parsed()) run_inventory(g, inv);
    if (c_metrics->parsed()) run_metrics(g, met);
    if (c_sample->parsed()) run_sample_plan(g, smp);
    if (c_convert->parsed()) run_convert(g, conv);
  } catch (const ConfigFailure& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitModule;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitModule;
  }
  return 0;
}
