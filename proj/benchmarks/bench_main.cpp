#include <benchmark/benchmark.h>

#include <vector>

#include "maub/abx.hpp"
#include "maub/dtw.hpp"
#include "maub/labeler.hpp"
#include "maub/metrics.hpp"
#include "maub/random.hpp"

using namespace maub;

namespace {

RepresentationMatrix noise(Rng& rng, std::size_t rows, std::size_t cols) {
  RepresentationMatrix m(rows, cols, 50.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = static_cast<float>(rng.normal());
  }
  return m;
}

}  // namespace

static void BM_DtwAngular(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = noise(rng, n, 768);
  const auto b = noise(rng, n + n / 3, 768);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dtw_distance(a.slice(0, a.rows()), b.slice(0, b.rows()), FrameMetric::kAngular));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.rows() * b.rows()));
}
BENCHMARK(BM_DtwAngular)->Arg(5)->Arg(15)->Arg(30);

// Distance table of a synthetic task; measures scoring and reduction only.
static void BM_AbxScore(benchmark::State& state) {
  Rng rng(2);
  std::vector<AbxItem> items;
  const char* phones[] = {"a", "e", "i", "o", "u", "t", "k", "s"};
  for (int s = 0; s < 4; ++s) {
    for (const char* p : phones) {
      for (int c = 0; c < 3; ++c) {
        for (int k = 0; k < 6; ++k) {
          items.push_back({"u" + std::to_string(items.size()), 0.0, 0.1, p, "x", c ? "y" : "z", "s" + std::to_string(s)});
        }
      }
    }
  }
  std::vector<double> d(items.size() * items.size());
  for (auto& x : d) x = rng.uniform();
  const auto n = items.size();
  const DistanceFn dist = [&](std::size_t i, std::size_t j) { return d[i * n + j]; };
  const Condition cond{SpeakerMode::kAcross, ContextMode::kWithin, SpanMode::kTriphone};
  const auto task = build_task(items, cond);
  const auto jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(score_task(task, dist, jobs).error);
}
BENCHMARK(BM_AbxScore)->Arg(1)->Arg(4)->UseRealTime();

static void BM_KMeansAssign(benchmark::State& state) {
  Rng rng(3);
  const ClusterModel model{noise(rng, 100, 768), {}};
  const auto frames = noise(rng, 500, 768);
  for (auto _ : state) benchmark::DoNotOptimize(assign_kmeans(model, frames).labels.data());
  state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_KMeansAssign);

static void BM_EditDistance(benchmark::State& state) {
  Rng rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<ClassId> a(n);
  std::vector<ClassId> b(n);
  for (auto& x : a) x = static_cast<ClassId>(rng.below(40));
  for (auto& x : b) x = static_cast<ClassId>(rng.below(40));
  for (auto _ : state) benchmark::DoNotOptimize(edit_distance(a, b));
}
BENCHMARK(BM_EditDistance)->Arg(50)->Arg(500);
BENCHMARK_MAIN();
