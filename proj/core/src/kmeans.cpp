#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "maub/error.hpp"
#include "maub/labeler.hpp"
#include "maub/random.hpp"
#include "maub/text.hpp"

namespace maub {

namespace {

class FrameIndex {
 public:
  explicit FrameIndex(std::span<const FrameSlice> frames) {
    for (const auto& s : frames) {
      if (s.rows == 0) continue;
      if (dim_ == 0) dim_ = s.cols;
      if (s.cols != dim_) throw Error(Errc::kDimensionMismatch, "k-means inputs differ in dimension");
      for (std::size_t r = 0; r < s.rows; ++r) rows_.push_back(s.row(r).data());
    }
  }

  std::size_t size() const { return rows_.size(); }
  std::size_t dim() const { return dim_; }
  const float* operator[](std::size_t i) const { return rows_[i]; }

 private:
  std::vector<const float*> rows_;
  std::size_t dim_ = 0;
};

double squared_distance(const float* x, const double* c, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = static_cast<double>(x[j]) - c[j];
    s += diff * diff;
  }
  return s;
}

struct Nearest {
  std::size_t index;
  double distance;
};

Nearest nearest(const float* x, const std::vector<double>& centroids, std::size_t k, std::size_t d) {
  Nearest best{0, squared_distance(x, centroids.data(), d)};
  for (std::size_t c = 1; c < k; ++c) {
    const double s = squared_distance(x, &centroids[c * d], d);
    if (s < best.distance) best = {c, s};
  }
  return best;
}

double full_inertia(const FrameIndex& frames, const std::vector<double>& centroids, std::size_t k) {
  double total = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) total += nearest(frames[i], centroids, k, frames.dim()).distance;
  return total / static_cast<double>(frames.size());
}

// k-means++ over `sample`; returns chosen frame indices.
std::vector<std::size_t> kmeanspp(const FrameIndex& frames, std::span<const std::size_t> sample, std::size_t k,
                                  Rng& rng) {
  const std::size_t d = frames.dim();
  std::vector<std::size_t> chosen;
  std::vector<char> taken(sample.size(), 0);
  std::vector<double> d2(sample.size(), std::numeric_limits<double>::infinity());
  std::vector<double> center(d);

  auto take = [&](std::size_t s) {
    chosen.push_back(sample[s]);
    taken[s] = 1;
    const float* c = frames[sample[s]];
    std::copy(c, c + d, center.begin());
    for (std::size_t i = 0; i < sample.size(); ++i) d2[i] = std::min(d2[i], squared_distance(frames[sample[i]], center.data(), d));
  };

  take(static_cast<std::size_t>(rng.below(sample.size())));
  while (chosen.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = sample.size();
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < sample.size(); ++i) {
        acc += d2[i];
        if (acc > r && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick == sample.size()) {
        // Rounding pushed r past the last positive mass.
        for (std::size_t i = sample.size(); i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Only duplicates of chosen points remain.
      pick = static_cast<std::size_t>(std::find(taken.begin(), taken.end(), 0) - taken.begin());
    }
    take(pick);
  }
  return chosen;
}

}  // namespace

ClusterModel minibatch_kmeans(std::span<const FrameSlice> input, const KMeansOptions& options) {
  const FrameIndex frames(input);
  const std::size_t n = frames.size();
  const std::size_t k = options.k;
  const std::size_t d = frames.dim();
  if (k == 0) throw Error(Errc::kInvalidArgument, "k must be positive");
  if (n < k) {
    throw Error(Errc::kTooFewPoints, std::to_string(n) + " frames for " + std::to_string(k) + " clusters");
  }
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);

  Rng rng(options.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::size_t init_size = options.init_size ? options.init_size : std::max(3 * batch, 3 * k);
  init_size = std::clamp(init_size, k, n);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> sample(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(init_size));

  std::vector<double> centroids(k * d);
  const auto seeds = kmeanspp(frames, sample, k, rng);
  for (std::size_t c = 0; c < k; ++c) std::copy(frames[seeds[c]], frames[seeds[c]] + d, &centroids[c * d]);

  std::vector<std::uint64_t> counts(k, 0);
  std::vector<std::uint64_t> hits(k, 0);
  std::vector<std::size_t> assigned;
  std::vector<double> dist;
  ClusterModel model;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    std::fill(hits.begin(), hits.end(), 0);
    std::size_t last_begin = 0;
    for (std::size_t begin = 0; begin < n; begin += batch) {
      const std::size_t end = std::min(n, begin + batch);
      last_begin = begin;
      assigned.resize(end - begin);
      dist.resize(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        const auto nn = nearest(frames[order[i]], centroids, k, d);
        assigned[i - begin] = nn.index;
        dist[i - begin] = nn.distance;
      }
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t c = assigned[i - begin];
        ++hits[c];
        const double rate = 1.0 / static_cast<double>(++counts[c]);
        const float* x = frames[order[i]];
        for (std::size_t j = 0; j < d; ++j) centroids[c * d + j] += (x[j] - centroids[c * d + j]) * rate;
      }
    }

    // Clusters that drew no point during the whole epoch move to the points
    // of the last batch farthest from their centroids.
    std::vector<std::size_t> empty;
    for (std::size_t c = 0; c < k; ++c) {
      if (hits[c] == 0) empty.push_back(c);
    }
    if (!empty.empty()) {
      std::vector<std::size_t> far(dist.size());
      std::iota(far.begin(), far.end(), 0);
      std::stable_sort(far.begin(), far.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
      for (std::size_t e = 0; e < empty.size() && e < far.size(); ++e) {
        if (dist[far[e]] <= 0.0) break;
        const float* x = frames[order[last_begin + far[e]]];
        std::copy(x, x + d, &centroids[empty[e] * d]);
        counts[empty[e]] = 1;
      }
    }
    model.inertia_history.push_back(full_inertia(frames, centroids, k));
  }

  std::vector<float> data(centroids.begin(), centroids.end());
  model.centroids = RepresentationMatrix(k, d, 1.0, std::move(data));
  return model;
}

double kmeans_inertia(const ClusterModel& model, std::span<const FrameSlice> input) {
  const FrameIndex frames(input);
  if (frames.size() == 0) throw Error(Errc::kEmptyInput, "no frames");
  if (frames.dim() != model.dim()) throw Error(Errc::kDimensionMismatch, "frame and centroid dimensions differ");
  const std::vector<double> centroids(model.centroids.data().begin(), model.centroids.data().end());
  return full_inertia(frames, centroids, model.k());
}

std::int32_t nearest_centroid(const RepresentationMatrix& centroids, std::span<const float> frame) {
  std::int32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const auto row = centroids.row(c);
    double s = 0.0;
    for (std::size_t j = 0; j < frame.size(); ++j) {
      const double diff = static_cast<double>(frame[j]) - static_cast<double>(row[j]);
      s += diff * diff;
    }
    if (s < best_d) {
      best_d = s;
      best = static_cast<std::int32_t>(c);
    }
  }
  return best;
}

LabelSequence assign_kmeans(const ClusterModel& model, const RepresentationMatrix& frames, std::string utterance) {
  if (frames.cols() != model.dim()) {
    throw Error(Errc::kDimensionMismatch, "frames have dimension " + std::to_string(frames.cols()) +
                                              ", model expects " + std::to_string(model.dim()));
  }
  LabelSequence out{std::move(utterance), {}, model.k()};
  out.labels.reserve(frames.rows());
  for (std::size_t r = 0; r < frames.rows(); ++r) out.labels.push_back(nearest_centroid(model.centroids, frames.row(r)));
  return out;
}

void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path) {
  write_matrix(model.centroids, path);
  auto meta = text::open_output(path.string() + ".meta");
  meta << "k=" << model.k() << " dim=" << model.dim() << " inertia=";
  for (std::size_t i = 0; i < model.inertia_history.size(); ++i) {
    if (i) meta << ',';
    meta << text::format_double(model.inertia_history[i]);
  }
  meta << '\n';
}

ClusterModel load_cluster_model(const std::filesystem::path& path) {
  ClusterModel model;
  model.centroids = read_matrix(path);
  const auto meta_path = path.string() + ".meta";
  if (!std::filesystem::exists(meta_path)) return model;
  auto meta = text::open_input(meta_path);
  std::string tok;
  while (meta >> tok) {
    if (!tok.starts_with("inertia=")) continue;
    const auto values = tok.substr(8);
    if (values.empty()) continue;
    for (auto v : text::split(values, ',')) {
      double x = 0.0;
      if (!text::parse_double(v, x)) throw Error(Errc::kMalformedRow, "bad inertia in " + meta_path);
      model.inertia_history.push_back(x);
    }
  }
  return model;
}

}  // namespace maub
