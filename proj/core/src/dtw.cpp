#include "maub/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "maub/error.hpp"

namespace maub {

std::string_view to_string(FrameMetric m) {
  switch (m) {
    case FrameMetric::kAngular: return "angular";
    case FrameMetric::kCosine: return "cosine";
    case FrameMetric::kEuclidean: return "euclidean";
  }
  return "angular";
}

FrameMetric parse_frame_metric(std::string_view s) {
  if (s == "angular") return FrameMetric::kAngular;
  if (s == "cosine") return FrameMetric::kCosine;
  if (s == "euclidean") return FrameMetric::kEuclidean;
  throw Error(Errc::kInvalidArgument, "unknown frame metric '" + std::string(s) + "'");
}

namespace {

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) return na == nb ? 1.0 : 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

}  // namespace

double frame_distance(std::span<const float> a, std::span<const float> b, FrameMetric metric) {
  switch (metric) {
    case FrameMetric::kAngular:
      return std::acos(cosine_similarity(a, b)) / std::numbers::pi;
    case FrameMetric::kCosine:
      return 1.0 - cosine_similarity(a, b);
    case FrameMetric::kEuclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        s += d * d;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

double dtw_distance(const FrameSlice& a, const FrameSlice& b, FrameMetric metric) {
  if (a.empty() || b.empty()) throw Error(Errc::kEmptySequence, "DTW on an empty frame sequence");
  if (a.cols != b.cols) throw Error(Errc::kDimensionMismatch, "DTW frame dimensions differ");

  const std::size_t n = a.rows;
  const std::size_t m = b.rows;
  // Paths ending at (i, j) visit between max(i, j) + 1 and i + j + 1 cells.
  const std::size_t max_len = n + m - 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // best[j * (max_len + 1) + len] = minimum sum over paths of `len` cells
  // ending at (i, j), for the current row i; prev holds row i - 1.
  const std::size_t stride = max_len + 1;
  std::vector<double> prev(m * stride, kInf);
  std::vector<double> cur(m * stride, kInf);

  for (std::size_t i = 0; i < n; ++i) {
    std::fill(cur.begin(), cur.end(), kInf);
    for (std::size_t j = 0; j < m; ++j) {
      const double d = frame_distance(a.row(i), b.row(j), metric);
      double* out = &cur[j * stride];
      if (i == 0 && j == 0) {
        out[1] = d;
        continue;
      }
      const std::size_t lo = std::max(i, j) + 1;
      const std::size_t hi = i + j + 1;
      const double* up = i > 0 ? &prev[j * stride] : nullptr;
      const double* left = j > 0 ? &cur[(j - 1) * stride] : nullptr;
      const double* diag = i > 0 && j > 0 ? &prev[(j - 1) * stride] : nullptr;
      for (std::size_t len = lo; len <= hi; ++len) {
        double best = kInf;
        if (up) best = std::min(best, up[len - 1]);
        if (left) best = std::min(best, left[len - 1]);
        if (diag) best = std::min(best, diag[len - 1]);
        out[len] = best + d;
      }
    }
    std::swap(prev, cur);
  }

  const double* last = &prev[(m - 1) * stride];
  double result = kInf;
  for (std::size_t len = std::max(n, m); len <= max_len; ++len) {
    result = std::min(result, last[len] / static_cast<double>(len));
  }
  return result;
}

}  // namespace maub
