#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library routine they check.

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

// Frame distance written out directly from its definition.
inline double angular(std::span<const float> a, std::span<const float> b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return na == nb ? 0.0 : 0.5;
  long double c = dot / std::sqrt(na * nb);
  c = std::clamp<long double>(c, -1, 1);
  return static_cast<double>(std::acos(c) / std::numbers::pi_v<long double>);
}

// Minimum over every monotone path (right, down, diagonal) of the mean of a
// precomputed cost grid along the path, by explicit enumeration.
inline double dtw_paths(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const std::size_t m = cost[0].size();
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double, std::size_t)> walk =
      [&](std::size_t i, std::size_t j, double sum, std::size_t len) {
        sum += cost[i][j];
        ++len;
        if (i == n - 1 && j == m - 1) {
          best = std::min(best, sum / static_cast<double>(len));
          return;
        }
        if (i + 1 < n) walk(i + 1, j, sum, len);
        if (j + 1 < m) walk(i, j + 1, sum, len);
        if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, sum, len);
      };
  walk(0, 0, 0.0, 0);
  return best;
}

inline std::size_t count_paths(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::size_t>> c(n, std::vector<std::size_t>(m, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == 0 || j == 0) {
        c[i][j] = 1;
        continue;
      }
      c[i][j] = c[i - 1][j] + c[i][j - 1] + c[i - 1][j - 1];
    }
  }
  return c[n - 1][m - 1];
}

// Plain recursion, no memoisation.
inline std::size_t edit_distance(std::span<const int> a, std::span<const int> b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const std::size_t sub = edit_distance(a.subspan(1), b.subspan(1)) + (a[0] == b[0] ? 0 : 1);
  const std::size_t del = edit_distance(a.subspan(1), b) + 1;
  const std::size_t ins = edit_distance(a, b.subspan(1)) + 1;
  return std::min({sub, del, ins});
}

struct Item {
  std::string phone;
  std::string context;
  std::string speaker;
};

// Brute-force ABX over all (a, b, x) item triples with exact rational
// arithmetic. Units are keyed by (unordered phone pair, speaker key,
// context); each unit error is the mean over its scored directions of
// 1 - mean triple score, then contexts -> speakers -> pairs are averaged.
inline Rational abx(const std::vector<Item>& items, const std::vector<std::vector<double>>& d, bool within_speaker,
                    bool within_context) {
  using Key = std::tuple<std::string, std::string, std::string, std::string, std::string>;  // p, q, spk, ctx, dir
  std::map<Key, std::pair<Rational, std::int64_t>> acc;
  const std::size_t n = items.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (items[a].phone == items[b].phone) continue;
      if (items[a].speaker != items[b].speaker) continue;
      if (within_context && items[a].context != items[b].context) continue;
      for (std::size_t x = 0; x < n; ++x) {
        if (x == a || items[x].phone != items[a].phone) continue;
        if (within_context && items[x].context != items[a].context) continue;
        if (within_speaker && items[x].speaker != items[a].speaker) continue;
        if (!within_speaker && items[x].speaker == items[a].speaker) continue;
        const auto& p = std::min(items[a].phone, items[b].phone);
        const auto& q = std::max(items[a].phone, items[b].phone);
        const std::string spk = within_speaker ? items[a].speaker : items[a].speaker + ">" + items[x].speaker;
        const std::string ctx = within_context ? items[a].context : "";
        auto& cell = acc[{p, q, spk, ctx, items[a].phone}];
        if (d[a][x] < d[b][x]) {
          cell.first += 1;
        } else if (d[a][x] == d[b][x]) {
          cell.first += Rational(1, 2);
        }
        ++cell.second;
      }
    }
  }

  // unit -> (sum of direction errors, direction count)
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::pair<Rational, int>> units;
  for (const auto& [key, v] : acc) {
    const auto& [p, q, spk, ctx, dir] = key;
    auto& u = units[{p, q, spk, ctx}];
    u.first += 1 - v.first / v.second;
    ++u.second;
  }
  std::map<std::tuple<std::string, std::string, std::string>, std::pair<Rational, int>> speakers;
  for (const auto& [key, v] : units) {
    const auto& [p, q, spk, ctx] = key;
    auto& s = speakers[{p, q, spk}];
    s.first += v.first / v.second;
    ++s.second;
  }
  std::map<std::pair<std::string, std::string>, std::pair<Rational, int>> pairs;
  for (const auto& [key, v] : speakers) {
    const auto& [p, q, spk] = key;
    auto& s = pairs[{p, q}];
    s.first += v.first / v.second;
    ++s.second;
  }
  Rational total = 0;
  for (const auto& [key, v] : pairs) total += v.first / v.second;
  if (pairs.empty()) return Rational(-1);
  return total / static_cast<int>(pairs.size());
}

// Full-batch Lloyd iterations from explicit initial centroids until the
// assignment stops changing.
inline std::vector<std::vector<double>> lloyd(const std::vector<std::vector<double>>& points,
                                              std::vector<std::vector<double>> centroids) {
  const std::size_t k = centroids.size();
  std::vector<std::size_t> assign(points.size(), k);
  for (int iter = 0; iter < 1000; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double s = 0;
        for (std::size_t j = 0; j < points[i].size(); ++j) s += (points[i][j] - centroids[c][j]) * (points[i][j] - centroids[c][j]);
        if (s < best_d) {
          best_d = s;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<double> sum(points[0].size(), 0.0);
      std::size_t count = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (assign[i] != c) continue;
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += points[i][j];
        ++count;
      }
      if (count == 0) continue;
      for (auto& s : sum) s /= static_cast<double>(count);
      centroids[c] = sum;
    }
  }
  return centroids;
}

// Ternary vectors as ints in {-1, 0, 1}. Exhaustive argmin of
// (l1 distance, zero count of the entry, index).
inline std::size_t codebook_argmin(const std::vector<std::vector<int>>& book, const std::vector<int>& v) {
  std::tuple<int, int, std::size_t> best{std::numeric_limits<int>::max(), 0, 0};
  for (std::size_t i = 0; i < book.size(); ++i) {
    int l1 = 0;
    int zeros = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      l1 += std::abs(book[i][j] - v[j]);
      zeros += book[i][j] == 0;
    }
    best = std::min(best, std::tuple{l1, zeros, i});
  }
  return std::get<2>(best);
}

inline double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double p = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  const double r = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

}  // namespace oracle
