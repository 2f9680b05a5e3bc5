#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rouge_we {

/// Raised when a coefficient has no value, e.g. one side is constant.
class UndefinedCorrelation : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Per-system scores with parallel labels.
struct ScoreVector {
  std::vector<double> values;
  std::vector<std::string> labels;

  void validate() const {
    if (values.size() != labels.size()) throw std::invalid_argument("ScoreVector: values and labels differ in length");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels)
      if (!seen.insert(l).second) throw std::invalid_argument("ScoreVector: duplicate label '" + l + "'");
  }
};

struct CorrelationTriple {
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall = 0.0;
};

namespace detail {

inline void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("correlation: inputs differ in length");
  if (x.size() < 2) throw UndefinedCorrelation("correlation: need at least 2 observations");
}

}  // namespace detail

/// Product-moment correlation.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
  };
  if (constant(x) || constant(y)) throw UndefinedCorrelation("pearson: constant input");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("pearson: constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = mean_rank;
    i = j;
  }
  return ranks;
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  try {
    return pearson(rx, ry);
  } catch (const UndefinedCorrelation&) {
    throw UndefinedCorrelation("spearman: all values tied on one side");
  }
}

namespace detail {

// Number of pairs tied within runs of equal values in a sorted range.
template <typename It, typename Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    It run = first;
    std::int64_t len = 0;
    while (run != last && eq(*run, *first)) {
      ++run;
      ++len;
    }
    total += len * (len - 1) / 2;
    first = run;
  }
  return total;
}

}  // namespace detail

/// Kendall tau-b, (concordant - discordant) / sqrt((n0 - n1)(n0 - n2)),
/// computed in O(n log n) with Knight's merge-sort swap counting.
inline double kendall(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t n1 =
      detail::tied_pairs(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const std::int64_t n3 = detail::tied_pairs(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] == x[b] && y[a] == y[b];
  });

  // Bottom-up merge sort on y, counting the inversions it removes.
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
  std::vector<double> buf(n);
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo;
      std::size_t j = mid;
      std::size_t k = lo;
      while (i < mid && j < hi) {
        if (ys[j] < ys[i]) {
          buf[k++] = ys[j++];
          swaps += static_cast<std::int64_t>(mid - i);
        } else {
          buf[k++] = ys[i++];
        }
      }
      while (i < mid) buf[k++] = ys[i++];
      while (j < hi) buf[k++] = ys[j++];
    }
    ys.swap(buf);
  }
  const std::int64_t n2 = detail::tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

  if (n0 == n1 || n0 == n2) throw UndefinedCorrelation("kendall: all pairs tied on one side");
  const std::int64_t concordant_minus_discordant = n0 - n1 - n2 + n3 - 2 * swaps;
  const double denom = std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
  return std::clamp(static_cast<double>(concordant_minus_discordant) / denom, -1.0, 1.0);
}

/// Pairs up two labelled score vectors on their common labels, in the order
/// of `x`'s labels.
inline std::pair<std::vector<double>, std::vector<double>> align(const ScoreVector& x, const ScoreVector& y) {
  x.validate();
  y.validate();
  std::unordered_map<std::string, double> ys;
  for (std::size_t i = 0; i < y.labels.size(); ++i) ys.emplace(y.labels[i], y.values[i]);
  std::pair<std::vector<double>, std::vector<double>> out;
  for (std::size_t i = 0; i < x.labels.size(); ++i) {
    auto it = ys.find(x.labels[i]);
    if (it == ys.end()) continue;
    out.first.push_back(x.values[i]);
    out.second.push_back(it->second);
  }
  return out;
}

inline double pearson(const ScoreVector& x, const ScoreVector& y) {
  const auto [a, b] = align(x, y);
  return pearson(a, b);
}

inline double spearman(const ScoreVector& x, const ScoreVector& y) {
  const auto [a, b] = align(x, y);
  return spearman(a, b);
}

inline double kendall(const ScoreVector& x, const ScoreVector& y) {
  const auto [a, b] = align(x, y);
  return kendall(a, b);
}

inline CorrelationTriple correlate(std::span<const double> x, std::span<const double> y) {
  return {pearson(x, y), spearman(x, y), kendall(x, y)};
}

}  // namespace rouge_we
