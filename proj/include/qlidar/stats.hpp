#pragma once

// Sample statistics used by the fading ensemble.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "qlidar/error.hpp"

namespace qlidar::stats {

inline double mean(std::span<const double> x) {
  if (x.empty()) throw InvalidParameter("mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Unbiased (n - 1) variance; 0 for a single value.
inline double variance(std::span<const double> x) {
  const double m = mean(x);
  if (x.size() < 2) return 0.0;
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("pearson needs two equal-length samples of size >= 2");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// Linear-interpolation quantile of an ascending sample (Hyndman-Fan type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidParameter("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidParameter("quantile must lie in [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::span<const double> x, double q) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return quantile_sorted(s, q);
}

struct Histogram {
  std::vector<double> edges;      // size bins + 1
  std::vector<double> densities;  // size bins; sum(density * width) = 1

  std::size_t bins() const { return densities.size(); }
};

inline constexpr std::size_t kMaxHistogramBins = 10000;

// Freedman-Diaconis bin width 2 IQR n^(-1/3), equal-width bins spanning
// [min, max]. A constant sample gets a single unit-width bin.
inline Histogram histogram_fd(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  if (s.empty()) throw InvalidParameter("histogram of an empty sample");
  const double lo = s.front();
  const double hi = s.back();
  const double n = static_cast<double>(s.size());
  Histogram h;
  if (hi == lo) {
    h.edges = {lo - 0.5, lo + 0.5};
    h.densities = {1.0};
    return h;
  }
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  double width = 2.0 * iqr / std::cbrt(n);
  std::size_t bins = 1;
  if (width > 0.0) {
    bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    bins = std::clamp<std::size_t>(bins, 1, kMaxHistogramBins);
  }
  width = (hi - lo) / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / bins;
  std::vector<double> counts(bins, 0.0);
  for (double v : s) {
    auto k = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(k, bins - 1)] += 1.0;
  }
  h.densities.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) h.densities[k] = counts[k] / (n * (h.edges[k + 1] - h.edges[k]));
  return h;
}

inline double integrate(const Histogram& h) {
  double total = 0.0;
  for (std::size_t k = 0; k < h.bins(); ++k) total += h.densities[k] * (h.edges[k + 1] - h.edges[k]);
  return total;
}

}  // namespace qlidar::stats
