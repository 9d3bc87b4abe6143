#pragma once

// Monte-Carlo turbulent fading: Beta-distributed transmissivity, per-realization
// metrics against the thermal background, summary statistics and post-selection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qlidar/channel.hpp"
#include "qlidar/error.hpp"
#include "qlidar/gaussian_state.hpp"
#include "qlidar/metrics.hpp"
#include "qlidar/parallel.hpp"
#include "qlidar/stats.hpp"

namespace qlidar {

inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct FadingConfig {
  double alpha = 2.0;
  double beta = 3.0;
  std::size_t n_realizations = 10000;
  std::uint64_t seed = kDefaultSeed;
  ProbeBudget probe{10.0, 0.5};
  double n_th = 0.1;
  double saturation_cap = kDefaultSaturationCap;
};

inline void require_valid(const FadingConfig& c) {
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw InvalidParameter("Beta shape alpha must be > 0");
  if (!(c.beta > 0.0) || !std::isfinite(c.beta)) throw InvalidParameter("Beta shape beta must be > 0");
  if (c.n_realizations < 1) throw InvalidParameter("n_realizations must be >= 1");
  if (!std::isfinite(c.n_th) || c.n_th < 0.0) throw InvalidParameter("n_th must be finite and >= 0");
  require_valid(c.probe);
}

// SplitMix64 finaliser.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream seed for realization `index`; independent of evaluation order.
inline constexpr std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

// eta ~ Beta(alpha, beta) as X / (X + Y) with X ~ Gamma(alpha), Y ~ Gamma(beta).
inline double sample_eta(const FadingConfig& c, std::uint64_t index) {
  std::mt19937_64 rng(realization_seed(c.seed, index));
  std::gamma_distribution<double> ga(c.alpha, 1.0);
  std::gamma_distribution<double> gb(c.beta, 1.0);
  for (;;) {
    const double x = ga(rng);
    const double y = gb(rng);
    const double eta = x / (x + y);
    if (eta > 0.0 && eta < 1.0) return eta;
  }
}

struct MetricSummary {
  double mean = 0.0;
  double variance = 0.0;
  double cv = 0.0;  // standard deviation / mean
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double iqr_over_median = 0.0;
  stats::Histogram histogram;
};

inline MetricSummary summarize(std::span<const double> x) {
  MetricSummary m;
  m.mean = stats::mean(x);
  m.variance = stats::variance(x);
  m.cv = m.mean != 0.0 ? std::sqrt(m.variance) / m.mean : 0.0;
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  m.q25 = stats::quantile_sorted(s, 0.25);
  m.median = stats::quantile_sorted(s, 0.5);
  m.q75 = stats::quantile_sorted(s, 0.75);
  m.iqr_over_median = m.median != 0.0 ? (m.q75 - m.q25) / m.median : 0.0;
  m.histogram = stats::histogram_fd(x);
  return m;
}

struct FadingSummary {
  MetricSummary eta;
  MetricSummary w2_sq;
  MetricSummary xi_qbb;
  double pearson_w2_eta = 0.0;
  double pearson_qbb_eta = 0.0;
  std::size_t saturated_count = 0;
};

struct FadingEnsemble {
  FadingConfig config;
  std::vector<double> etas;
  std::vector<double> w2_sq;
  std::vector<double> xi_qbb;
  std::vector<char> xi_saturated;
  FadingSummary summary;
};

// Metrics of one realization against the thermal background.
struct Realization {
  double eta = 0.0;
  double w2_sq = 0.0;
  Exponent xi_qbb;
};

inline Realization evaluate_realization(const FadingConfig& c, double eta) {
  const GaussianState background = thermal_state(c.n_th);
  const GaussianState received = apply_loss(probe_from_budget(c.probe), {eta, c.n_th});
  return {eta, w2_sq(background, received).w2_sq, xi_qbb(background, received, QbbMode::overlap, c.saturation_cap)};
}

inline FadingEnsemble run_ensemble(const FadingConfig& config, unsigned threads = 1) {
  require_valid(config);
  FadingEnsemble e;
  e.config = config;
  const std::size_t n = config.n_realizations;
  e.etas.resize(n);
  e.w2_sq.resize(n);
  e.xi_qbb.resize(n);
  e.xi_saturated.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const Realization r = evaluate_realization(config, sample_eta(config, i));
    e.etas[i] = r.eta;
    e.w2_sq[i] = r.w2_sq;
    e.xi_qbb[i] = r.xi_qbb.value;
    e.xi_saturated[i] = r.xi_qbb.saturated ? 1 : 0;
  });
  e.summary.eta = summarize(e.etas);
  e.summary.w2_sq = summarize(e.w2_sq);
  e.summary.xi_qbb = summarize(e.xi_qbb);
  if (n >= 2) {
    e.summary.pearson_w2_eta = stats::pearson(e.w2_sq, e.etas);
    e.summary.pearson_qbb_eta = stats::pearson(e.xi_qbb, e.etas);
  }
  for (char s : e.xi_saturated) e.summary.saturated_count += static_cast<std::size_t>(s);
  return e;
}

enum class SelectionMetric { w2, qbb };

struct SelectionReport {
  double threshold = 0.0;
  std::size_t selected = 0;
  double efficiency = 0.0;  // selected / total
  double mean_eta_selected = 0.0;
  double mean_eta_population = 0.0;
  bool degenerate = false;  // metric constant across the ensemble; everything kept
};

// Keeps realizations whose metric is at or above its empirical `quantile`.
inline SelectionReport post_select(const FadingEnsemble& e, SelectionMetric metric, double quantile) {
  if (!(quantile >= 0.0 && quantile < 1.0)) throw InvalidParameter("selection quantile must lie in [0, 1)");
  const std::vector<double>& m = metric == SelectionMetric::w2 ? e.w2_sq : e.xi_qbb;
  if (m.empty() || m.size() != e.etas.size()) throw InvalidParameter("ensemble is empty or inconsistent");
  SelectionReport r;
  r.mean_eta_population = stats::mean(e.etas);
  const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
  r.degenerate = *lo == *hi;
  r.threshold = r.degenerate ? *lo : stats::quantile(m, quantile);
  double sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (r.degenerate || m[i] >= r.threshold) {
      sum += e.etas[i];
      ++r.selected;
    }
  }
  r.efficiency = static_cast<double>(r.selected) / static_cast<double>(m.size());
  r.mean_eta_selected = sum / static_cast<double>(r.selected);
  return r;
}

}  // namespace qlidar
