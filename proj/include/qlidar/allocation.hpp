#pragma once

// Squeezing-versus-displacement allocation under a fixed photon budget:
// W2 score maps over (eta, lambda), grid optimisation of lambda, the analytic
// quantum-advantage threshold, and small-lambda gradient diagnostics.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "qlidar/channel.hpp"
#include "qlidar/error.hpp"
#include "qlidar/gaussian_state.hpp"
#include "qlidar/metrics.hpp"
#include "qlidar/parallel.hpp"

namespace qlidar {

inline constexpr double kDefaultLambdaMax = 0.95;
inline constexpr double kDefaultGridStep = 0.01;

// lo, lo + step, ..., hi with exact end points. (hi - lo) must be a whole
// number of steps up to rounding.
inline std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidParameter("grid needs finite lo <= hi and step > 0");
  }
  const auto intervals = static_cast<long>(std::llround((hi - lo) / step));
  if (std::abs(intervals * step - (hi - lo)) > 1e-9 * std::max(1.0, hi - lo)) {
    throw InvalidParameter("grid range is not a whole number of steps");
  }
  std::vector<double> g(static_cast<std::size_t>(intervals) + 1);
  for (long i = 0; i <= intervals; ++i) {
    g[static_cast<std::size_t>(i)] = intervals == 0 ? lo : lo + (hi - lo) * static_cast<double>(i) / intervals;
  }
  return g;
}

inline std::vector<double> default_eta_grid(double step = kDefaultGridStep) { return uniform_grid(0.0, 1.0, step); }
inline std::vector<double> default_lambda_grid(double step = kDefaultGridStep, double lambda_max = kDefaultLambdaMax) {
  return uniform_grid(0.0, lambda_max, step);
}

inline void require_valid_grid(const std::vector<double>& g, const char* what) {
  if (g.empty()) throw InvalidParameter(std::string(what) + " grid is empty");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] >= 0.0 && g[i] <= 1.0)) throw InvalidParameter(std::string(what) + " grid values must lie in [0, 1]");
    if (i > 0 && !(g[i] > g[i - 1])) throw InvalidParameter(std::string(what) + " grid must be strictly ascending");
  }
}

// Probe with squeezing fraction lambda after the channel.
inline GaussianState received_probe(double lambda, double n_tot, const ChannelParams& params) {
  return apply_loss(probe_from_budget({n_tot, lambda}), params);
}

// W2 decomposition between the received probe and the thermal background.
inline W2Terms w2_terms(double lambda, double n_tot, const ChannelParams& params) {
  return w2_sq(thermal_state(params.n_th), received_probe(lambda, n_tot, params));
}

inline MetricReport w2_score(double lambda, double n_tot, const ChannelParams& params,
                             const MetricOptions& opt = {}) {
  return metric_report(thermal_state(params.n_th), received_probe(lambda, n_tot, params), opt);
}

struct LambdaOptimum {
  double lambda_opt = 0.0;
  double score_opt = 0.0;
  std::size_t index = 0;
};

// Index of the row maximum; ties go to the smallest lambda.
inline std::size_t argmax_first(const double* row, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

inline LambdaOptimum optimize_lambda(double n_tot, const ChannelParams& params, const std::vector<double>& lambda_grid) {
  require_valid_grid(lambda_grid, "lambda");
  std::vector<double> scores(lambda_grid.size());
  for (std::size_t j = 0; j < lambda_grid.size(); ++j) scores[j] = w2_terms(lambda_grid[j], n_tot, params).w2_sq;
  const std::size_t k = argmax_first(scores.data(), scores.size());
  return {lambda_grid[k], scores[k], k};
}

struct AllocationGrid {
  double n_tot = 0.0;
  double n_th = 0.0;
  std::vector<double> eta_grid;
  std::vector<double> lambda_grid;
  std::vector<double> scores;  // row-major, scores[i * lambda_grid.size() + j]
  std::vector<double> lambda_opt;

  double score(std::size_t eta_index, std::size_t lambda_index) const {
    return scores[eta_index * lambda_grid.size() + lambda_index];
  }
};

// `channel` supplies n_th and detector parameters; its eta is replaced by the
// grid values.
inline AllocationGrid compute_allocation_grid(double n_tot, const ChannelParams& channel, std::vector<double> eta_grid,
                                              std::vector<double> lambda_grid, unsigned threads = 1) {
  require_valid_grid(eta_grid, "eta");
  require_valid_grid(lambda_grid, "lambda");
  require_valid(ProbeBudget{n_tot, 0.0});
  require_valid(channel);
  AllocationGrid g;
  g.n_tot = n_tot;
  g.n_th = channel.n_th;
  g.eta_grid = std::move(eta_grid);
  g.lambda_grid = std::move(lambda_grid);
  const std::size_t ne = g.eta_grid.size();
  const std::size_t nl = g.lambda_grid.size();
  g.scores.assign(ne * nl, 0.0);
  g.lambda_opt.assign(ne, 0.0);
  parallel_for(ne * nl, threads, [&](std::size_t cell) {
    ChannelParams p = channel;
    p.eta = g.eta_grid[cell / nl];
    g.scores[cell] = w2_terms(g.lambda_grid[cell % nl], n_tot, p).w2_sq;
  });
  for (std::size_t i = 0; i < ne; ++i) g.lambda_opt[i] = g.lambda_grid[argmax_first(&g.scores[i * nl], nl)];
  return g;
}

// Smallest eta whose optimal lambda is in the quantum regime (above half a
// lambda grid step); nullopt when the whole grid is classical.
inline std::optional<double> transition_eta(const AllocationGrid& g) {
  const double step = g.lambda_grid.size() > 1 ? g.lambda_grid[1] - g.lambda_grid[0] : 0.0;
  for (std::size_t i = 0; i < g.eta_grid.size(); ++i) {
    if (g.lambda_opt[i] > 0.5 * step && g.lambda_opt[i] > 0.0) return g.eta_grid[i];
  }
  return std::nullopt;
}

struct Threshold {
  double value = 0.0;
  bool reachable = true;  // false when value > 1: no quantum regime at any transmissivity
};

// eta_c ~ (2 n_th + 1) / (1 + N_tot / (2 n_th + 1))
inline Threshold eta_critical(double n_tot, double n_th) {
  if (!std::isfinite(n_tot) || !(n_tot > 0.0)) throw InvalidParameter("threshold undefined: n_tot must be > 0");
  if (!std::isfinite(n_th) || n_th < 0.0) throw InvalidParameter("n_th must be finite and >= 0");
  const double bath = 2.0 * n_th + 1.0;
  const double v = bath / (1.0 + n_tot / bath);
  return {v, v <= 1.0};
}

// Threshold with detector imperfections: n_th replaced by the effective noise.
inline Threshold eta_critical(double n_tot, const ChannelParams& params) {
  return eta_critical(n_tot, effective_noise(params));
}

struct GradientDiagnostics {
  double d_disp_dlambda = 0.0;       // -2 eta N_tot
  double d_cov_dlambda_approx = 0.0;  // small-squeezing approximation of the covariance gain
  double d_disp_fd = 0.0;
  double d_cov_fd = 0.0;
  std::optional<double> cov_ratio;  // d_cov_fd / d_cov_dlambda_approx when the latter is nonzero
  double eta_c_analytic = 0.0;
  std::optional<double> eta_c_empirical;
};

namespace detail {

// One-sided derivative at lambda = 0 from symmetric differences about
// lambda = h (samples at 0 and 2h), Richardson-extrapolated over h, h/2, h/4.
template <class F>
double derivative_at_zero(F&& f, double h) {
  const double f0 = f(0.0);
  const auto d = [&](double step) { return (f(2.0 * step) - f0) / (2.0 * step); };
  const double d1 = d(h);
  const double d2 = d(0.5 * h);
  const double d3 = d(0.25 * h);
  const double r1 = 2.0 * d2 - d1;
  const double r2 = 2.0 * d3 - d2;
  return (4.0 * r2 - r1) / 3.0;
}

}  // namespace detail

inline GradientDiagnostics gradient_diagnostics(double n_tot, const ChannelParams& params, double h = 1e-6,
                                                bool with_empirical_threshold = true) {
  require_valid(params);
  if (!(h > 0.0 && h < 0.1)) throw InvalidParameter("finite-difference step must lie in (0, 0.1)");
  const Threshold th = eta_critical(n_tot, params.n_th);
  const double eta = params.effective_eta();
  const double bath = 2.0 * params.n_th + 1.0;

  GradientDiagnostics g;
  g.d_disp_dlambda = -2.0 * eta * n_tot;
  g.d_cov_dlambda_approx = 2.0 * eta * eta * n_tot / bath * (1.0 + n_tot / bath);
  g.d_disp_fd = detail::derivative_at_zero([&](double l) { return w2_terms(l, n_tot, params).displacement_term; }, h);
  g.d_cov_fd = detail::derivative_at_zero([&](double l) { return w2_terms(l, n_tot, params).bures_sq; }, h);
  if (g.d_cov_dlambda_approx != 0.0) g.cov_ratio = g.d_cov_fd / g.d_cov_dlambda_approx;
  g.eta_c_analytic = th.value;
  if (with_empirical_threshold) {
    g.eta_c_empirical = transition_eta(compute_allocation_grid(n_tot, params, default_eta_grid(), default_lambda_grid()));
  }
  return g;
}

}  // namespace qlidar
