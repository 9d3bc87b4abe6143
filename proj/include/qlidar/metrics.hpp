#pragma once

// Distinguishability scores between two single-mode Gaussian states:
// Wasserstein-2 (Gelbrich), Bures covariance distance, Uhlmann fidelity,
// Bhattacharyya and Chernoff exponents, and homodyne SNR.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "qlidar/gaussian_state.hpp"
#include "qlidar/linalg2.hpp"

namespace qlidar {

// ---------------------------------------------------------------------------
// Transport metrics

inline double bures_sq(const SymMat2& sigma0, const SymMat2& sigma1) {
  require_spd(sigma0, "sigma0");
  require_spd(sigma1, "sigma1");
  if (sigma0 == sigma1) return 0.0;
  // tr sqrt(M) = sqrt(tr M + 2 sqrt(det M)) with M = sigma0^1/2 sigma1 sigma0^1/2,
  // tr M = tr(sigma0 sigma1), det M = det sigma0 det sigma1.
  const double cross = std::sqrt(trace_of_product(sigma0, sigma1) + 2.0 * std::sqrt(sigma0.det() * sigma1.det()));
  return std::max(0.0, sigma0.trace() + sigma1.trace() - 2.0 * cross);
}

// Same quantity through explicit eigen-decompositions. Slower; kept to
// cross-check the closed form.
inline double bures_sq_eigen(const SymMat2& sigma0, const SymMat2& sigma1) {
  require_spd(sigma0, "sigma0");
  require_spd(sigma1, "sigma1");
  const SymMat2 r = apply_spectral(sigma0, [](double x) { return std::sqrt(x); });
  // r sigma1 r, written out for symmetric factors
  const double a = r.qq * sigma1.qq + r.qp * sigma1.qp;
  const double b = r.qq * sigma1.qp + r.qp * sigma1.pp;
  const double c = r.qp * sigma1.qq + r.pp * sigma1.qp;
  const double d = r.qp * sigma1.qp + r.pp * sigma1.pp;
  const SymMat2 m{a * r.qq + b * r.qp, a * r.qp + b * r.pp, c * r.qp + d * r.pp};
  const SymEigen2 e = eigen_sym(m);
  const double cross = std::sqrt(std::max(0.0, e.lo)) + std::sqrt(std::max(0.0, e.hi));
  return std::max(0.0, sigma0.trace() + sigma1.trace() - 2.0 * cross);
}

struct W2Terms {
  double w2_sq = 0.0;
  double displacement_term = 0.0;
  double bures_sq = 0.0;
};

inline W2Terms w2_sq(const GaussianState& s0, const GaussianState& s1) {
  require_valid(s0, "state0");
  require_valid(s1, "state1");
  W2Terms t;
  t.displacement_term = (s1.mu - s0.mu).norm_sq();
  t.bures_sq = bures_sq(s0.sigma, s1.sigma);
  t.w2_sq = t.displacement_term + t.bures_sq;
  return t;
}

// ---------------------------------------------------------------------------
// Overlap metrics

// ln F with F = ||sqrt(rho0) sqrt(rho1)||_1^2:
//   F = 2 / (sqrt(D + L) - sqrt(L)) exp(-dmu^T (s0 + s1)^-1 dmu),
//   D = det(s0 + s1), L = (det s0 - 1)(det s1 - 1).
inline double log_fidelity(const GaussianState& s0, const GaussianState& s1) {
  require_valid(s0, "state0");
  require_valid(s1, "state1");
  const SymMat2 sum = s0.sigma + s1.sigma;
  const double d = sum.det();
  const double l = std::max(0.0, (s0.sigma.det() - 1.0) * (s1.sigma.det() - 1.0));
  const double denom = d / (std::sqrt(d + l) + std::sqrt(l));
  return std::numbers::ln2 - std::log(denom) - sum.inv_quad(s1.mu - s0.mu);
}

inline double gaussian_fidelity(const GaussianState& s0, const GaussianState& s1) {
  return std::exp(log_fidelity(s0, s1));
}

namespace detail {

// Below this thermal occupation a Williamson mode is treated as pure.
inline constexpr double kPureOccupation = 1e-12;

// For a thermal mode with symplectic eigenvalue nu: ln Tr rho^p and the
// symplectic eigenvalue of rho^p / Tr rho^p.
struct PowerTerms {
  double log_trace = 0.0;
  double nu = 1.0;
};

inline PowerTerms power_terms(double nu, double p) {
  const double n = 0.5 * (nu - 1.0);
  if (n < kPureOccupation) return {};
  const double beta = std::log1p(1.0 / n);
  return {-p * std::log(n) - std::log(std::expm1(p * beta)), 1.0 / std::tanh(0.5 * p * beta)};
}

}  // namespace detail

// ln Tr[rho0^s rho1^(1-s)] for s in the open interval (0, 1). The endpoints
// are 0 (unit trace).
inline double log_s_overlap(const GaussianState& s0, const GaussianState& s1, double s) {
  require_valid(s0, "state0");
  require_valid(s1, "state1");
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidParameter("s must lie in [0, 1]");
  if (s == 0.0 || s == 1.0) return 0.0;
  const double nu0 = std::sqrt(std::max(1.0, s0.sigma.det()));
  const double nu1 = std::sqrt(std::max(1.0, s1.sigma.det()));
  const detail::PowerTerms a = detail::power_terms(nu0, s);
  const detail::PowerTerms b = detail::power_terms(nu1, 1.0 - s);
  // Normalised powers are Gaussian with covariances (nu(p)/nu) sigma; their
  // overlap is 2 / sqrt(det V) exp(-dmu^T V^-1 dmu), V the covariance sum.
  const SymMat2 v = (a.nu / nu0) * s0.sigma + (b.nu / nu1) * s1.sigma;
  return a.log_trace + b.log_trace + std::numbers::ln2 - 0.5 * std::log(v.det()) - v.inv_quad(s1.mu - s0.mu);
}

inline double s_overlap(const GaussianState& s0, const GaussianState& s1, double s) {
  return std::exp(log_s_overlap(s0, s1, s));
}

enum class QbbMode { overlap, fidelity_proxy };

inline constexpr double kDefaultSaturationCap = 700.0;

// An error exponent -ln(...) that is capped when the overlap underflows.
struct Exponent {
  double value = 0.0;
  bool saturated = false;
};

inline Exponent capped_exponent(double value, double cap) {
  if (!std::isfinite(value) || value > cap) return {cap, true};
  return {std::max(0.0, value), false};
}

inline Exponent xi_qbb(const GaussianState& s0, const GaussianState& s1, QbbMode mode = QbbMode::overlap,
                       double cap = kDefaultSaturationCap) {
  const double v = mode == QbbMode::overlap ? -log_s_overlap(s0, s1, 0.5) : -0.5 * log_fidelity(s0, s1);
  return capped_exponent(v, cap);
}

struct ChernoffResult {
  double xi = 0.0;
  double s_opt = 0.5;
  bool saturated = false;
};

// Minimises ln Tr[rho0^s rho1^(1-s)] (convex in s) by golden-section search.
inline ChernoffResult xi_qcb(const GaussianState& s0, const GaussianState& s1, double tolerance = 1e-8,
                             double cap = kDefaultSaturationCap) {
  const auto f = [&](double s) { return log_s_overlap(s0, s1, s); };
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0;
  double b = 1.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // Start from the symmetric point so flat profiles (pure pairs) report s = 1/2;
  // the search only wins when it is lower by more than rounding noise.
  double s_best = 0.5;
  double f_best = f(0.5);
  const double margin = 1e-12 * std::max(1.0, std::abs(f_best));
  for (auto [s, v] : {std::pair{0.5 * (a + b), f(0.5 * (a + b))}, std::pair{c, fc}, std::pair{d, fd}}) {
    if (v < f_best - margin) {
      f_best = v;
      s_best = s;
    }
  }
  const Exponent e = capped_exponent(-f_best, cap);
  return {e.value, s_best, e.saturated};
}

// ---------------------------------------------------------------------------
// Homodyne detection

enum class VarianceModel { h1, max_h0_h1 };

inline double quadrature_variance(const GaussianState& h1, const GaussianState& h0, double theta,
                                  VarianceModel model) {
  const Vec2 u{std::cos(theta), std::sin(theta)};
  const double v1 = h1.sigma.quad(u);
  return model == VarianceModel::h1 ? v1 : std::max(v1, h0.sigma.quad(u));
}

// SNR^2(theta) = (u_theta . (mu1 - mu0))^2 / V_theta
inline double homodyne_snr(const GaussianState& h1, const GaussianState& h0, double theta,
                           VarianceModel model = VarianceModel::h1) {
  require_valid(h1, "H1 state");
  require_valid(h0, "H0 state");
  const Vec2 u{std::cos(theta), std::sin(theta)};
  const double proj = u.dot(h1.mu - h0.mu);
  return proj * proj / quadrature_variance(h1, h0, theta, model);
}

struct QuadratureResult {
  double theta_opt = 0.0;  // in [0, pi)
  double snr_sq_opt = 0.0;
  bool degenerate = false;  // no displacement; theta is the minor axis of sigma_H1
};

namespace detail {

inline double wrap_half_turn(double theta) {
  theta = std::fmod(theta, std::numbers::pi);
  return theta < 0.0 ? theta + std::numbers::pi : theta;
}

template <class F>
double golden_max(F&& f, double a, double b, double tolerance) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Quadrature maximising SNR^2. Under the H1 variance model the maximiser is
// u ~ sigma_H1^-1 dmu; the closed-form angle (and a coarse scan, which matters
// for the max-variance model) seeds a golden-section refinement.
inline QuadratureResult optimal_quadrature(const GaussianState& h1, const GaussianState& h0,
                                           VarianceModel model = VarianceModel::h1) {
  require_valid(h1, "H1 state");
  require_valid(h0, "H0 state");
  const Vec2 dmu = h1.mu - h0.mu;
  if (dmu.norm_sq() == 0.0) return {eigen_sym(h1.sigma).angle, 0.0, true};

  const auto snr = [&](double t) { return homodyne_snr(h1, h0, t, model); };
  const auto closed_form = [&](const SymMat2& s) {
    const Vec2 u{s.pp * dmu.q - s.qp * dmu.p, -s.qp * dmu.q + s.qq * dmu.p};  // adj(s) dmu
    return std::atan2(u.p, u.q);
  };

  constexpr int kScan = 360;
  double scan_best = 0.0;
  double scan_val = -1.0;
  for (int i = 0; i < kScan; ++i) {
    const double t = std::numbers::pi * i / kScan;
    if (const double v = snr(t); v > scan_val) {
      scan_val = v;
      scan_best = t;
    }
  }

  const double step = std::numbers::pi / kScan;
  double best_theta = 0.0;
  double best_val = -1.0;
  for (double seed : {closed_form(h1.sigma), closed_form(h0.sigma), scan_best}) {
    const double t = detail::golden_max(snr, seed - step, seed + step, 1e-10);
    for (double cand : {t, seed}) {
      if (const double v = snr(cand); v > best_val) {
        best_val = v;
        best_theta = cand;
      }
    }
  }
  return {detail::wrap_half_turn(best_theta), best_val, false};
}

// ---------------------------------------------------------------------------
// Full report

struct MetricOptions {
  double saturation_cap = kDefaultSaturationCap;
  double chernoff_tolerance = 1e-8;
  VarianceModel variance = VarianceModel::h1;
};

struct MetricReport {
  double w2_sq = 0.0;
  double displacement_term = 0.0;
  double bures_sq = 0.0;
  double fidelity = 1.0;
  double xi_qbb = 0.0;        // -ln Tr[sqrt(rho0) sqrt(rho1)]
  double xi_qbb_proxy = 0.0;  // -1/2 ln F
  double xi_qcb = 0.0;
  double s_opt = 0.5;
  double snr_sq_opt = 0.0;
  double theta_opt = 0.0;
  bool xi_qbb_saturated = false;
  bool xi_qbb_proxy_saturated = false;
  bool xi_qcb_saturated = false;
  bool snr_degenerate = false;
};

// `reference` plays rho0 / H0 (e.g. the thermal background), `signal` rho1 / H1.
inline MetricReport metric_report(const GaussianState& reference, const GaussianState& signal,
                                  const MetricOptions& opt = {}) {
  MetricReport r;
  const W2Terms w = w2_sq(reference, signal);
  r.w2_sq = w.w2_sq;
  r.displacement_term = w.displacement_term;
  r.bures_sq = w.bures_sq;
  r.fidelity = gaussian_fidelity(reference, signal);
  const Exponent ov = xi_qbb(reference, signal, QbbMode::overlap, opt.saturation_cap);
  const Exponent px = xi_qbb(reference, signal, QbbMode::fidelity_proxy, opt.saturation_cap);
  r.xi_qbb = ov.value;
  r.xi_qbb_saturated = ov.saturated;
  r.xi_qbb_proxy = px.value;
  r.xi_qbb_proxy_saturated = px.saturated;
  const ChernoffResult c = xi_qcb(reference, signal, opt.chernoff_tolerance, opt.saturation_cap);
  r.xi_qcb = c.xi;
  r.s_opt = c.s_opt;
  r.xi_qcb_saturated = c.saturated;
  const QuadratureResult q = optimal_quadrature(signal, reference, opt.variance);
  r.snr_sq_opt = q.snr_sq_opt;
  r.theta_opt = q.theta_opt;
  r.snr_degenerate = q.degenerate;
  return r;
}

}  // namespace qlidar
