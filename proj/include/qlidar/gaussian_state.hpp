#pragma once

// Single-mode Gaussian states in shot-noise units.
//
// Convention: the first moments are mu = (<x>, <p>) with x = (a + a^dag)/sqrt(2),
// and the covariance is sigma = 2 Cov(x, p), so the vacuum has sigma = I and a
// coherent state |alpha> has mu = sqrt(2) (Re alpha, Im alpha). The mean photon
// number is N = (tr sigma - 2)/4 + |mu|^2/2.

#include <cmath>
#include <string>

#include "qlidar/error.hpp"

namespace qlidar {

struct Vec2 {
  double q = 0.0;
  double p = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.q + b.q, a.p + b.p}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.q - b.q, a.p - b.p}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.q, s * a.p}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;

  constexpr double dot(Vec2 o) const { return q * o.q + p * o.p; }
  constexpr double norm_sq() const { return q * q + p * p; }
};

// Real symmetric 2x2 matrix. Only the upper triangle is stored, so symmetry
// holds exactly.
struct SymMat2 {
  double qq = 1.0;
  double qp = 0.0;
  double pp = 1.0;

  static constexpr SymMat2 identity() { return {1.0, 0.0, 1.0}; }
  static constexpr SymMat2 diag(double a, double b) { return {a, 0.0, b}; }
  static constexpr SymMat2 scalar(double s) { return {s, 0.0, s}; }

  constexpr double trace() const { return qq + pp; }
  constexpr double det() const { return qq * pp - qp * qp; }

  friend constexpr SymMat2 operator+(const SymMat2& a, const SymMat2& b) {
    return {a.qq + b.qq, a.qp + b.qp, a.pp + b.pp};
  }
  friend constexpr SymMat2 operator-(const SymMat2& a, const SymMat2& b) {
    return {a.qq - b.qq, a.qp - b.qp, a.pp - b.pp};
  }
  friend constexpr SymMat2 operator*(double s, const SymMat2& a) {
    return {s * a.qq, s * a.qp, s * a.pp};
  }
  friend constexpr bool operator==(const SymMat2&, const SymMat2&) = default;

  constexpr Vec2 apply(Vec2 v) const { return {qq * v.q + qp * v.p, qp * v.q + pp * v.p}; }
  // v^T M v
  constexpr double quad(Vec2 v) const { return qq * v.q * v.q + 2.0 * qp * v.q * v.p + pp * v.p * v.p; }
  // v^T M^{-1} v, M assumed invertible.
  constexpr double inv_quad(Vec2 v) const {
    return (pp * v.q * v.q - 2.0 * qp * v.q * v.p + qq * v.p * v.p) / det();
  }
  // tr(A B) for symmetric A, B.
  friend constexpr double trace_of_product(const SymMat2& a, const SymMat2& b) {
    return a.qq * b.qq + 2.0 * a.qp * b.qp + a.pp * b.pp;
  }

  // R M R^T with R the counter-clockwise rotation by `angle`.
  SymMat2 rotated(double angle) const {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * c * qq - 2.0 * c * s * qp + s * s * pp,
            c * s * (qq - pp) + (c * c - s * s) * qp,
            s * s * qq + 2.0 * c * s * qp + c * c * pp};
  }
};

inline Vec2 rotated(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.q - s * v.p, s * v.q + c * v.p};
}

struct GaussianState {
  Vec2 mu{};
  SymMat2 sigma = SymMat2::identity();

  double mean_photon_number() const { return (sigma.trace() - 2.0) / 4.0 + mu.norm_sq() / 2.0; }

  friend constexpr bool operator==(const GaussianState&, const GaussianState&) = default;
};

inline constexpr double kPhysicalityTolerance = 1e-12;

struct Validity {
  bool ok = true;
  std::string violated;  // empty when ok

  explicit operator bool() const { return ok; }
};

inline Validity validate(const GaussianState& s) {
  const double entries[] = {s.mu.q, s.mu.p, s.sigma.qq, s.sigma.qp, s.sigma.pp};
  for (double e : entries) {
    if (!std::isfinite(e)) return {false, "finite entries"};
  }
  if (!(s.sigma.qq > 0.0) || !(s.sigma.det() > 0.0)) return {false, "positive definite covariance"};
  if (s.sigma.det() < 1.0 - kPhysicalityTolerance) return {false, "uncertainty relation det(sigma) >= 1"};
  return {};
}

inline void require_valid(const GaussianState& s, const char* what = "state") {
  if (auto v = validate(s); !v) {
    throw InvalidParameter(std::string(what) + " violates " + v.violated);
  }
}

inline GaussianState rotated(const GaussianState& s, double angle) {
  return {rotated(s.mu, angle), s.sigma.rotated(angle)};
}

inline GaussianState squeezed_vacuum(double r) {
  if (!std::isfinite(r) || r < 0.0) throw InvalidParameter("squeezing parameter r must be finite and >= 0");
  return {{}, SymMat2::diag(std::exp(-2.0 * r), std::exp(2.0 * r))};
}

inline GaussianState thermal_state(double n_th) {
  if (!std::isfinite(n_th) || n_th < 0.0) throw InvalidParameter("thermal occupation n_th must be finite and >= 0");
  return {{}, SymMat2::scalar(2.0 * n_th + 1.0)};
}

inline GaussianState coherent_state(Vec2 mu) {
  if (!std::isfinite(mu.q) || !std::isfinite(mu.p)) throw InvalidParameter("displacement must be finite");
  return {mu, SymMat2::identity()};
}

// Total photon budget split between squeezing (lambda) and displacement (1 - lambda).
struct ProbeBudget {
  double n_tot = 10.0;
  double lambda = 0.5;
  double displacement_phase = 0.0;  // direction of mu in phase space, radians
  double lambda_max = 1.0;
};

struct SqueezeParams {
  double r = 0.0;
  double alpha_mag_sq = 0.0;
};

inline void require_valid(const ProbeBudget& b) {
  if (!std::isfinite(b.n_tot) || b.n_tot < 0.0) throw InvalidParameter("n_tot must be finite and >= 0");
  if (!(b.lambda_max >= 0.0 && b.lambda_max <= 1.0)) throw InvalidParameter("lambda_max must lie in [0, 1]");
  if (!(b.lambda >= 0.0 && b.lambda <= b.lambda_max)) throw InvalidParameter("lambda must lie in [0, lambda_max]");
  if (!std::isfinite(b.displacement_phase)) throw InvalidParameter("displacement_phase must be finite");
}

inline SqueezeParams squeeze_params(const ProbeBudget& b) {
  require_valid(b);
  return {std::asinh(std::sqrt(b.lambda * b.n_tot)), (1.0 - b.lambda) * b.n_tot};
}

// Displaced squeezed vacuum: squeezed along q, displaced along displacement_phase
// (phase 0 puts the mean on the squeezed quadrature).
inline GaussianState probe_from_budget(const ProbeBudget& b) {
  const SqueezeParams sp = squeeze_params(b);
  GaussianState s = squeezed_vacuum(sp.r);
  const double amp = std::sqrt(2.0 * sp.alpha_mag_sq);
  s.mu = {amp * std::cos(b.displacement_phase), amp * std::sin(b.displacement_phase)};
  return s;
}

}  // namespace qlidar
