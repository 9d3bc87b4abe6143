#pragma once

// Closed-form 2x2 symmetric linear algebra.

#include <cmath>
#include <numbers>

#include "qlidar/error.hpp"
#include "qlidar/gaussian_state.hpp"

namespace qlidar {

inline bool is_spd(const SymMat2& m) {
  return std::isfinite(m.qq) && std::isfinite(m.qp) && std::isfinite(m.pp) && m.qq > 0.0 && m.det() > 0.0;
}

inline void require_spd(const SymMat2& m, const char* what = "matrix") {
  if (!is_spd(m)) throw InvalidParameter(std::string(what) + " must be symmetric positive definite");
}

// sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M))
inline SymMat2 sqrt_spd(const SymMat2& m) {
  require_spd(m);
  const double s = std::sqrt(m.det());
  const double t = std::sqrt(m.trace() + 2.0 * s);
  return {(m.qq + s) / t, m.qp / t, (m.pp + s) / t};
}

// Eigen-decomposition of a symmetric 2x2 matrix. `angle` is the direction of
// the eigenvector belonging to `lo`, reduced to [0, pi).
struct SymEigen2 {
  double lo = 0.0;
  double hi = 0.0;
  double angle = 0.0;
};

inline SymEigen2 eigen_sym(const SymMat2& m) {
  const double mean = 0.5 * m.trace();
  const double half_diff = 0.5 * (m.qq - m.pp);
  const double radius = std::hypot(half_diff, m.qp);
  SymEigen2 e{mean - radius, mean + radius, 0.0};
  // Major axis sits at 0.5 atan2(2 qp, qq - pp); the minor axis is orthogonal.
  double major = 0.5 * std::atan2(m.qp, half_diff);
  double minor = major + 0.5 * std::numbers::pi;
  minor = std::fmod(minor, std::numbers::pi);
  if (minor < 0.0) minor += std::numbers::pi;
  e.angle = minor;
  return e;
}

// Matrix function f applied through the eigen-decomposition.
template <class F>
SymMat2 apply_spectral(const SymMat2& m, F&& f) {
  const SymEigen2 e = eigen_sym(m);
  const double c = std::cos(e.angle);
  const double s = std::sin(e.angle);
  const double flo = f(e.lo);
  const double fhi = f(e.hi);
  // lo eigenvector (c, s), hi eigenvector (-s, c)
  return {flo * c * c + fhi * s * s, (flo - fhi) * c * s, flo * s * s + fhi * c * c};
}

}  // namespace qlidar
