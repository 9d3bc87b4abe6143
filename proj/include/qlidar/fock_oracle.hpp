#pragma once

// Brute-force reference for the Gaussian closed forms: density matrices in a
// truncated photon-number basis, built as rho = D S rho_th S^dag D^dag with
// the displacement and squeezing unitaries obtained by exponentiating
// truncated generators.

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "qlidar/error.hpp"
#include "qlidar/gaussian_state.hpp"
#include "qlidar/linalg2.hpp"

namespace qlidar::fock {

using Matrix = Eigen::MatrixXcd;
using cplx = std::complex<double>;

struct FockDensity {
  Matrix matrix;
  double trace_deficit = 0.0;  // 1 - tr(matrix)

  int dim() const { return static_cast<int>(matrix.rows()); }
};

struct OracleOptions {
  double truncation_budget = 1e-8;
  int padding = -1;  // extra working levels above the cutoff; -1 picks max(40, cutoff)
  bool verify_moments = true;
  double moment_tolerance = 1e-8;
};

// Cutoffs sized for the truncation budget on the test grids.
inline int default_cutoff(double mean_photon_number) {
  if (mean_photon_number <= 3.0) return 60;
  if (mean_photon_number <= 10.0) return 80;
  return 200;
}

// Cutoff whose dropped tail should stay below `tail`. The number distribution
// decays no slower than a thermal state with the widest quadrature variance,
// shifted by the displacement.
inline int suggested_cutoff(const GaussianState& state, double tail = 1e-11) {
  const double n_eff = 0.5 * (eigen_sym(state.sigma).hi - 1.0);
  const double alpha = std::sqrt(0.5 * state.mu.norm_sq());
  double k = alpha * alpha + 6.0 * alpha + 10.0;
  if (n_eff > 1e-12) k += std::log(tail) / std::log(n_eff / (n_eff + 1.0));
  return std::clamp(static_cast<int>(std::ceil(k)), 20, 400);
}

inline Matrix annihilation(int dim) {
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline FockDensity number_state(int n, int dim) {
  if (n < 0 || n >= dim) throw InvalidParameter("number state outside the truncated basis");
  FockDensity f{Matrix::Zero(dim, dim), 0.0};
  f.matrix(n, n) = 1.0;
  return f;
}

// exp(g) for anti-Hermitian g, through the spectrum of the Hermitian i g.
inline Matrix unitary_from_generator(const Matrix& g) {
  const Matrix h = cplx(0.0, 1.0) * g;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition of generator failed");
  const Eigen::VectorXcd phases = (-cplx(0.0, 1.0) * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Clamped spectral power; 0^0 = 1, so p = 0 gives the identity.
inline Matrix hermitian_power(const Matrix& rho, double p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition of density matrix failed");
  Eigen::VectorXd w = es.eigenvalues();
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::pow(std::max(0.0, w(i)), p);
  return es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

// Thermal occupation, squeezing and squeezing axis of a covariance:
// sigma = (2 n + 1) R(phi) diag(e^-2r, e^2r) R(phi)^T.
struct WilliamsonForm {
  double n_bar = 0.0;
  double r = 0.0;
  double phi = 0.0;  // direction of the squeezed quadrature
};

inline WilliamsonForm williamson_form(const SymMat2& sigma) {
  const double nu = std::sqrt(std::max(1.0, sigma.det()));
  const SymEigen2 e = eigen_sym((1.0 / nu) * sigma);
  return {0.5 * (nu - 1.0), 0.25 * std::log(e.hi / e.lo), e.angle};
}

struct Moments {
  Vec2 mu;
  SymMat2 sigma;
};

// Quadrature moments in the library convention (x = (a + a^dag)/sqrt 2,
// sigma = 2 Cov), normalised by the trace of the truncated matrix.
inline Moments extract_moments(const FockDensity& f) {
  const Matrix& rho = f.matrix;
  const int dim = f.dim();
  cplx tr = 0.0, a1 = 0.0, a2 = 0.0;
  double nn = 0.0;
  for (int n = 0; n < dim; ++n) {
    tr += rho(n, n);
    nn += n * rho(n, n).real();
    if (n >= 1) a1 += std::sqrt(static_cast<double>(n)) * rho(n, n - 1);
    if (n >= 2) a2 += std::sqrt(static_cast<double>(n) * (n - 1)) * rho(n, n - 2);
  }
  const double t = tr.real();
  a1 /= t;
  a2 /= t;
  nn /= t;
  const double xq = std::sqrt(2.0) * a1.real();
  const double xp = std::sqrt(2.0) * a1.imag();
  const double qq = a2.real() + nn + 0.5;
  const double pp = -a2.real() + nn + 0.5;
  const double qp = a2.imag();
  return {{xq, xp}, {2.0 * (qq - xq * xq), 2.0 * (qp - xq * xp), 2.0 * (pp - xp * xp)}};
}

inline double moment_mismatch(const Moments& m, const GaussianState& s) {
  return std::max({std::abs(m.mu.q - s.mu.q), std::abs(m.mu.p - s.mu.p), std::abs(m.sigma.qq - s.sigma.qq),
                   std::abs(m.sigma.qp - s.sigma.qp), std::abs(m.sigma.pp - s.sigma.pp)});
}

inline std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

inline FockDensity build_state(const GaussianState& state, int cutoff, const OracleOptions& opt = {}) {
  require_valid(state);
  if (cutoff < 2) throw InvalidParameter("cutoff must be >= 2");
  const int work = cutoff + (opt.padding >= 0 ? opt.padding : std::max(40, cutoff));
  const WilliamsonForm wf = williamson_form(state.sigma);

  Eigen::VectorXd pops = Eigen::VectorXd::Zero(work);
  pops(0) = 1.0 / (wf.n_bar + 1.0);
  const double ratio = wf.n_bar / (wf.n_bar + 1.0);
  for (int k = 1; k < work; ++k) pops(k) = pops(k - 1) * ratio;
  Matrix rho = pops.cast<cplx>().asDiagonal();

  const Matrix a = annihilation(work);
  const Matrix ad = a.adjoint();
  Matrix u = Matrix::Identity(work, work);
  if (wf.r > 0.0) {
    const cplx zeta = std::polar(wf.r, 2.0 * wf.phi);
    const Matrix a2 = a * a;
    u = unitary_from_generator(0.5 * (std::conj(zeta) * a2 - zeta * a2.adjoint()));
  }
  const cplx alpha(state.mu.q / std::sqrt(2.0), state.mu.p / std::sqrt(2.0));
  if (alpha != cplx(0.0)) u = unitary_from_generator(alpha * ad - std::conj(alpha) * a) * u;
  rho = u * rho * u.adjoint();

  FockDensity f;
  f.matrix = rho.topLeftCorner(cutoff, cutoff);
  f.matrix = 0.5 * (f.matrix + f.matrix.adjoint()).eval();
  f.trace_deficit = std::max(0.0, 1.0 - f.matrix.trace().real());
  if (f.trace_deficit > opt.truncation_budget) {
    throw NumericalError("cutoff " + std::to_string(cutoff) + " too small: trace deficit " +
                         sci(f.trace_deficit) + "; try cutoff >= " +
                         std::to_string(static_cast<int>(std::ceil(1.5 * cutoff))));
  }
  if (opt.verify_moments) {
    const double err = moment_mismatch(extract_moments(f), state);
    if (err > opt.moment_tolerance) {
      throw NumericalError("Fock moments deviate from the target state by " + sci(err) +
                           "; increase cutoff or padding");
    }
  }
  return f;
}

inline void require_same_dim(const FockDensity& a, const FockDensity& b) {
  if (a.dim() != b.dim()) throw InvalidParameter("density matrices have different truncation dimensions");
}

// F = (tr sqrt(sqrt(rho0) rho1 sqrt(rho0)))^2, evaluated as the squared trace
// norm of sqrt(rho0) sqrt(rho1). Singular values keep absolute accuracy where
// the square roots of tiny eigenvalues would not, and the form is symmetric.
inline double oracle_fidelity(const FockDensity& rho0, const FockDensity& rho1) {
  require_same_dim(rho0, rho1);
  const Matrix a = hermitian_power(rho0.matrix, 0.5) * hermitian_power(rho1.matrix, 0.5);
  const double root = Eigen::BDCSVD<Matrix>(a).singularValues().sum();
  return root * root;
}

// Tr[rho0^s rho1^(1-s)]
inline double oracle_s_overlap(const FockDensity& rho0, const FockDensity& rho1, double s) {
  require_same_dim(rho0, rho1);
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidParameter("s must lie in [0, 1]");
  return (hermitian_power(rho0.matrix, s) * hermitian_power(rho1.matrix, 1.0 - s)).trace().real();
}

}  // namespace qlidar::fock
