#pragma once

#include <cmath>

#include "qlidar/error.hpp"
#include "qlidar/gaussian_state.hpp"

namespace qlidar {

// Lossy thermal channel with an optional imperfect detector. Detector
// efficiency multiplies the channel transmissivity.
struct ChannelParams {
  double eta = 1.0;
  double n_th = 0.0;
  double eta_det = 1.0;
  double v_el = 0.0;  // electronic noise, shot-noise units

  double effective_eta() const { return eta * eta_det; }
};

inline void require_valid(const ChannelParams& c) {
  if (!(c.eta >= 0.0 && c.eta <= 1.0)) throw InvalidParameter("eta must lie in [0, 1]");
  if (!std::isfinite(c.n_th) || c.n_th < 0.0) throw InvalidParameter("n_th must be finite and >= 0");
  if (!(c.eta_det > 0.0 && c.eta_det <= 1.0)) throw InvalidParameter("eta_det must lie in (0, 1]");
  if (!std::isfinite(c.v_el) || c.v_el < 0.0) throw InvalidParameter("v_el must be finite and >= 0");
}

// mu -> sqrt(eta) mu,  sigma -> eta sigma + (1 - eta)(2 n_th + 1) I,
// with eta the effective transmissivity.
inline GaussianState apply_loss(const GaussianState& in, const ChannelParams& c) {
  require_valid(in, "input state");
  require_valid(c);
  const double eta = c.effective_eta();
  const double bath = (1.0 - eta) * (2.0 * c.n_th + 1.0);
  GaussianState out;
  out.mu = std::sqrt(eta) * in.mu;
  out.sigma = {eta * in.sigma.qq + bath, eta * in.sigma.qp, eta * in.sigma.pp + bath};
  return out;
}

// Electronic detector noise folded into the bath occupation:
// n_eff = n_th + v_el / (2 (1 - eta_tot)).
inline double effective_noise(const ChannelParams& c) {
  require_valid(c);
  if (c.v_el == 0.0) return c.n_th;
  const double eta = c.effective_eta();
  if (eta >= 1.0) {
    throw NumericalError("effective noise diverges at eta_tot = 1 with v_el > 0; treat the lossless noisy detector separately");
  }
  return c.n_th + c.v_el / (2.0 * (1.0 - eta));
}

// Same channel with the electronic noise moved into n_th.
inline ChannelParams with_effective_noise(const ChannelParams& c) {
  ChannelParams out = c;
  out.n_th = effective_noise(c);
  out.v_el = 0.0;
  return out;
}

}  // namespace qlidar
