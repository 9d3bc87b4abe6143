// Regenerates the frozen Fock-oracle reference table read by the test suite.
//
//   qlidar_oracle_table > tests/data/fock_oracle_reference.txt
//
// Every case is computed at the smallest cutoff (starting from the default
// for its photon number) whose values move by less than 1e-8 when the cutoff
// is raised by 50%.

#include <cmath>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qlidar/channel.hpp"
#include "qlidar/fock_oracle.hpp"
#include "qlidar/gaussian_state.hpp"

namespace {

using qlidar::GaussianState;
using qlidar::SymMat2;

struct Case {
  std::string id;
  GaussianState s0;
  GaussianState s1;
};

GaussianState random_state(std::mt19937_64& rng, bool pure) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double n_bar = pure ? 0.0 : 0.8 * u(rng);
  const double r = 0.6 * u(rng);
  const double phi = std::numbers::pi * u(rng);
  const double alpha_sq = 2.0 * u(rng);
  const double arg = 2.0 * std::numbers::pi * u(rng);
  GaussianState s;
  s.sigma = ((2.0 * n_bar + 1.0) * SymMat2::diag(std::exp(-2.0 * r), std::exp(2.0 * r))).rotated(phi);
  s.mu = {std::sqrt(2.0 * alpha_sq) * std::cos(arg), std::sqrt(2.0 * alpha_sq) * std::sin(arg)};
  return s;
}

std::vector<Case> grid_cases() {
  std::mt19937_64 rng(20250101);
  std::vector<Case> cases;
  for (int i = 0; i < 50; ++i) {
    const std::string id = fmt::format("g{:02d}", i);
    if (i < 10) {
      cases.push_back({id, random_state(rng, true), random_state(rng, true)});
    } else if (i < 20) {
      // received probe against its thermal background
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double n_tot = 0.5 + 2.0 * u(rng);
      const double lambda = u(rng);
      const double eta = u(rng);
      const double n_th = 0.5 * u(rng);
      const GaussianState probe = qlidar::probe_from_budget({n_tot, lambda});
      cases.push_back({id, qlidar::thermal_state(n_th), qlidar::apply_loss(probe, {eta, n_th})});
    } else {
      cases.push_back({id, random_state(rng, false), random_state(rng, false)});
    }
  }
  return cases;
}

struct Values {
  double fidelity;
  double overlap;
};

Values evaluate(const Case& c, int cutoff) {
  const auto r0 = qlidar::fock::build_state(c.s0, cutoff);
  const auto r1 = qlidar::fock::build_state(c.s1, cutoff);
  return {qlidar::fock::oracle_fidelity(r0, r1), qlidar::fock::oracle_s_overlap(r0, r1, 0.5)};
}

}  // namespace

int main() {
  std::vector<Case> cases = grid_cases();
  cases.push_back({"vac_th2", qlidar::thermal_state(0.0), qlidar::thermal_state(2.0)});
  cases.push_back({"coh_coh", qlidar::coherent_state({0.0, 0.0}), qlidar::coherent_state({std::sqrt(2.0), 0.0})});

  std::cout << "# Frozen Fock-space oracle values: fidelity ||sqrt(rho0) sqrt(rho1)||_1^2 and overlap Tr[sqrt(rho0) sqrt(rho1)].\n"
               "# Generated by qlidar_oracle_table; do not edit by hand.\n"
               "# case mu0_q mu0_p s0_qq s0_qp s0_pp mu1_q mu1_p s1_qq s1_qp s1_pp cutoff fidelity overlap_half\n";
  for (const Case& c : cases) {
    const double n = std::max(c.s0.mean_photon_number(), c.s1.mean_photon_number());
    int cutoff = c.id == "vac_th2" ? 200 : qlidar::fock::default_cutoff(n);
    Values v{};
    for (;;) {
      try {
        v = evaluate(c, cutoff);
        const Values w = evaluate(c, static_cast<int>(std::ceil(1.5 * cutoff)));
        if (std::abs(v.fidelity - w.fidelity) < 1e-8 && std::abs(v.overlap - w.overlap) < 1e-8) break;
      } catch (const qlidar::NumericalError&) {
      }
      cutoff = static_cast<int>(std::ceil(1.5 * cutoff));
      if (cutoff > 400) {
        std::cerr << "case " << c.id << " did not converge\n";
        return 1;
      }
    }
    std::cout << fmt::format("{} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {} {:.17g} {:.17g}\n",
                             c.id, c.s0.mu.q, c.s0.mu.p, c.s0.sigma.qq, c.s0.sigma.qp, c.s0.sigma.pp, c.s1.mu.q,
                             c.s1.mu.p, c.s1.sigma.qq, c.s1.sigma.qp, c.s1.sigma.pp, cutoff, v.fidelity, v.overlap);
  }
  return 0;
}
