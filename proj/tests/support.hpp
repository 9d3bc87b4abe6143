#pragma once

// Shared helpers for the test binaries: hand-rolled random state generators
// and the reader for the frozen Fock-oracle table.

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlidar/gaussian_state.hpp"

namespace qlidar::qtest {

// Random physical state: thermal core, squeezed and rotated, then displaced.
// Bounds keep everything well inside double range for the metric tests.
struct StateGen {
  double max_n_bar = 2.0;
  double max_r = 1.2;
  double max_mu = 4.0;

  GaussianState operator()(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double n_bar = max_n_bar * u(rng);
    const double r = max_r * u(rng);
    const double phi = std::numbers::pi * u(rng);
    GaussianState s;
    s.sigma = ((2.0 * n_bar + 1.0) * SymMat2::diag(std::exp(-2.0 * r), std::exp(2.0 * r))).rotated(phi);
    s.mu = {max_mu * (2.0 * u(rng) - 1.0), max_mu * (2.0 * u(rng) - 1.0)};
    return s;
  }
};

inline GaussianState pure_state(std::mt19937_64& rng) { return StateGen{0.0, 1.0, 3.0}(rng); }

inline double max_abs_diff(const GaussianState& a, const GaussianState& b) {
  return std::max({std::abs(a.mu.q - b.mu.q), std::abs(a.mu.p - b.mu.p), std::abs(a.sigma.qq - b.sigma.qq),
                   std::abs(a.sigma.qp - b.sigma.qp), std::abs(a.sigma.pp - b.sigma.pp)});
}

struct OracleRow {
  std::string id;
  GaussianState s0;
  GaussianState s1;
  int cutoff = 0;
  double fidelity = 0.0;
  double overlap_half = 0.0;
};

inline std::vector<OracleRow> read_oracle_table(const std::string& path = QLIDAR_ORACLE_TABLE) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<OracleRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ss(line);
    OracleRow r;
    ss >> r.id >> r.s0.mu.q >> r.s0.mu.p >> r.s0.sigma.qq >> r.s0.sigma.qp >> r.s0.sigma.pp >> r.s1.mu.q >>
        r.s1.mu.p >> r.s1.sigma.qq >> r.s1.sigma.qp >> r.s1.sigma.pp >> r.cutoff >> r.fidelity >> r.overlap_half;
    if (!ss) throw std::runtime_error("malformed oracle row: " + line);
    rows.push_back(r);
  }
  return rows;
}

inline OracleRow oracle_case(const std::string& id) {
  for (const OracleRow& r : read_oracle_table()) {
    if (r.id == id) return r;
  }
  throw std::runtime_error("oracle case not found: " + id);
}

}  // namespace qlidar::qtest
