#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "qlidar/channel.hpp"
#include "qlidar/fock_oracle.hpp"
#include "qlidar/metrics.hpp"
#include "support.hpp"

using namespace qlidar;
using fock::FockDensity;

namespace {

double hermiticity_error(const fock::Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

int cutoff_for(const GaussianState& a, const GaussianState& b = GaussianState{}) {
  return std::max(fock::suggested_cutoff(a), fock::suggested_cutoff(b));
}

double min_eigenvalue(const fock::Matrix& m) {
  Eigen::SelfAdjointEigenSolver<fock::Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST(BuildState, Vacuum) {
  const FockDensity v = fock::build_state(GaussianState{}, 10);
  EXPECT_EQ(v.dim(), 10);
  EXPECT_EQ(v.trace_deficit, 0.0);
  EXPECT_NEAR(std::abs(v.matrix(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(v.matrix.cwiseAbs().sum(), 1.0, 1e-15);
}

TEST(BuildState, SqueezedVacuumMoments) {
  const FockDensity f = fock::build_state(squeezed_vacuum(0.5), 60);
  const fock::Moments m = fock::extract_moments(f);
  EXPECT_NEAR(m.sigma.qq, std::exp(-1.0), 1e-8);
  EXPECT_NEAR(m.sigma.pp, std::exp(1.0), 1e-8);
  EXPECT_NEAR(m.sigma.qp, 0.0, 1e-8);
  EXPECT_NEAR(m.mu.q, 0.0, 1e-8);
  EXPECT_NEAR(m.mu.p, 0.0, 1e-8);
}

TEST(BuildState, ThermalPopulations) {
  const double n = 2.0;
  const FockDensity f = fock::build_state(thermal_state(n), 200);
  EXPECT_LT(f.trace_deficit, 1e-8);
  for (int k = 0; k < 200; ++k) {
    const double expected = std::pow(n, k) / std::pow(n + 1.0, k + 1);
    ASSERT_NEAR(f.matrix(k, k).real(), expected, 1e-14) << k;
  }
  EXPECT_NEAR((f.matrix - fock::Matrix(f.matrix.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(BuildState, DensityMatrixInvariants) {
  std::mt19937_64 rng(71);
  const qtest::StateGen gen{0.8, 0.6, 2.0};
  for (int i = 0; i < 10; ++i) {
    const GaussianState s = gen(rng);
    const FockDensity f = fock::build_state(s, cutoff_for(s));
    EXPECT_LT(hermiticity_error(f.matrix), 1e-12);
    EXPECT_GE(min_eigenvalue(f.matrix), -1e-10);
    const double tr = f.matrix.trace().real();
    EXPECT_GE(tr, 1.0 - 1e-8);
    EXPECT_LE(tr, 1.0 + 1e-12);
  }
}

TEST(BuildState, TruncationErrorSuggestsCutoff) {
  try {
    fock::build_state(thermal_state(2.0), 20);
    FAIL() << "expected a cutoff error";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("cutoff >= 30"), std::string::npos) << e.what();
  }
  EXPECT_THROW(fock::build_state(GaussianState{}, 1), InvalidParameter);
  EXPECT_THROW(fock::build_state({{}, SymMat2::diag(0.5, 0.5)}, 10), InvalidParameter);
}

TEST(BuildState, MomentRoundTrip) {
  std::mt19937_64 rng(72);
  const qtest::StateGen gen{0.8, 0.6, 2.0};
  for (int i = 0; i < 50; ++i) {
    const GaussianState s = gen(rng);
    fock::OracleOptions opt;
    opt.verify_moments = false;  // checked explicitly here
    const FockDensity f = fock::build_state(s, cutoff_for(s), opt);
    EXPECT_LT(fock::moment_mismatch(fock::extract_moments(f), s), 1e-8) << "case " << i;
  }
}

TEST(OracleFidelity, Examples) {
  const FockDensity c = fock::build_state({{0.7, -0.4}, SymMat2::diag(0.6, 1.9)}, 60);
  EXPECT_NEAR(fock::oracle_fidelity(c, c), 1.0, 1e-10);

  const FockDensity v = fock::build_state(GaussianState{}, 60);
  const FockDensity a = fock::build_state({{std::sqrt(2.0), 0.0}, SymMat2::identity()}, 60);
  EXPECT_NEAR(fock::oracle_fidelity(v, a), std::exp(-1.0), 1e-7);

  EXPECT_NEAR(fock::oracle_fidelity(fock::number_state(0, 8), fock::number_state(1, 8)), 0.0, 1e-15);
  EXPECT_THROW(fock::oracle_fidelity(v, fock::number_state(0, 8)), InvalidParameter);
}

TEST(OracleFidelity, Symmetric) {
  std::mt19937_64 rng(73);
  const qtest::StateGen gen{0.8, 0.6, 2.0};
  for (int i = 0; i < 10; ++i) {
    const GaussianState sa = gen(rng), sb = gen(rng);
    const int cutoff = cutoff_for(sa, sb);
    const FockDensity a = fock::build_state(sa, cutoff);
    const FockDensity b = fock::build_state(sb, cutoff);
    EXPECT_NEAR(fock::oracle_fidelity(a, b), fock::oracle_fidelity(b, a), 1e-10);
  }
}

TEST(OracleSOverlap, Examples) {
  const FockDensity a = fock::build_state({{0.5, 0.5}, SymMat2::scalar(1.4)}, 60);
  for (double s : {0.0, 0.3, 0.5, 1.0}) EXPECT_NEAR(fock::oracle_s_overlap(a, a, s), 1.0, 1e-10) << s;

  const FockDensity b = fock::build_state(squeezed_vacuum(0.3), 60);
  EXPECT_NEAR(fock::oracle_s_overlap(a, b, 0.0), b.matrix.trace().real(), 1e-12);
  EXPECT_NEAR(fock::oracle_s_overlap(a, b, 0.0), 1.0, 1e-8);
  EXPECT_THROW(fock::oracle_s_overlap(a, b, 1.2), InvalidParameter);

  const qtest::OracleRow vt = qtest::oracle_case("vac_th2");
  const double fresh = fock::oracle_s_overlap(fock::build_state(GaussianState{}, 200),
                                              fock::build_state(thermal_state(2.0), 200), 0.5);
  EXPECT_NEAR(fresh, vt.overlap_half, 1e-12);
  EXPECT_NEAR(vt.overlap_half, 1.0 / std::sqrt(3.0), 1e-12);
}

TEST(FrozenTable, MatchesClosedForms) {
  const auto rows = qtest::read_oracle_table();
  ASSERT_EQ(rows.size(), 52u);
  for (const qtest::OracleRow& r : rows) {
    EXPECT_NEAR(gaussian_fidelity(r.s0, r.s1), r.fidelity, 1e-6) << r.id;
    EXPECT_NEAR(s_overlap(r.s0, r.s1, 0.5), r.overlap_half, 1e-6) << r.id;
  }
}

TEST(FrozenTable, RegressionAndCutoffConvergence) {
  // A spread of rows; the full sweep runs in the acceptance suite.
  const auto rows = qtest::read_oracle_table();
  for (const char* id : {"g00", "g13", "g27", "g41", "coh_coh"}) {
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.id == id; });
    ASSERT_NE(it, rows.end()) << id;
    const auto at = [&](int cutoff) {
      const FockDensity a = fock::build_state(it->s0, cutoff);
      const FockDensity b = fock::build_state(it->s1, cutoff);
      return std::pair{fock::oracle_fidelity(a, b), fock::oracle_s_overlap(a, b, 0.5)};
    };
    const auto [f, o] = at(it->cutoff);
    EXPECT_NEAR(f, it->fidelity, 1e-12) << id;
    EXPECT_NEAR(o, it->overlap_half, 1e-12) << id;
    const auto [f2, o2] = at(static_cast<int>(std::ceil(1.5 * it->cutoff)));
    EXPECT_LT(std::abs(f2 - f), 1e-8) << id;
    EXPECT_LT(std::abs(o2 - o), 1e-8) << id;
  }
}
