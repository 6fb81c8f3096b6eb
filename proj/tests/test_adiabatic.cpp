#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace cavfb;
using C = std::complex<double>;

namespace {

DensityMatrix<double> pure(const StateVector<double>& v) { return DensityMatrix<double>::from_pure(v); }

// Overlap of the output field with the input shifted up by one photon.
double shifted_overlap(const StateVector<double>& psi, const DensityMatrix<double>& out) {
  const CVector<double>& in = psi.amplitudes();
  CVector<double> shifted = CVector<double>::Zero(in.size());
  for (int n = 0; n + 1 < in.size(); ++n) shifted[n + 1] = in[n];
  return std::real(shifted.dot(out.matrix() * shifted));
}

}  // namespace

TEST(DarkState, LimitsAndNormalization) {
  const auto early = dark_state<double>(2, 1.0, 0.0);
  EXPECT_NEAR(std::abs(early[0]), 1.0, 1e-15);
  const auto late = dark_state<double>(2, 0.0, 1.0);
  EXPECT_NEAR(std::abs(late[2]), 1.0, 1e-15);
  const auto mid = dark_state<double>(3, 1.0, 2.0);
  EXPECT_NEAR(mid.norm(), 1.0, 1e-15);
  EXPECT_EQ(mid[1], C(0));
  EXPECT_NEAR((sector_hamiltonian<double>(3, 1.0, 2.0) * mid).norm(), 0.0, 1e-15);
  EXPECT_THROW(dark_state<double>(1, 0.0, 0.0), DegenerateError);
}

TEST(SectorHamiltonian, IsHermitian) {
  const auto h = sector_hamiltonian<double>(4, 1.3, 0.7);
  EXPECT_LT((h - h.adjoint()).norm(), 1e-15);
}

TEST(IntegrateSector, MatchesRungeKuttaOracle) {
  const auto p = PulsePair<double>::with_area(20);
  for (int n : {0, 3}) {
    const auto a = integrate_sector<double>(n, p, 2000);
    const auto b = oracle::rk4_sector(n, p, 20000);
    EXPECT_LT((a - b).norm(), 1e-8) << n;
    EXPECT_NEAR(a.norm(), 1.0, 1e-12);
  }
}

TEST(IntegrateSector, TracksDarkStateSlowly) {
  const auto p = PulsePair<double>::with_area(200);
  for (int n : {0, 2, 5}) {
    double worst = 1;
    integrate_sector<double>(n, p, 4000, [&](double t, const Sector<double>& psi) {
      worst = std::min(worst, std::norm(dark_state<double>(n, p.g(t), p.omega(t)).dot(psi)));
    });
    EXPECT_GE(worst, 0.999) << n;
  }
}

TEST(IntegrateCrossing, AdiabaticTransferOfVariousInputs) {
  const FockDim dim(40);
  const auto p = PulsePair<double>::with_area(100);
  const auto vac = fock_state<double>(0, dim);
  const auto sup = fock_superposition<double>({{0, 1 / std::sqrt(2.0)}, {1, 1 / std::sqrt(2.0)}}, dim);
  const auto coh = coherent_state<double>({std::sqrt(3.3), 0}, dim);
  for (const auto* v : {&vac, &sup, &coh}) {
    const auto r = integrate_crossing(pure(*v), p);
    EXPECT_GE(r.transfer_fidelity, 0.999);
    EXPECT_GE(shifted_overlap(*v, r.final_field), 0.999);
    EXPECT_LT(r.max_excited_population, 1e-2);
    EXPECT_LT(r.max_norm_drift, 1e-9);
  }
}

TEST(IntegrateCrossing, SuddenCrossingFails) {
  const auto coh = coherent_state<double>({std::sqrt(3.3), 0}, FockDim(40));
  EXPECT_LT(integrate_crossing(pure(coh), PulsePair<double>::with_area(2)).transfer_fidelity, 0.9);
}

TEST(IntegrateCrossing, FidelityRisesAndExcitationFallsWithArea) {
  const auto rho = pure(coherent_state<double>({std::sqrt(3.3), 0}, FockDim(40)));
  double prev_f = 0, prev_e = 1;
  for (double area : {20.0, 50.0, 100.0, 200.0}) {
    const auto r = integrate_crossing(rho, PulsePair<double>::with_area(area));
    EXPECT_GT(r.transfer_fidelity, prev_f) << area;
    EXPECT_LT(r.max_excited_population, prev_e) << area;
    prev_f = r.transfer_fidelity;
    prev_e = r.max_excited_population;
  }
}

TEST(IntegrateCrossing, ErrorCases) {
  const auto vac = pure(fock_state<double>(0, FockDim(10)));
  EXPECT_THROW(integrate_crossing(vac, PulsePair<double>::with_area(100), 3), StepTooCoarseError);
  auto p = PulsePair<double>::with_area(100);
  p.delay = 0;
  EXPECT_THROW(integrate_crossing(vac, p), PreconditionError);
  const auto top = pure(fock_state<double>(10, FockDim(10)));
  EXPECT_THROW(integrate_crossing(top, PulsePair<double>::with_area(100)), TruncationError);
}

TEST(AdiabaticityReport, Verdicts) {
  const auto ok = adiabaticity_report(PulsePair<double>::with_area(100), 3.3, 1e-3, 1e-3);
  EXPECT_TRUE(ok.all_pass());
  ASSERT_EQ(ok.checks.size(), 4u);
  EXPECT_NEAR(ok.checks[2].ratio, 1 / 3.3e-3, 1e-9);

  const auto low = adiabaticity_report(PulsePair<double>::with_area(5), 3.3, 1e-3, 1e-3);
  EXPECT_FALSE(low.all_pass());
  EXPECT_EQ(low.checks[0].verdict, Inequality::Fail);

  const auto edge = adiabaticity_report(PulsePair<double>::with_area(10), 3.3, 1e-3, 1e-3);
  EXPECT_EQ(edge.checks[0].verdict, Inequality::Marginal);
  EXPECT_EQ(edge.checks[1].verdict, Inequality::Marginal);
  EXPECT_FALSE(edge.all_pass());
}
