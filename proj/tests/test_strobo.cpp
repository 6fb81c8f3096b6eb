#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace cavfb;
using Mat = CMatrix<double>;
using C = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

DensityMatrix<double> odd_cat(double x, int n_max = 40) {
  return DensityMatrix<double>::from_pure(cat_state<double>({std::sqrt(x), 0}, CatParity::Odd, FockDim(n_max)));
}

DensityMatrix<double> number_state(int n, int n_max = 8) {
  return DensityMatrix<double>::from_pure(fock_state<double>(n, FockDim(n_max)));
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(ConditionalSplit, ParityDefiniteAndMixedStates) {
  const auto cat = conditional_split(odd_cat(3.3));
  EXPECT_NEAR(cat.P_e, 1.0, 1e-12);
  EXPECT_EQ(max_abs(cat.rho_g), 0.0);
  EXPECT_DOUBLE_EQ(conditional_split(number_state(0)).P_g, 1.0);
  Eigen::VectorXd pop = Eigen::VectorXd::Zero(4);
  pop << 0.5, 0.5, 0, 0;
  const auto mix = conditional_split(DensityMatrix<double>::diagonal(pop));
  EXPECT_DOUBLE_EQ(mix.P_e, 0.5);
  EXPECT_DOUBLE_EQ(mix.P_g, 0.5);
  EXPECT_NEAR(mix.rho_e.trace().real(), mix.P_e, 1e-15);
}

TEST(FeedbackAtom, MatchesJaynesCummingsUnitary) {
  const Mat m = oracle::random_density(14, 12, 21);
  for (double mu : {0.3, kPi / 6, kPi / 2, 2.2}) {
    const Mat ref = oracle::jaynes_cummings_feedback(m, mu);
    const Mat got = feedback_atom_map(DensityMatrix<double>::adopt(m), mu).matrix();
    EXPECT_LT(max_abs(got - ref), 1e-12) << "mu=" << mu;
  }
}

TEST(FeedbackAtom, SimpleCases) {
  const auto vac = number_state(0);
  EXPECT_LT(max_abs(feedback_atom_map(vac, 0.0).matrix() - vac.matrix()), 1e-15);
  EXPECT_LT(max_abs(feedback_atom_map(vac, kPi / 2).matrix() - number_state(1).matrix()), 1e-15);
  const double mu = 0.7;
  const auto out = feedback_atom_map(number_state(3), mu);
  EXPECT_NEAR(out(3, 3).real(), std::pow(std::cos(mu * 2), 2), 1e-15);
  EXPECT_NEAR(out(4, 4).real(), std::pow(std::sin(mu * 2), 2), 1e-15);
  EXPECT_NEAR(out.trace(), 1.0, 1e-15);
}

TEST(FeedbackAtom, RefusesPopulatedTopLevel) {
  EXPECT_THROW(feedback_atom_map(number_state(8), 0.5), TruncationError);
}

TEST(FeedbackSuperop, ZeroEfficiencyIsIdentity) {
  const auto rho = DensityMatrix<double>::checked(oracle::random_density(10, 8, 2));
  const auto out = feedback_superop(rho, StroboParams<double>{0, 1.1, 0.1});
  EXPECT_LT(max_abs(out.matrix() - rho.matrix()), 1e-15);
}

TEST(FeedbackSuperop, OddCatPassesThroughAndVacuumGetsAPhoton) {
  const auto cat = odd_cat(3.3);
  for (double mu : {0.2, 1.0, 2.5})
    EXPECT_LT(max_abs(feedback_superop(cat, StroboParams<double>{1, mu, 0}).matrix() - cat.matrix()), 1e-15);
  const auto out = feedback_superop(number_state(0), StroboParams<double>{1, kPi / 2, 0});
  EXPECT_LT(max_abs(out.matrix() - number_state(1).matrix()), 1e-15);
}

TEST(FeedbackSuperop, PreservesTrace) {
  const auto rho = DensityMatrix<double>::checked(oracle::random_density(16, 14, 6));
  const auto out = feedback_superop(rho, StroboParams<double>{0.6, 0.9, 0});
  EXPECT_NEAR(out.trace(), 1.0, 1e-12);
}

TEST(Dissipation, MatchesVacuumBathMasterEquation) {
  const Mat m = oracle::random_density(12, 12, 9);
  for (double gt : {0.02, 0.2, 1.0}) {
    const Mat ref = oracle::rk4_feedback(m, 1.0, 0.0, gt, 2000);
    EXPECT_LT(max_abs(dissipation_map(DensityMatrix<double>::adopt(m), gt).matrix() - ref), 1e-11) << "gT=" << gt;
  }
}

TEST(Dissipation, SimpleCases) {
  const auto rho = DensityMatrix<double>::checked(oracle::random_density(8, 8, 1));
  EXPECT_EQ(max_abs(dissipation_map(rho, 0.0).matrix() - rho.matrix()), 0.0);
  const auto one = dissipation_map(number_state(1), 0.3);
  EXPECT_NEAR(one(1, 1).real(), std::exp(-0.3), 1e-15);
  EXPECT_NEAR(one(0, 0).real(), 1 - std::exp(-0.3), 1e-15);
}

TEST(Dissipation, CoherentStateShrinks) {
  const FockDim dim(40);
  const C alpha(1.4, 0.6);
  const double gt = 0.5;
  const auto out = dissipation_map(DensityMatrix<double>::from_pure(coherent_state<double>(alpha, dim)), gt);
  const auto ref = DensityMatrix<double>::from_pure(coherent_state<double>(alpha * std::exp(-gt / 2), dim));
  EXPECT_LT(max_abs(out.matrix() - ref.matrix()), 1e-10);
  EXPECT_NEAR(out.trace(), 1.0, 1e-12);
}

TEST(StroboStep, PureDissipationWithoutFeedback) {
  const auto rho = odd_cat(3.3);
  const auto a = strobo_step(rho, StroboParams<double>{0, 1.3, 0.1});
  const auto b = dissipation_map(rho, 0.1);
  EXPECT_LT(max_abs(a.matrix() - b.matrix()), 1e-15);
}

TEST(StroboStep, FeedbackRaisesOddParityAfterOneStep) {
  const auto rho = odd_cat(3.3);
  const double with = parity_expectation(strobo_step(rho, StroboParams<double>{1, kPi / 6, 0.02}));
  const double without = parity_expectation(strobo_step(rho, StroboParams<double>{0, kPi / 6, 0.02}));
  // Odd parity means <P> near -1; feedback keeps it closer to -1.
  EXPECT_LE(with, without);
  const auto vac = strobo_step(number_state(0), StroboParams<double>{1, kPi / 2, 0});
  EXPECT_LT(max_abs(vac.matrix() - number_state(1).matrix()), 1e-15);
}

TEST(StroboStep, PreservesTraceHermiticityAndOddBandsZero) {
  auto rho = odd_cat(3.3);
  const StroboParams<double> p{0.7, kPi / 2, 0.05};
  for (int k = 0; k < 100; ++k) rho = strobo_step(rho, p);
  const auto d = density_defects<double>(rho.matrix());
  EXPECT_LT(d.trace_error, 1e-11);
  EXPECT_LT(d.hermiticity, 1e-11);
  double odd = 0;
  for (int n = 0; n < rho.size(); ++n)
    for (int m = 0; m < rho.size(); ++m)
      if ((m - n) % 2 != 0) odd = std::max(odd, std::abs(rho(n, m)));
  EXPECT_LT(odd, 1e-13);
}

TEST(BandMatrix, IdentityWithoutFeedbackOrDissipation) {
  const auto a = build_band_matrix(0, StroboParams<double>{0, 0.4, 0}, FockDim(10));
  EXPECT_LT((a.entries - Eigen::MatrixXd::Identity(11, 11)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BandMatrix, PropagationEqualsOperationalStep) {
  const Mat m = oracle::random_density(16, 14, 13);
  const StroboParams<double> p{0.6, 0.8, 0.1};
  const Mat ref = strobo_step(DensityMatrix<double>::adopt(m), p).matrix();
  EXPECT_LT(max_abs(propagate_bands<double>(m, p, 1) - ref), 1e-12);
}

TEST(BandMatrix, TracePreservingOnPopulations) {
  // Column sums of A_0 are 1 except where feedback from the top even level leaves the basis.
  const auto a = build_band_matrix(0, StroboParams<double>{0.7, 1.0, 0.3}, FockDim(20));
  for (int j = 0; j < 19; ++j) EXPECT_NEAR(a.entries.col(j).sum(), 1.0, 1e-12) << "column " << j;
}

TEST(BandMatrix, SpectraAreContractive) {
  for (auto p : {StroboParams<double>{1, kPi / 2, 0.02}, StroboParams<double>{0.4, kPi / 6, 0.2},
                 StroboParams<double>{0.4, kPi / 2, 0.02}})
    for (int band = 0; band <= 20; ++band) {
      const auto ev = band_spectrum(build_band_matrix(band, p, FockDim(20)));
      EXPECT_LE(ev.cwiseAbs().maxCoeff(), 1 + 1e-10);
    }
}

TEST(Stationary, MatchesClosedForm) {
  const FockDim dim(20);
  for (auto p : {StroboParams<double>{1, kPi / 2, 0.02}, StroboParams<double>{0.4, kPi / 6, 0.2},
                 StroboParams<double>{0.4, kPi / 2, 0.02}, StroboParams<double>{0, 1.0, 0.1}}) {
    EXPECT_LT(trace_distance(stationary_state(p, dim), stationary_state_analytic(p, dim)), 1e-8);
  }
  EXPECT_NEAR(stationary_excited_probability(StroboParams<double>{1, kPi / 2, 0.02}), std::exp(-0.02), 1e-15);
  EXPECT_NEAR(stationary_excited_probability(StroboParams<double>{0.4, kPi / 6, 0.2}), 0.1 / (std::exp(0.2) - 1 + 0.1),
              1e-15);
  EXPECT_EQ(stationary_excited_probability(StroboParams<double>{0, 1.0, 0.2}), 0.0);
}

TEST(Stationary, RequiresDissipation) {
  EXPECT_THROW(stationary_state(StroboParams<double>{1, 1, 0}, FockDim(5)), PreconditionError);
}

TEST(Stationary, DegenerateFixedPointThrows) {
  // Without dissipation every odd level is fixed; a tiny gamma_T leaves several eigenvalues near 1.
  EXPECT_THROW(stationary_state(StroboParams<double>{1, 0.5, 1e-12}, FockDim(6)), NonUniqueFixedPointError);
}

TEST(PeeAnalytic, Limits) {
  EXPECT_DOUBLE_EQ(p_ee_analytic(3.3, 0.0), 1.0);
  EXPECT_NEAR(p_ee_analytic(3.3, 60.0), 0.0, 1e-12);
}

TEST(PeeAnalytic, EqualsParityAfterDissipation) {
  const auto cat = odd_cat(3.3);
  for (double gt : {0.05, 0.2, 1.0}) {
    const double pe = 0.5 * (1 - parity_expectation(dissipation_map(cat, gt)));
    EXPECT_NEAR(p_ee_analytic(3.3, gt), pe, 1e-8);
  }
}

TEST(RunSequence, NoFeedbackFollowsClosedForm) {
  const auto trace = run_sequence(odd_cat(3.3), StroboParams<double>{1, 0, 0.05}, 20);
  ASSERT_EQ(trace.entries.size(), 21u);
  for (const auto& e : trace.entries) {
    EXPECT_NEAR(e.P_e, p_ee_analytic(3.3, 0.05 * e.step), 1e-8);
    EXPECT_NEAR(e.P_e + e.P_g, 1.0, 1e-10);
    EXPECT_GT(e.digest.min_eigenvalue, -1e-9);
  }
}

TEST(RunSequence, LongRunReachesStationaryProbability) {
  const auto trace = run_sequence(odd_cat(3.3), StroboParams<double>{1, kPi / 2, 0.02}, 2000, false);
  EXPECT_NEAR(trace.entries.back().P_e, std::exp(-0.02), 1e-4);
}

TEST(RunSequence, LowerEfficiencyNeverHelps) {
  for (auto [mu, gt] : {std::pair{kPi / 6, 0.02}, std::pair{kPi / 2, 0.2}}) {
    const auto hi = run_sequence(odd_cat(3.3), StroboParams<double>{1, mu, gt}, 200, false);
    const auto lo = run_sequence(odd_cat(3.3), StroboParams<double>{0.4, mu, gt}, 200, false);
    for (std::size_t k = 0; k < hi.entries.size(); ++k) EXPECT_LE(lo.entries[k].P_e, hi.entries[k].P_e + 1e-12);
  }
}

TEST(RunSequence, RejectsZeroSteps) {
  EXPECT_THROW(run_sequence(odd_cat(3.3), StroboParams<double>{1, 0, 0.1}, 0), PreconditionError);
}

TEST(ResonanceAngle, Values) {
  EXPECT_NEAR(resonance_angle(1.0, 0), kPi / 2, 1e-15);
  EXPECT_NEAR(resonance_angle(4.0, 0), kPi / 4, 1e-15);
  EXPECT_NEAR(resonance_angle(3.3, 0), 0.8647, 1e-4);
  EXPECT_THROW(resonance_angle(0.0, 0), PreconditionError);
}

TEST(ProbeMeasurement, OperatorsAreComplete) {
  const FockDim dim(10);
  const C ce = std::polar(std::sqrt(0.3), 0.4), cg = std::polar(std::sqrt(0.7), -1.1);
  const auto [me, mg] = probe_measurement_operators<double>(ce, cg, 1.3, dim);
  for (int n = 0; n < dim.size(); ++n) EXPECT_NEAR(std::norm(me[n]) + std::norm(mg[n]), 1.0, 1e-14);
}

TEST(ProbeMeasurement, OnlyHalfPulsesWithPiShiftGiveProjectors) {
  const FockDim dim(12);
  const double h = std::sqrt(0.5);
  EXPECT_TRUE(conditional_maps_are_projective<double>({h, 0}, {h, 0}, kPi, dim));
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  int projective = 0;
  for (int i = 0; i < 200; ++i) {
    const double w = u(rng);
    const C ce = std::polar(std::sqrt(w), 2 * kPi * u(rng)), cg = std::polar(std::sqrt(1 - w), 2 * kPi * u(rng));
    if (conditional_maps_are_projective<double>(ce, cg, 2 * kPi * u(rng), dim)) ++projective;
  }
  EXPECT_EQ(projective, 0);
  for (double phi : {kPi / 2, 2.0, 3.0}) EXPECT_FALSE(conditional_maps_are_projective<double>({h, 0}, {h, 0}, phi, dim));
  EXPECT_FALSE(conditional_maps_are_projective<double>({0.8, 0}, {0.6, 0}, kPi, dim));
}
