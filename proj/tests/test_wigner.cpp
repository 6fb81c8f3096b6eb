#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace cavfb;
using C = std::complex<double>;
constexpr double kPi = std::numbers::pi;

TEST(Laguerre, LowOrdersAndExplicitSum) {
  for (int k : {0, 1, 5})
    for (double x : {0.0, 0.7, 3.0}) {
      EXPECT_EQ(generalized_laguerre(0, k, x), 1.0);
      EXPECT_NEAR(generalized_laguerre(1, k, x), k + 1 - x, 1e-14);
    }
  EXPECT_NEAR(generalized_laguerre(2, 0, 4.0), 1.0, 1e-14);
  for (int n : {3, 7, 12})
    for (int k : {0, 2, 9})
      for (double x : {0.5, 2.5, 6.0}) {
        const double ref = oracle::laguerre_explicit(n, k, x);
        EXPECT_NEAR(generalized_laguerre(n, k, x), ref, 1e-10 * std::max(1.0, std::abs(ref)));
      }
}

TEST(Wigner, VacuumAtOrigin) {
  const auto vac = DensityMatrix<double>::from_pure(fock_state<double>(0, FockDim(5)));
  const WignerKernel<double> k(vac.matrix());
  EXPECT_NEAR(k.at_polar(0, 0).real(), 2 / kPi, 1e-15);
}

TEST(Wigner, OddCatOriginIsNegative) {
  for (double x : {1.0, 3.3, 5.0}) {
    const auto cat = DensityMatrix<double>::from_pure(cat_state<double>({std::sqrt(x), 0}, CatParity::Odd, FockDim(63)));
    EXPECT_NEAR(WignerKernel<double>(cat.matrix()).at_polar(0, 0).real(), -2 / kPi, 1e-10);
  }
}

TEST(Wigner, CoherentStateIsGaussian) {
  const C alpha(2, 0);
  const auto rho = DensityMatrix<double>::from_pure(coherent_state<double>(alpha, FockDim(63)));
  const auto grid = wigner_function(rho, GridSpec<double>::cartesian(4.5, 61));
  double worst = 0;
  for (std::size_t i = 0; i < grid.spec.axis0.size(); ++i)
    for (std::size_t j = 0; j < grid.spec.axis1.size(); ++j) {
      const C beta(grid.spec.axis0[i], grid.spec.axis1[j]);
      worst = std::max(worst, std::abs(grid.values(i, j) - oracle::coherent_wigner(alpha, beta)));
    }
  EXPECT_LT(worst, 1e-6);
  EXPECT_NEAR(grid.integral, 1.0, 1e-3);
  EXPECT_LT(grid.max_imag_residue, 1e-10);
}

TEST(Wigner, MatchesDisplacedParityOnRandomState) {
  const auto m = oracle::random_density(10, 10, 17);
  const WignerKernel<double> k(m);
  for (C beta : {C(0.3, -0.4), C(-1.1, 0.2), C(0.9, 1.3)}) {
    const double ref = oracle::wigner_displaced_parity(m, beta);
    EXPECT_NEAR(k.at_cartesian(beta.real(), beta.imag()).real(), ref, 1e-9);
    EXPECT_LT(std::abs(k.at_cartesian(beta.real(), beta.imag()).imag()), 1e-10);
  }
}

TEST(Wigner, OriginEqualsScaledParityOnRandomStates) {
  for (unsigned seed = 1; seed <= 6; ++seed) {
    const auto rho = DensityMatrix<double>::checked(oracle::random_density(32, 32, seed));
    EXPECT_NEAR(WignerKernel<double>(rho.matrix()).at_polar(0, 0).real(), 2 / kPi * parity_expectation(rho), 1e-8);
  }
}

TEST(Wigner, RotationCovariance) {
  const auto rho = DensityMatrix<double>::checked(oracle::random_density(12, 12, 4));
  const double phi = 0.9;
  const WignerKernel<double> a(rho.matrix()), b(rotate_phase(rho, phi).matrix());
  for (double r : {0.4, 1.2, 2.0})
    for (double th : {0.0, 1.0, 4.0}) EXPECT_NEAR(b.at_polar(r, th).real(), a.at_polar(r, th - phi).real(), 1e-8);
}

TEST(Wigner, PolarGridNormalization) {
  const auto cat = DensityMatrix<double>::from_pure(cat_state<double>({std::sqrt(2.0), 0}, CatParity::Even, FockDim(40)));
  const auto grid = wigner_function(cat, GridSpec<double>::polar(5.0, 101, 64));
  EXPECT_NEAR(grid.integral, 1.0, 1e-3);
}

TEST(Wigner, CoarseGridIsRejected) {
  const auto cat = DensityMatrix<double>::from_pure(cat_state<double>({std::sqrt(5.0), 0}, CatParity::Odd, FockDim(63)));
  EXPECT_THROW(wigner_function(cat, GridSpec<double>::cartesian(1.5, 9)), GridTooCoarseError);
}

TEST(GridSpec, RejectsNonIncreasingAxes) {
  GridSpec<double> g{GridMode::Cartesian, {0.0, 1.0, 1.0}, {0.0, 1.0}};
  EXPECT_THROW(g.validate(), PreconditionError);
}

TEST(SqrtDiffusion, DiagonalStateHasZeroImage) {
  Eigen::VectorXd pop = Eigen::VectorXd::Zero(8);
  pop << 0.4, 0.3, 0.2, 0.1, 0, 0, 0, 0;
  const auto grid = sqrt_diffusion_generator_wigner(DensityMatrix<double>::diagonal(pop), GridSpec<double>::cartesian(3, 21));
  EXPECT_EQ(grid.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SqrtDiffusion, GeneratorMatchesDoubleCommutator) {
  const auto m = oracle::random_density(10, 10, 3);
  const auto s = oracle::sqrt_number(10);
  const oracle::Mat inner = s * m - m * s;
  const oracle::Mat ref = -(s * inner - inner * s);
  EXPECT_LT((sqrt_diffusion_generator<double>(m) - ref).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SqrtDiffusion, ApproachesScaledAngularDiffusionWithPhotonNumber) {
  double prev = 1e9;
  for (double nbar : {4.0, 9.0, 16.0, 25.0}) {
    const double err = oracle::sqrt_diffusion_scaling_error(nbar);
    EXPECT_LT(err, prev) << "nbar=" << nbar;
    prev = err;
  }
}

TEST(FringeVisibility, FeedbackPreservesFringes) {
  const auto cat = DensityMatrix<double>::from_pure(cat_state<double>({std::sqrt(5.0), 0}, CatParity::Odd, FockDim(63)));
  const auto spec = GridSpec<double>::default_grid();
  const double v0 = fringe_visibility(wigner_function(cat, spec));
  const double v_fb = fringe_visibility(wigner_function(evolve_continuous(cat, ContinuousParams<double>{1, 1}, 0.2), spec));
  const double v_free = fringe_visibility(wigner_function(evolve_continuous(cat, ContinuousParams<double>{1, 0}, 0.2), spec));
  EXPECT_GT(v_fb, 0.9 * v0);
  EXPECT_LT(v_free, 0.2 * v0);
}
