#pragma once

// Photodetection-feedback master equation for an optical cavity:
//
//   d rho/dt = (1-eta) gamma D[a] rho - (eta gamma / 2) [sqrt(n), [sqrt(n), rho]]
//
// Elementwise the generator couples rho_{n,m} only to rho_{n+1,m+1}, so it
// splits into independent upper-bidiagonal blocks, one per off-diagonal
// index p = m - n. Each block is propagated with an exact matrix exponential.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cavfb/errors.hpp"
#include "cavfb/fock.hpp"

namespace cavfb {

template <typename Real = double>
struct ContinuousParams {
  Real gamma = 1;  // cavity decay rate
  Real eta = 1;    // detector efficiency

  void validate() const {
    if (!(gamma > Real(0))) throw PreconditionError("ContinuousParams: gamma must be > 0");
    if (!(eta >= Real(0) && eta <= Real(1))) throw PreconditionError("ContinuousParams: eta must lie in [0, 1]");
  }
};

/// Elements rho_{n,n+p}, n = 0 .. N-1-p.
template <typename Real = double>
struct DiagonalBand {
  int p = 0;
  CVector<Real> values;
};

template <typename Real>
DiagonalBand<Real> extract_band(const CMatrix<Real>& rho, int p) {
  const int n = static_cast<int>(rho.rows());
  if (p < 0 || p >= n) throw IndexError("extract_band: p=" + std::to_string(p) + " outside 0.." + std::to_string(n - 1));
  DiagonalBand<Real> b{p, CVector<Real>(n - p)};
  for (int k = 0; k < n - p; ++k) b.values[k] = rho(k, k + p);
  return b;
}

/// Writes a band into rho and mirrors its conjugate into band -p.
template <typename Real>
void insert_band_hermitian(CMatrix<Real>& rho, const DiagonalBand<Real>& band) {
  const int p = band.p;
  for (int k = 0; k < band.values.size(); ++k) {
    rho(k, k + p) = band.values[k];
    rho(k + p, k) = std::conj(band.values[k]);
  }
}

/// Generator restricted to band p, acting on (rho_{0,p}, rho_{1,1+p}, ...).
/// Upper bidiagonal: the only coupling is from rho_{n+1,n+p+1}.
template <typename Real>
RMatrix<Real> band_generator(int p, const ContinuousParams<Real>& params, int basis_size) {
  const int len = basis_size - p;
  const Real g = params.gamma;
  const Real eta = params.eta;
  RMatrix<Real> gen = RMatrix<Real>::Zero(len, len);
  for (int k = 0; k < len; ++k) {
    const Real n = Real(k);
    const Real m = Real(k + p);
    gen(k, k) = eta * g * std::sqrt(n * m) - Real(0.5) * g * (n + m);
    if (k + 1 < len) gen(k, k + 1) = (Real(1) - eta) * g * std::sqrt((n + 1) * (m + 1));
  }
  return gen;
}

/// Propagates an arbitrary operator (not necessarily Hermitian) under the
/// feedback generator for time t. Bands p and -p share the same block.
template <typename Real>
CMatrix<Real> propagate_continuous(const CMatrix<Real>& x, const ContinuousParams<Real>& params, Real t) {
  params.validate();
  if (t < Real(0)) throw PreconditionError("propagate_continuous: t must be >= 0");
  const int n = static_cast<int>(x.rows());
  CMatrix<Real> out = CMatrix<Real>::Zero(n, n);
  for (int p = 0; p < n; ++p) {
    const int len = n - p;
    CVector<Real> upper(len), lower(len);
    for (int k = 0; k < len; ++k) {
      upper[k] = x(k, k + p);
      lower[k] = x(k + p, k);
    }
    if (upper.isZero(0) && lower.isZero(0)) continue;
    const RMatrix<Real> prop = (band_generator(p, params, n) * t).exp();
    const CVector<Real> up = prop.template cast<Complex<Real>>() * upper;
    const CVector<Real> lo = prop.template cast<Complex<Real>>() * lower;
    for (int k = 0; k < len; ++k) {
      out(k, k + p) = up[k];
      out(k + p, k) = lo[k];
    }
  }
  return out;
}

/// Evolves rho0 for time t under the feedback master equation.
template <typename Real>
DensityMatrix<Real> evolve_continuous(const DensityMatrix<Real>& rho0, const ContinuousParams<Real>& params, Real t) {
  params.validate();
  if (t < Real(0)) throw PreconditionError("evolve_continuous: t must be >= 0");
  const int top = rho0.dim().n_max();
  const Real top_pop = rho0(top, top).real();
  if (top_pop > Real(1e-8))
    throw TruncationError("evolve_continuous: population " + std::to_string(double(top_pop)) + " in the top level n_max=" +
                          std::to_string(top));
  CMatrix<Real> m = propagate_continuous<Real>(rho0.matrix(), params, t);
  // Restore exact Hermiticity (the two bands are computed independently).
  m = (m + m.adjoint()).eval() * Real(0.5);
  return DensityMatrix<Real>::adopt(std::move(m));
}

/// Ideal feedback (eta = 1): rho_{n,m}(t) = exp{-(gamma t/2)(sqrt n - sqrt m)^2} rho_{n,m}(0).
template <typename Real>
DensityMatrix<Real> ideal_offdiagonal_decay(const DensityMatrix<Real>& rho0, Real gamma, Real t) {
  if (t < Real(0)) throw PreconditionError("ideal_offdiagonal_decay: t must be >= 0");
  CMatrix<Real> m = rho0.matrix();
  for (int n = 0; n < m.rows(); ++n)
    for (int k = 0; k < m.cols(); ++k) {
      const Real d = std::sqrt(Real(n)) - std::sqrt(Real(k));
      m(n, k) *= std::exp(Real(-0.5) * gamma * t * d * d);
    }
  return DensityMatrix<Real>::adopt(std::move(m));
}

/// Ordinary phase diffusion: rho_{n,m}(t) = exp{-(gamma t/2)(n - m)^2} rho_{n,m}(0).
template <typename Real>
DensityMatrix<Real> standard_phase_diffusion(const DensityMatrix<Real>& rho0, Real gamma, Real t) {
  if (t < Real(0)) throw PreconditionError("standard_phase_diffusion: t must be >= 0");
  CMatrix<Real> m = rho0.matrix();
  for (int n = 0; n < m.rows(); ++n)
    for (int k = 0; k < m.cols(); ++k) {
      const Real d = Real(n - k);
      m(n, k) *= std::exp(Real(-0.5) * gamma * t * d * d);
    }
  return DensityMatrix<Real>::adopt(std::move(m));
}

/// Closed-form fidelity of an even/odd cat under pure vacuum damping (no feedback).
template <typename Real>
Real cat_fidelity_analytic(Real alpha2, CatParity parity, Real gamma, Real t) {
  if (!(alpha2 > Real(0))) throw PreconditionError("cat_fidelity_analytic: alpha2 must be > 0");
  if (t < Real(0)) throw PreconditionError("cat_fidelity_analytic: t must be >= 0");
  const Real x = alpha2;
  const Real gt = gamma * t;
  const Real decay_half = std::exp(Real(-0.5) * gt);
  const Real coherence = Real(0.5) * (Real(1) + std::exp(Real(-2) * x * (-std::expm1(-gt))));
  const Real shrink = std::exp(-x * std::pow(-std::expm1(Real(-0.5) * gt), 2));
  Real ratio;
  if (parity == CatParity::Odd) {
    ratio = std::expm1(Real(-2) * x * decay_half) / std::expm1(Real(-2) * x);
  } else {
    ratio = (Real(1) + std::exp(Real(-2) * x * decay_half)) / (Real(1) + std::exp(Real(-2) * x));
  }
  return coherence * shrink * ratio * ratio;
}

/// Fidelity of alpha|n> + beta|m> (m > n) under the feedback master equation.
///
/// The repopulation term carries the binomial weight m! / (n! (m-n)!) of
/// |m> decaying into |n> at the effective rate (1-eta) gamma.
template <typename Real>
Real fock_fidelity_analytic(Real abs_alpha2, Real abs_beta2, int n, int m, const ContinuousParams<Real>& params, Real t) {
  params.validate();
  if (!(m > n && n >= 0)) throw PreconditionError("fock_fidelity_analytic: need m > n >= 0");
  if (std::abs(abs_alpha2 + abs_beta2 - Real(1)) > Real(1e-10))
    throw PreconditionError("fock_fidelity_analytic: |alpha|^2 + |beta|^2 must equal 1");
  if (t < Real(0)) throw PreconditionError("fock_fidelity_analytic: t must be >= 0");
  const Real kt = (Real(1) - params.eta) * params.gamma * t;
  const Real gt = params.gamma * t;
  const Real a2 = abs_alpha2, b2 = abs_beta2;
  const Real log_binom = std::lgamma(Real(m + 1)) - std::lgamma(Real(n + 1)) - std::lgamma(Real(m - n + 1));
  const Real loss = -std::expm1(-kt);  // 1 - e^{-kt}
  const Real repop = loss == Real(0) ? Real(0) : std::exp(log_binom + Real(m - n) * std::log(loss) - Real(n) * kt);
  return a2 * a2 * std::exp(-Real(n) * kt) + b2 * b2 * std::exp(-Real(m) * kt) +
         Real(2) * a2 * b2 * std::exp(-gt * (Real(0.5) * Real(m + n) - params.eta * std::sqrt(Real(n) * Real(m)))) +
         a2 * b2 * repop;
}

/// Exact <a(t)> for ideal feedback:
/// sum_n sqrt(n+1) rho_{n+1,n}(0) exp{-(gamma t/2)(sqrt(n+1) - sqrt n)^2}.
template <typename Real>
Complex<Real> mean_amplitude_ideal(const DensityMatrix<Real>& rho0, Real gamma, Real t) {
  if (t < Real(0)) throw PreconditionError("mean_amplitude_ideal: t must be >= 0");
  const auto& m = rho0.matrix();
  Complex<Real> s = 0;
  for (int n = 0; n + 1 < m.rows(); ++n) {
    const Real d = std::sqrt(Real(n + 1)) - std::sqrt(Real(n));
    s += std::sqrt(Real(n + 1)) * m(n + 1, n) * std::exp(Real(-0.5) * gamma * t * d * d);
  }
  return s;
}

/// Large-photon-number decay factor exp{-gamma t / (8 nbar)} of <a(t)>.
template <typename Real>
Real semiclassical_amplitude_factor(Real nbar, Real gamma_t) {
  return std::exp(-gamma_t / (Real(8) * nbar));
}

/// Fidelity Tr{rho0 rho(t)} on a grid of times.
template <typename Real>
std::vector<Real> fidelity_curve(const DensityMatrix<Real>& rho0, const ContinuousParams<Real>& params,
                                 const std::vector<Real>& times) {
  std::vector<Real> f;
  f.reserve(times.size());
  for (Real t : times) f.push_back(fidelity(rho0, evolve_continuous(rho0, params, t)));
  return f;
}

}  // namespace cavfb
