#pragma once

// Photon transfer by a Lambda atom crossing the cavity: the atom enters in
// g1, meets the cavity coupling g(t) first and the classical field Omega(t)
// second, and follows the dark state from |g1, n> to |g2, n+1>. Sectors n
// are decoupled; each is integrated on the basis {|g1,n>, |e,n>, |g2,n+1>}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cavfb/errors.hpp"
#include "cavfb/fock.hpp"

namespace cavfb {

/// Gaussian pulses g(t) and Omega(t); Omega is delayed by `delay`.
template <typename Real = double>
struct PulsePair {
  Real g_max = 100;
  Real omega_max = 100;
  Real t_cross = 1;
  Real delay = Real(0.25);
  Real width = Real(1) / Real(6);

  /// Equal peak couplings area / t_cross, width t_cross / 6, delay t_cross / 4.
  static PulsePair with_area(Real area, Real t_cross = 1) {
    return PulsePair{area / t_cross, area / t_cross, t_cross, t_cross / Real(4), t_cross / Real(6)};
  }

  void validate() const {
    if (!(g_max > Real(0) && omega_max > Real(0))) throw PreconditionError("PulsePair: peak couplings must be > 0");
    if (!(t_cross > Real(0))) throw PreconditionError("PulsePair: t_cross must be > 0");
    if (!(width > Real(0))) throw PreconditionError("PulsePair: width must be > 0");
    if (!(delay > Real(0))) throw PreconditionError("PulsePair: Omega must be delayed after g (delay > 0)");
  }

  Real g_center() const { return Real(0.5) * t_cross; }
  Real omega_center() const { return g_center() + delay; }
  Real duration() const { return t_cross + delay; }

  Real g(Real t) const {
    const Real u = (t - g_center()) / width;
    return g_max * std::exp(Real(-0.5) * u * u);
  }
  Real omega(Real t) const {
    const Real u = (t - omega_center()) / width;
    return omega_max * std::exp(Real(-0.5) * u * u);
  }
};

template <typename Real>
using Sector = Eigen::Matrix<std::complex<Real>, 3, 1>;
template <typename Real>
using SectorMatrix = Eigen::Matrix<std::complex<Real>, 3, 3>;

/// (g sqrt(n+1) |g1,n> + Omega |g2,n+1>) / sqrt(Omega^2 + (n+1) g^2).
template <typename Real>
Sector<Real> dark_state(int n, Real g, Real omega) {
  if (n < 0) throw PreconditionError("dark_state: n must be >= 0");
  const Real a = g * std::sqrt(Real(n + 1));
  const Real norm = std::hypot(a, omega);
  if (norm == Real(0)) throw DegenerateError("dark_state: both couplings vanish");
  Sector<Real> v;
  v << a / norm, 0, omega / norm;
  return v;
}

/// Rotating-frame Hamiltonian of sector n at two-photon resonance.
template <typename Real>
SectorMatrix<Real> sector_hamiltonian(int n, Real g, Real omega) {
  const std::complex<Real> i(0, 1);
  const Real gc = g * std::sqrt(Real(n + 1));
  SectorMatrix<Real> h = SectorMatrix<Real>::Zero();
  h(1, 0) = i * omega;
  h(0, 1) = -i * omega;
  h(1, 2) = -i * gc;
  h(2, 1) = i * gc;
  return h;
}

/// Integrates sector n from |g1, n> with `steps` fourth-order Magnus steps.
/// Each step exponentiates a Hermitian 3x3 matrix exactly, so the norm is
/// conserved to round-off. `observe(t, psi)` is called at every grid time.
template <typename Real>
Sector<Real> integrate_sector(int n, const PulsePair<Real>& pulses, int steps,
                              const std::function<void(Real, const Sector<Real>&)>& observe = {}) {
  pulses.validate();
  if (steps < 1) throw PreconditionError("integrate_sector: steps must be >= 1");
  const Real h = pulses.duration() / Real(steps);
  const Real c = std::sqrt(Real(3)) / Real(6);
  Sector<Real> psi(1, 0, 0);
  if (observe) observe(Real(0), psi);
  Eigen::SelfAdjointEigenSolver<SectorMatrix<Real>> es;
  for (int s = 0; s < steps; ++s) {
    const Real t0 = h * Real(s);
    const Real t1 = t0 + (Real(0.5) - c) * h, t2 = t0 + (Real(0.5) + c) * h;
    const SectorMatrix<Real> h1 = sector_hamiltonian(n, pulses.g(t1), pulses.omega(t1));
    const SectorMatrix<Real> h2 = sector_hamiltonian(n, pulses.g(t2), pulses.omega(t2));
    // psi <- exp(-i K) psi with K = h (H1 + H2)/2 - i (sqrt 3 / 12) h^2 [H2, H1].
    const SectorMatrix<Real> k = (h * Real(0.5)) * (h1 + h2) -
                                 std::complex<Real>(0, std::sqrt(Real(3)) / Real(12) * h * h) * (h2 * h1 - h1 * h2);
    es.compute(k);
    const auto& v = es.eigenvectors();
    Sector<Real> phased = v.adjoint() * psi;
    for (int j = 0; j < 3; ++j) phased[j] *= std::polar(Real(1), -es.eigenvalues()[j]);
    psi = v * phased;
    if (observe) observe(t0 + h, psi);
  }
  return psi;
}

template <typename Real = double>
struct CrossingResult {
  DensityMatrix<Real> final_field = DensityMatrix<Real>::adopt(CMatrix<Real>::Identity(2, 2) * Real(0.5));
  Real transfer_fidelity = 0;
  Real max_excited_population = 0;
  Real max_norm_drift = 0;
};

namespace detail {

template <typename Real>
CrossingResult<Real> crossing_once(const DensityMatrix<Real>& rho, const PulsePair<Real>& pulses, int steps) {
  const int size = rho.size();
  std::vector<Sector<Real>> finals(size, Sector<Real>::Zero());
  std::vector<Real> excited(steps + 1, Real(0));
  Real drift = 0;
  for (int n = 0; n + 1 < size; ++n) {
    const Real weight = rho(n, n).real();
    if (weight == Real(0)) continue;
    int idx = 0;
    finals[n] = integrate_sector<Real>(n, pulses, steps, [&](Real, const Sector<Real>& psi) {
      excited[idx++] += weight * std::norm(psi[1]);
    });
    drift = std::max(drift, std::abs(finals[n].squaredNorm() - Real(1)));
  }

  // Reduced field state after tracing out the atom.
  CMatrix<Real> field = CMatrix<Real>::Zero(size, size);
  for (int a = 0; a < 2; ++a)
    for (int k = 0; k + 1 < size; ++k)
      for (int l = 0; l + 1 < size; ++l) field(k, l) += finals[k][a] * rho(k, l) * std::conj(finals[l][a]);
  for (int k = 0; k + 1 < size; ++k)
    for (int l = 0; l + 1 < size; ++l) field(k + 1, l + 1) += finals[k][2] * rho(k, l) * std::conj(finals[l][2]);

  // Uhlmann fidelity between the g2 block D rho D^dagger (D = diag u_n) and
  // rho itself: || sqrt(rho) D sqrt(rho) ||_1^2.
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(rho.matrix());
  RVector<Real> ev = es.eigenvalues().cwiseMax(Real(0)).cwiseSqrt();
  const CMatrix<Real> sq = es.eigenvectors() * ev.template cast<Complex<Real>>().asDiagonal() * es.eigenvectors().adjoint();
  CVector<Real> d(size);
  for (int n = 0; n < size; ++n) d[n] = finals[n][2];
  const CMatrix<Real> core = sq * d.asDiagonal() * sq;
  Eigen::JacobiSVD<CMatrix<Real>> svd(core);
  const Real tn = svd.singularValues().sum();

  CrossingResult<Real> r;
  r.final_field = DensityMatrix<Real>::adopt(std::move(field));
  r.transfer_fidelity = tn * tn;
  r.max_excited_population = *std::max_element(excited.begin(), excited.end());
  r.max_norm_drift = drift;
  return r;
}

}  // namespace detail

/// Crosses the cavity with an atom in g1 and compares the outcome with
/// |g2><g2| (x) sum rho_{n,m} |n+1><m+1|. The result is taken at 2 * steps
/// and validated against the run at `steps`.
template <typename Real>
CrossingResult<Real> integrate_crossing(const DensityMatrix<Real>& field_rho, const PulsePair<Real>& pulses, int steps = 2000) {
  pulses.validate();
  if (steps < 1) throw PreconditionError("integrate_crossing: steps must be >= 1");
  const int top = field_rho.dim().n_max();
  const Real top_pop = field_rho(top, top).real();
  if (top_pop > Real(tolerance::kTruncationTail))
    throw TruncationError("integrate_crossing: top level n_max=" + std::to_string(top) +
                          " is populated and cannot receive a photon");
  const auto coarse = detail::crossing_once(field_rho, pulses, steps);
  auto fine = detail::crossing_once(field_rho, pulses, 2 * steps);
  const Real change = std::abs(fine.transfer_fidelity - coarse.transfer_fidelity);
  if (change > Real(1e-6))
    throw StepTooCoarseError("integrate_crossing: halving the step moved the transfer fidelity by " +
                             std::to_string(double(change)));
  return fine;
}

enum class Inequality { Pass, Marginal, Fail };

inline const char* to_string(Inequality v) {
  switch (v) {
    case Inequality::Pass: return "pass";
    case Inequality::Marginal: return "marginal";
    default: return "fail";
  }
}

template <typename Real = double>
struct RatioCheck {
  std::string name;
  Real ratio = 0;
  Inequality verdict = Inequality::Fail;
};

/// Numeric form of Omega_max, g_max >> 1/t_cross >> n_bar gamma, gamma_e.
template <typename Real = double>
struct AdiabaticityReport {
  Real factor = 10;
  std::vector<RatioCheck<Real>> checks;  // omega_max t, g_max t, 1/(n_bar gamma t), 1/(gamma_e t)
  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.verdict == Inequality::Pass; });
  }
};

template <typename Real>
Inequality compare_ratio(Real ratio, Real factor) {
  if (std::abs(ratio - factor) <= Real(1e-12) * factor) return Inequality::Marginal;
  return ratio > factor ? Inequality::Pass : Inequality::Fail;
}

template <typename Real>
AdiabaticityReport<Real> adiabaticity_report(const PulsePair<Real>& pulses, Real n_bar, Real gamma, Real gamma_e,
                                             Real factor = 10) {
  if (!(n_bar > Real(0) && gamma > Real(0) && gamma_e > Real(0) && factor > Real(0)))
    throw PreconditionError("adiabaticity_report: rates and factor must be > 0");
  AdiabaticityReport<Real> r;
  r.factor = factor;
  const Real t = pulses.t_cross;
  auto add = [&](const char* name, Real ratio) { r.checks.push_back({name, ratio, compare_ratio(ratio, factor)}); };
  add("omega_max*t_cross", pulses.omega_max * t);
  add("g_max*t_cross", pulses.g_max * t);
  add("1/(n_bar*gamma*t_cross)", Real(1) / (n_bar * gamma * t));
  add("1/(gamma_e*t_cross)", Real(1) / (gamma_e * t));
  return r;
}

}  // namespace cavfb
