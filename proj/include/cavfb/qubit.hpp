#pragma once

// Protection of polarization-coded qubits alpha|n,m> + beta|m,n> by one
// feedback loop per polarized mode.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "cavfb/continuous.hpp"
#include "cavfb/errors.hpp"
#include "cavfb/fock.hpp"

namespace cavfb {

/// The qubit alpha|n,m> + beta|m,n>.
struct QubitSpec {
  int n = 0;
  int m = 1;

  void validate() const {
    if (n < 0 || m < 0) throw PreconditionError("QubitSpec: photon numbers must be >= 0");
    if (n == m) throw PreconditionError("QubitSpec: need m != n");
  }
};

template <typename Real = double>
struct ProtectionReport {
  int n_opt = 0;
  std::vector<std::pair<Real, Real>> f_min_curve;  // (gamma t, F_min)
  Real threshold_eta = 0;
};

namespace detail {
template <typename Real>
void require_eta(Real eta, const char* what) {
  if (!(eta >= Real(0) && eta <= Real(1))) throw PreconditionError(std::string(what) + ": eta must lie in [0, 1]");
}
}  // namespace detail

/// Fidelity minimized over all input superpositions:
/// (1/2)(exp{-(1-eta) gamma t (n+m)} + exp{-gamma t (n + m - 2 eta sqrt(nm))}).
template <typename Real>
Real min_fidelity(const QubitSpec& spec, Real eta, Real gamma_t) {
  spec.validate();
  detail::require_eta(eta, "min_fidelity");
  if (gamma_t < Real(0)) throw PreconditionError("min_fidelity: gamma_t must be >= 0");
  const Real total = Real(spec.n + spec.m);
  const Real root = std::sqrt(Real(spec.n) * Real(spec.m));
  return Real(0.5) * (std::exp(-(Real(1) - eta) * gamma_t * total) + std::exp(-gamma_t * (total - Real(2) * eta * root)));
}

/// s(n) = (sqrt(n+1) + sqrt(n))^2.
template <typename Real>
Real pair_strength(Real n) {
  const Real s = std::sqrt(n + Real(1)) + std::sqrt(n);
  return s * s;
}

/// Small-time infidelity rate of the qubit (n, n+p), up to a factor gamma t / 2:
/// p^2 / (sqrt(n+p) + sqrt n)^2 + (1-eta)(sqrt(n+p) + sqrt n)^2.
template <typename Real>
Real qubit_objective(int n, int p, Real eta) {
  const Real s = std::sqrt(Real(n + p)) + std::sqrt(Real(n));
  return Real(p) * Real(p) / (s * s) + (Real(1) - eta) * s * s;
}

/// Optimal photon number of the p = 1 family; ties go to the smaller n.
/// The objective is convex in s(n), so the first n with f(n) <= f(n+1) is the minimizer.
template <typename Real>
int optimal_n(Real eta) {
  detail::require_eta(eta, "optimal_n");
  if (eta == Real(1)) throw UnboundedError("optimal_n: the optimum diverges for eta = 1");
  for (int n = 0;; ++n)
    if (qubit_objective<Real>(n, 1, eta) <= qubit_objective<Real>(n + 1, 1, eta)) return n;
}

/// Real-valued n solving s(n) = (1-eta)^{-1/2}, i.e. n = (s-1)^2 / (4 s).
template <typename Real>
Real approx_n_opt(Real eta) {
  detail::require_eta(eta, "approx_n_opt");
  if (eta == Real(1)) throw UnboundedError("approx_n_opt: diverges for eta = 1");
  const Real s = Real(1) / std::sqrt(Real(1) - eta);
  return (s - Real(1)) * (s - Real(1)) / (Real(4) * s);
}

/// Efficiency at which optimal_n first leaves 0, by bisection on optimal_n itself.
template <typename Real>
Real threshold_eta(Real tol = Real(1e-13)) {
  Real lo = 0, hi = Real(0.999);
  while (hi - lo > tol) {
    const Real mid = Real(0.5) * (lo + hi);
    (optimal_n(mid) == 0 ? lo : hi) = mid;
  }
  return Real(0.5) * (lo + hi);
}

template <typename Real = double>
struct TwoModeScan {
  Real min_fidelity = 1;
  Real abs_alpha2_at_min = 0;  // |alpha|^2 where the minimum sits
  Real phase_at_min = 0;
};

/// Worst-case fidelity of alpha|n,m> + beta|m,n> over a Bloch-sphere grid
/// (polar angles include both poles), computed from single-mode evolutions
/// of |i><j| for i, j in {n, m}; the two loops act independently on each mode.
template <typename Real>
TwoModeScan<Real> two_mode_scan(const QubitSpec& spec, Real eta, Real gamma_t, int n_azimuth = 32, int n_polar = 17) {
  spec.validate();
  detail::require_eta(eta, "numeric_two_mode_check");
  if (gamma_t < Real(0)) throw PreconditionError("numeric_two_mode_check: gamma_t must be >= 0");
  const int n = spec.n, m = spec.m;
  const int size = std::max(n, m) + 2;
  const ContinuousParams<Real> params{Real(1), eta};
  auto evolve_unit = [&](int i, int j) {
    CMatrix<Real> x = CMatrix<Real>::Zero(size, size);
    x(i, j) = 1;
    return propagate_continuous<Real>(x, params, gamma_t);
  };
  const CMatrix<Real> e_nn = evolve_unit(n, n), e_mm = evolve_unit(m, m), e_nm = evolve_unit(n, m), e_mn = evolve_unit(m, n);

  TwoModeScan<Real> best;
  best.min_fidelity = std::numeric_limits<Real>::infinity();
  for (int ip = 0; ip < n_polar; ++ip) {
    const Real theta = std::numbers::pi_v<Real> * Real(ip) / Real(n_polar - 1);
    for (int ia = 0; ia < n_azimuth; ++ia) {
      const Real phi = Real(2) * std::numbers::pi_v<Real> * Real(ia) / Real(n_azimuth);
      const Complex<Real> a(std::cos(theta / 2), 0);
      const Complex<Real> b = std::polar(std::sin(theta / 2), phi);
      // <psi| X (x) Y |psi> for |psi> = a|n,m> + b|m,n>.
      auto expect = [&](const CMatrix<Real>& x, const CMatrix<Real>& y) {
        return std::norm(a) * x(n, n) * y(m, m) + std::conj(a) * b * x(n, m) * y(m, n) +
               std::conj(b) * a * x(m, n) * y(n, m) + std::norm(b) * x(m, m) * y(n, n);
      };
      const Complex<Real> f = std::norm(a) * expect(e_nn, e_mm) + a * std::conj(b) * expect(e_nm, e_mn) +
                              b * std::conj(a) * expect(e_mn, e_nm) + std::norm(b) * expect(e_mm, e_nn);
      if (f.real() < best.min_fidelity) {
        best.min_fidelity = f.real();
        best.abs_alpha2_at_min = std::norm(a);
        best.phase_at_min = phi;
      }
    }
  }
  return best;
}

template <typename Real>
Real numeric_two_mode_check(const QubitSpec& spec, Real eta, Real gamma_t) {
  return two_mode_scan<Real>(spec, eta, gamma_t).min_fidelity;
}

/// Optimal qubit for eta, its F_min curve on the given times, and the
/// efficiency threshold above which more than one photon per mode pays off.
template <typename Real>
ProtectionReport<Real> protection_report(Real eta, const std::vector<Real>& gamma_ts) {
  ProtectionReport<Real> r;
  r.n_opt = optimal_n(eta);
  const QubitSpec spec{r.n_opt, r.n_opt + 1};
  for (Real gt : gamma_ts) r.f_min_curve.emplace_back(gt, min_fidelity(spec, eta, gt));
  r.threshold_eta = threshold_eta<Real>();
  return r;
}

}  // namespace cavfb
