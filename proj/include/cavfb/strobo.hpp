#pragma once

// Stroboscopic feedback for a microwave cavity. Every interval T a dispersive
// probe atom measures the photon-number parity; a "g" click (odd number of
// photons lost) triggers a resonant feedback atom that may release a photon.
// Between probes the field decays in a vacuum bath:
//
//   rho((k+1)T) = Phi_diss(Phi_fb(rho(kT))).
//
// Both maps preserve the off-diagonal index p = m - n, so one period acts on
// each band V_p = (rho_{n,n+p})_n through a real matrix A_p.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cavfb/continuous.hpp"
#include "cavfb/errors.hpp"
#include "cavfb/fock.hpp"

namespace cavfb {

template <typename Real = double>
struct StroboParams {
  Real eta = 1;      // atomic detector efficiency
  Real mu = 0;       // feedback Rabi angle Omega * tau
  Real gamma_T = 0;  // dimensionless interval between probe atoms

  void validate() const {
    if (!(eta >= Real(0) && eta <= Real(1))) throw PreconditionError("StroboParams: eta must lie in [0, 1]");
    if (!(mu >= Real(0))) throw PreconditionError("StroboParams: mu must be >= 0");
    if (!(gamma_T >= Real(0))) throw PreconditionError("StroboParams: gamma_T must be >= 0");
  }
};

template <typename Real = double>
struct BandMatrix {
  int p = 0;
  RMatrix<Real> entries;  // (N-p) x (N-p)
};

/// Probe-atom outcome: unnormalized conditional states with Tr rho_e = P_e.
template <typename Real = double>
struct ConditionalSplit {
  CMatrix<Real> rho_e;  // P_odd rho P_odd
  CMatrix<Real> rho_g;  // P_even rho P_even
  Real P_e = 0;
  Real P_g = 0;
};

template <typename Real = double>
struct StateDigest {
  Real trace = 0;
  Real mean_photon_number = 0;
  Real min_eigenvalue = 0;
};

template <typename Real = double>
struct SequenceEntry {
  int step = 0;
  Real P_e = 0;
  Real P_g = 0;
  StateDigest<Real> digest;
};

/// Parity record of a stroboscopic run: entry k describes rho(kT), k = 0..steps.
template <typename Real = double>
struct SequenceTrace {
  std::vector<SequenceEntry<Real>> entries;
  DensityMatrix<Real> final_state = DensityMatrix<Real>::adopt(CMatrix<Real>::Identity(2, 2) * Real(0.5));
};

namespace detail {

template <typename Real>
CMatrix<Real> parity_block(const CMatrix<Real>& rho, int parity_bit) {
  CMatrix<Real> out = CMatrix<Real>::Zero(rho.rows(), rho.cols());
  for (int n = parity_bit; n < rho.rows(); n += 2)
    for (int m = parity_bit; m < rho.cols(); m += 2) out(n, m) = rho(n, m);
  return out;
}

/// Table of c_{n,k} = sqrt(C(n+k, k) e^{-n gT} (1 - e^{-gT})^k) for n + k < N.
template <typename Real>
RMatrix<Real> damping_amplitudes(int size, Real gamma_T) {
  RMatrix<Real> c = RMatrix<Real>::Zero(size, size);
  if (gamma_T == Real(0)) {
    c.col(0).setOnes();
    return c;
  }
  const Real log_loss = std::log(-std::expm1(-gamma_T));
  for (int n = 0; n < size; ++n)
    for (int k = 0; n + k < size; ++k) {
      const Real log_c2 = std::lgamma(Real(n + k + 1)) - std::lgamma(Real(n + 1)) - std::lgamma(Real(k + 1)) -
                          Real(n) * gamma_T + Real(k) * log_loss;
      c(n, k) = std::exp(Real(0.5) * log_c2);
    }
  return c;
}

template <typename Real>
void require_top_empty(const CMatrix<Real>& rho, const char* what) {
  const int top = static_cast<int>(rho.rows()) - 1;
  const Real pop = std::abs(rho(top, top));
  if (pop > Real(1e-10))
    throw TruncationError(std::string(what) + ": top-level population " + std::to_string(double(pop)) +
                          " would be shifted out of the basis");
}

}  // namespace detail

/// Probe-atom parity measurement: e <-> odd photon number, g <-> even.
template <typename Real>
ConditionalSplit<Real> conditional_split(const DensityMatrix<Real>& rho) {
  ConditionalSplit<Real> s;
  s.rho_e = detail::parity_block<Real>(rho.matrix(), 1);
  s.rho_g = detail::parity_block<Real>(rho.matrix(), 0);
  const Real parity = parity_expectation(rho);
  s.P_g = Real(0.5) * (Real(1) + parity);
  s.P_e = Real(0.5) * (Real(1) - parity);
  return s;
}

/// Resonant feedback atom entering in e, traced out afterwards:
/// rho'_{n,m} = cos(mu sqrt(n+1)) cos(mu sqrt(m+1)) rho_{n,m} + sin(mu sqrt n) sin(mu sqrt m) rho_{n-1,m-1}.
/// Operates on any operator; the part shifted beyond n_max is dropped.
template <typename Real>
CMatrix<Real> feedback_atom_kernel(const CMatrix<Real>& x, Real mu) {
  const int size = static_cast<int>(x.rows());
  RVector<Real> c(size), s(size);
  for (int n = 0; n < size; ++n) {
    c[n] = std::cos(mu * std::sqrt(Real(n + 1)));
    s[n] = std::sin(mu * std::sqrt(Real(n)));
  }
  CMatrix<Real> out = c.asDiagonal() * x * c.asDiagonal();
  out.bottomRightCorner(size - 1, size - 1) +=
      s.tail(size - 1).asDiagonal() * x.topLeftCorner(size - 1, size - 1) * s.tail(size - 1).asDiagonal();
  return out;
}

template <typename Real>
DensityMatrix<Real> feedback_atom_map(const DensityMatrix<Real>& rho, Real mu) {
  detail::require_top_empty<Real>(rho.matrix(), "feedback_atom_map");
  return DensityMatrix<Real>::adopt(feedback_atom_kernel<Real>(rho.matrix(), mu));
}

/// eta rho_e + eta F(rho_g) + (1 - eta) rho, F the feedback-atom map. An
/// undetected probe atom leaves the field untouched; for states of definite
/// parity rho = rho_e + rho_g.
template <typename Real>
CMatrix<Real> feedback_superop_kernel(const CMatrix<Real>& rho, const StroboParams<Real>& params) {
  const CMatrix<Real> rho_e = detail::parity_block<Real>(rho, 1);
  const CMatrix<Real> rho_g = detail::parity_block<Real>(rho, 0);
  return params.eta * (rho_e + feedback_atom_kernel<Real>(rho_g, params.mu)) + (Real(1) - params.eta) * rho;
}

template <typename Real>
DensityMatrix<Real> feedback_superop(const DensityMatrix<Real>& rho, const StroboParams<Real>& params) {
  params.validate();
  if (params.eta > Real(0) && std::sin(params.mu) != Real(0))
    detail::require_top_empty<Real>(detail::parity_block<Real>(rho.matrix(), 0), "feedback_superop");
  return DensityMatrix<Real>::adopt(feedback_superop_kernel<Real>(rho.matrix(), params));
}

/// Exact vacuum-bath damping over gamma T: sum_k A_k rho A_k^dagger,
/// (A_k)_{n,n+k} = c_{n,k}. The k-sum runs over the whole truncated basis.
template <typename Real>
CMatrix<Real> dissipation_kernel(const CMatrix<Real>& x, Real gamma_T) {
  if (gamma_T < Real(0)) throw PreconditionError("dissipation_map: gamma_T must be >= 0");
  if (gamma_T == Real(0)) return x;
  const int size = static_cast<int>(x.rows());
  const RMatrix<Real> c = detail::damping_amplitudes<Real>(size, gamma_T);
  CMatrix<Real> out = CMatrix<Real>::Zero(size, size);
  for (int n = 0; n < size; ++n)
    for (int m = 0; m < size; ++m) {
      Complex<Real> acc = 0;
      for (int k = 0; n + k < size && m + k < size; ++k) acc += c(n, k) * c(m, k) * x(n + k, m + k);
      out(n, m) = acc;
    }
  return out;
}

template <typename Real>
DensityMatrix<Real> dissipation_map(const DensityMatrix<Real>& rho, Real gamma_T) {
  return DensityMatrix<Real>::adopt(dissipation_kernel<Real>(rho.matrix(), gamma_T));
}

/// One period: feedback first, then dissipation.
template <typename Real>
DensityMatrix<Real> strobo_step(const DensityMatrix<Real>& rho, const StroboParams<Real>& params) {
  const DensityMatrix<Real> fb = feedback_superop(rho, params);
  CMatrix<Real> out = dissipation_kernel<Real>(fb.matrix(), params.gamma_T);
  out = (out + out.adjoint()).eval() * Real(0.5);
  return DensityMatrix<Real>::adopt(std::move(out));
}

/// A_p assembled elementwise from c_{n,k} and s_+-(n,k) = 1 +- (-1)^{n+k}.
/// A detected probe atom erases parity-mixed coherences, so for odd p only
/// the undetected branch survives: (A_p)_{n,n+k} = (1 - eta) c_{n,k} c_{n+p,k}.
template <typename Real>
BandMatrix<Real> build_band_matrix(int p, const StroboParams<Real>& params, FockDim dim) {
  params.validate();
  const int size = dim.size();
  if (p < 0 || p > dim.n_max()) throw IndexError("build_band_matrix: p outside 0..n_max");
  const int len = size - p;
  BandMatrix<Real> a{p, RMatrix<Real>::Zero(len, len)};
  const RMatrix<Real> c = detail::damping_amplitudes<Real>(size, params.gamma_T);
  if (p % 2 == 1) {
    for (int n = 0; n < len; ++n)
      for (int k = 0; n + p + k < size; ++k) a.entries(n, n + k) = (Real(1) - params.eta) * c(n, k) * c(n + p, k);
    return a;
  }

  const Real eta = params.eta, mu = params.mu;
  auto s_plus2 = [](int n, int k) { return (n + k) % 2 == 0 ? Real(4) : Real(0); };
  auto s_minus2 = [](int n, int k) { return (n + k) % 2 == 0 ? Real(0) : Real(4); };
  auto cs = [&](int j) { return std::cos(mu * std::sqrt(Real(j))); };
  auto sn = [&](int j) { return std::sin(mu * std::sqrt(Real(j))); };

  for (int n = 0; n < len; ++n) {
    for (int k = 0; n + p + k < size; ++k) {
      Real v = c(n, k) * c(n + p, k) / Real(4) *
               (eta * s_minus2(n, k) + Real(4) * (Real(1) - eta) + eta * s_plus2(n, k) * cs(n + k + 1) * cs(n + p + k + 1));
      if (n + p + k + 1 < size)
        v += eta * c(n, k + 1) * c(n + p, k + 1) / Real(4) * s_plus2(n, k) * sn(n + k + 1) * sn(n + p + k + 1);
      a.entries(n, n + k) += v;
    }
    if (n >= 1)
      a.entries(n, n - 1) += eta * c(n, 0) * c(n + p, 0) / Real(4) * sn(n) * sn(n + p) * s_minus2(n, 0);
  }
  return a;
}

/// Applies A_p to every band of rho for `periods` steps and reassembles the matrix.
template <typename Real>
CMatrix<Real> propagate_bands(const CMatrix<Real>& rho, const StroboParams<Real>& params, int periods) {
  const int size = static_cast<int>(rho.rows());
  const FockDim dim(size - 1);
  CMatrix<Real> out = CMatrix<Real>::Zero(size, size);
  for (int p = 0; p < size; ++p) {
    const BandMatrix<Real> a = build_band_matrix(p, params, dim);
    const CMatrix<Real> a_c = a.entries.template cast<Complex<Real>>();
    CVector<Real> up(size - p), lo(size - p);
    for (int k = 0; k < size - p; ++k) {
      up[k] = rho(k, k + p);
      lo[k] = rho(k + p, k);
    }
    for (int s = 0; s < periods; ++s) {
      up = a_c * up;
      lo = a_c * lo;
    }
    for (int k = 0; k < size - p; ++k) {
      out(k, k + p) = up[k];
      out(k + p, k) = lo[k];
    }
  }
  return out;
}

template <typename Real>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1> band_spectrum(const BandMatrix<Real>& a) {
  Eigen::EigenSolver<RMatrix<Real>> es(a.entries, false);
  return es.eigenvalues();
}

/// rho_11 of the stationary vacuum/one-photon mixture:
/// eta sin^2 mu / (e^{gamma T} - 1 + eta sin^2 mu).
template <typename Real>
Real stationary_excited_probability(const StroboParams<Real>& params) {
  const Real drive = params.eta * std::pow(std::sin(params.mu), 2);
  return drive / (std::expm1(params.gamma_T) + drive);
}

/// Closed-form stationary state as a density matrix in `dim`.
template <typename Real>
DensityMatrix<Real> stationary_state_analytic(const StroboParams<Real>& params, FockDim dim) {
  params.validate();
  if (!(params.gamma_T > Real(0))) throw PreconditionError("stationary_state: gamma_T must be > 0");
  RVector<Real> pop = RVector<Real>::Zero(dim.size());
  pop[1] = stationary_excited_probability(params);
  pop[0] = Real(1) - pop[1];
  return DensityMatrix<Real>::diagonal(pop);
}

/// Fixed point of one period, from the unit eigenvector of A_0.
template <typename Real>
DensityMatrix<Real> stationary_state(const StroboParams<Real>& params, FockDim dim) {
  params.validate();
  if (!(params.gamma_T > Real(0))) throw PreconditionError("stationary_state: gamma_T must be > 0");
  const BandMatrix<Real> a0 = build_band_matrix(0, params, dim);
  Eigen::EigenSolver<RMatrix<Real>> es(a0.entries, true);
  int hits = 0, idx = -1;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i] - Complex<Real>(1)) <= Real(1e-10)) {
      ++hits;
      idx = i;
    }
  if (hits != 1)
    throw NonUniqueFixedPointError("stationary_state: " + std::to_string(hits) + " eigenvalues of A_0 within 1e-10 of 1");
  RVector<Real> v = es.eigenvectors().col(idx).real();
  v /= v.sum();
  return DensityMatrix<Real>::adopt(v.template cast<Complex<Real>>().asDiagonal());
}

/// Probability that the probe atom after an interval gamma T again reads e,
/// given that the previous one prepared an odd cat of mean photon number alpha2.
template <typename Real>
Real p_ee_analytic(Real alpha2, Real gamma_T_total) {
  if (!(alpha2 > Real(0))) throw PreconditionError("p_ee_analytic: alpha2 must be > 0");
  if (gamma_T_total < Real(0)) throw PreconditionError("p_ee_analytic: gamma_T must be >= 0");
  const Real x = alpha2;
  const Real decay = std::exp(-gamma_T_total);
  const Real num = std::exp(Real(-2) * x * decay) - std::exp(Real(-2) * x * (-std::expm1(-gamma_T_total)));
  const Real den = -std::expm1(Real(-2) * x);
  return Real(0.5) * (Real(1) - num / den);
}

template <typename Real>
StateDigest<Real> digest(const DensityMatrix<Real>& rho, bool with_spectrum) {
  StateDigest<Real> d;
  d.trace = rho.trace();
  d.mean_photon_number = mean_photon_number(rho);
  if (with_spectrum) {
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(rho.matrix(), Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
  }
  return d;
}

/// Records (P_e, P_g) of rho(kT) for k = 0..steps, applying strobo_step in between.
template <typename Real>
SequenceTrace<Real> run_sequence(const DensityMatrix<Real>& rho0, const StroboParams<Real>& params, int steps,
                                 bool with_spectrum = true) {
  params.validate();
  if (steps < 1) throw PreconditionError("run_sequence: steps must be >= 1");
  SequenceTrace<Real> trace;
  trace.entries.reserve(steps + 1);
  DensityMatrix<Real> rho = rho0;
  auto record = [&](int k) {
    const auto split = conditional_split(rho);
    trace.entries.push_back({k, split.P_e, split.P_g, digest(rho, with_spectrum)});
  };
  for (int k = 0; k < steps; ++k) {
    record(k);
    rho = strobo_step(rho, params);
  }
  record(steps);
  trace.final_state = rho;
  return trace;
}

/// Feedback angle mu with mu sqrt(n_bar) = pi (m + 1/2).
template <typename Real>
Real resonance_angle(Real n_bar, int m) {
  if (!(n_bar > Real(0))) throw PreconditionError("resonance_angle: n_bar must be > 0");
  if (m < 0) throw PreconditionError("resonance_angle: m must be >= 0");
  return std::numbers::pi_v<Real> * (Real(m) + Real(0.5)) / std::sqrt(n_bar);
}

/// Field operators attached to the probe outcomes for general Ramsey pulses
/// e -> c_e e + c_g g, g -> -c_g* e + c_e* g and dispersive phase phi:
/// M_e = c_e^2 e^{i phi n} - |c_g|^2,  M_g = c_e c_g e^{i phi n} + c_g c_e*.
/// Both are diagonal in the Fock basis; returned as their diagonals.
template <typename Real>
std::pair<CVector<Real>, CVector<Real>> probe_measurement_operators(Complex<Real> c_e, Complex<Real> c_g, Real phi,
                                                                    FockDim dim) {
  CVector<Real> me(dim.size()), mg(dim.size());
  for (int n = 0; n < dim.size(); ++n) {
    const Complex<Real> ph = std::polar(Real(1), phi * Real(n));
    me[n] = c_e * c_e * ph - std::norm(c_g);
    mg[n] = c_e * c_g * ph + c_g * std::conj(c_e);
  }
  return {me, mg};
}

/// True when both conditional maps rho -> M rho M^dagger act as projections
/// onto complementary nontrivial subspaces (every |M_n|^2 is 0 or 1 and both
/// outcomes are possible).
template <typename Real>
bool conditional_maps_are_projective(Complex<Real> c_e, Complex<Real> c_g, Real phi, FockDim dim, Real tol = Real(1e-12)) {
  const auto [me, mg] = probe_measurement_operators<Real>(c_e, c_g, phi, dim);
  bool e_nontrivial = false, g_nontrivial = false;
  for (int n = 0; n < dim.size(); ++n) {
    const Real pe = std::norm(me[n]);
    if (std::abs(pe) > tol && std::abs(pe - Real(1)) > tol) return false;
    e_nontrivial |= pe > Real(0.5);
    g_nontrivial |= pe < Real(0.5);
  }
  (void)mg;
  return e_nontrivial && g_nontrivial;
}

}  // namespace cavfb
