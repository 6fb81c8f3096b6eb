#pragma once

// Truncated Fock-space states, density matrices and the scalar diagnostics
// shared by every other module.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cavfb/errors.hpp"

namespace cavfb {

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Largest Fock index kept in the basis {|0>, ..., |n_max>}.
class FockDim {
 public:
  explicit FockDim(int n_max) : n_max_(n_max) {
    if (n_max < 1) throw PreconditionError("FockDim: n_max must be >= 1, got " + std::to_string(n_max));
  }
  int n_max() const { return n_max_; }
  /// Basis size N = n_max + 1.
  int size() const { return n_max_ + 1; }
  friend bool operator==(FockDim a, FockDim b) { return a.n_max_ == b.n_max_; }

 private:
  int n_max_;
};

/// Default truncation for states with mean photon number up to 10.
inline const FockDim kDefaultDim{63};

enum class CatParity : int { Even = +1, Odd = -1 };

inline int sign(CatParity p) { return static_cast<int>(p); }

namespace tolerance {
inline constexpr double kStateNorm = 1e-12;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPositivity = 1e-10;
inline constexpr double kTruncationTail = 1e-10;
}  // namespace tolerance

/// Normalized amplitude vector over a truncated Fock basis.
template <typename Real = double>
class StateVector {
 public:
  explicit StateVector(CVector<Real> amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() < 2) throw PreconditionError("StateVector: basis needs at least two levels");
    const Real norm2 = amps_.squaredNorm();
    if (std::abs(norm2 - Real(1)) > Real(tolerance::kStateNorm))
      throw InvariantError("StateVector: squared norm " + std::to_string(double(norm2)) + " differs from 1");
  }

  const CVector<Real>& amplitudes() const { return amps_; }
  Complex<Real> operator[](int n) const { return amps_[n]; }
  FockDim dim() const { return FockDim(static_cast<int>(amps_.size()) - 1); }

 private:
  CVector<Real> amps_;
};

/// Structural defects of a candidate density matrix.
template <typename Real>
struct DensityDefects {
  Real hermiticity = 0;  // max |rho - rho^dagger|
  Real trace_error = 0;  // |Tr rho - 1|
  Real min_eigenvalue = 0;
};

template <typename Real>
DensityDefects<Real> density_defects(const CMatrix<Real>& m) {
  DensityDefects<Real> d;
  d.hermiticity = (m - m.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(m.trace() - Complex<Real>(1));
  const CMatrix<Real> h = (m + m.adjoint()) * Real(0.5);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

/// Density matrix of one cavity mode in a truncated Fock basis.
///
/// `checked` validates Hermiticity, unit trace and positivity; operation
/// outputs are wrapped with `adopt`, and their invariants are exercised by
/// the test suites instead of being re-verified on every call.
template <typename Real = double>
class DensityMatrix {
 public:
  static DensityMatrix checked(CMatrix<Real> m) {
    if (m.rows() != m.cols() || m.rows() < 2) throw PreconditionError("DensityMatrix: need a square matrix with N >= 2");
    const auto d = density_defects<Real>(m);
    if (d.hermiticity > Real(tolerance::kHermitian))
      throw InvariantError("DensityMatrix: not Hermitian (defect " + std::to_string(double(d.hermiticity)) + ")");
    if (d.trace_error > Real(tolerance::kTrace))
      throw InvariantError("DensityMatrix: trace differs from 1 by " + std::to_string(double(d.trace_error)));
    if (d.min_eigenvalue < -Real(tolerance::kPositivity))
      throw InvariantError("DensityMatrix: negative eigenvalue " + std::to_string(double(d.min_eigenvalue)));
    return DensityMatrix(std::move(m));
  }

  static DensityMatrix adopt(CMatrix<Real> m) {
    if (m.rows() != m.cols() || m.rows() < 2) throw PreconditionError("DensityMatrix: need a square matrix with N >= 2");
    return DensityMatrix(std::move(m));
  }

  static DensityMatrix from_pure(const StateVector<Real>& psi) {
    const auto& a = psi.amplitudes();
    return DensityMatrix(a * a.adjoint());
  }

  /// Diagonal state sum_n p_n |n><n|.
  static DensityMatrix diagonal(const RVector<Real>& populations) {
    return checked(populations.template cast<Complex<Real>>().asDiagonal());
  }

  const CMatrix<Real>& matrix() const { return m_; }
  Complex<Real> operator()(int n, int m) const { return m_(n, m); }
  FockDim dim() const { return FockDim(static_cast<int>(m_.rows()) - 1); }
  int size() const { return static_cast<int>(m_.rows()); }
  Real trace() const { return m_.trace().real(); }

 private:
  explicit DensityMatrix(CMatrix<Real> m) : m_(std::move(m)) {}
  CMatrix<Real> m_;
};

using StateVectord = StateVector<double>;
using DensityMatrixd = DensityMatrix<double>;

namespace detail {

/// log of the Poisson weight e^{-x} x^n / n!.
template <typename Real>
Real log_poisson(Real x, int n) {
  if (x == Real(0)) return n == 0 ? Real(0) : -std::numeric_limits<Real>::infinity();
  return -x + Real(n) * std::log(x) - std::lgamma(Real(n) + Real(1));
}

/// Untruncated Poisson mass beyond n_max, summed term by term.
template <typename Real>
Real poisson_tail(Real x, int n_max) {
  if (x == Real(0)) return Real(0);
  Real tail = 0;
  for (int n = n_max + 1;; ++n) {
    const Real term = std::exp(log_poisson(x, n));
    tail += term;
    if (Real(n) > x && term <= tail * Real(1e-18)) break;
    if (n > n_max + 100000) break;
  }
  return tail;
}

template <typename Real>
void require_tail(Real x, FockDim dim, const char* what) {
  const Real tail = poisson_tail(x, dim.n_max());
  if (tail > Real(tolerance::kTruncationTail))
    throw TruncationError(std::string(what) + ": Poisson tail mass " + std::to_string(double(tail)) +
                          " beyond n_max=" + std::to_string(dim.n_max()) + " exceeds 1e-10");
}

/// Untruncated coherent-state amplitudes e^{-|a|^2/2} a^n / sqrt(n!).
template <typename Real>
CVector<Real> coherent_amplitudes(Complex<Real> alpha, FockDim dim) {
  CVector<Real> c = CVector<Real>::Zero(dim.size());
  const Real r = std::abs(alpha);
  if (r == Real(0)) {
    c[0] = 1;
    return c;
  }
  const Real phase = std::arg(alpha);
  for (int n = 0; n < dim.size(); ++n) {
    const Real logmag = Real(0.5) * log_poisson(r * r, n);
    c[n] = std::polar(std::exp(logmag), Real(n) * phase);
  }
  return c;
}

}  // namespace detail

/// Coherent state |alpha>, renormalized over the truncated basis.
template <typename Real>
StateVector<Real> coherent_state(Complex<Real> alpha, FockDim dim = kDefaultDim) {
  detail::require_tail(std::norm(alpha), dim, "coherent_state");
  CVector<Real> c = detail::coherent_amplitudes(alpha, dim);
  c /= c.norm();
  return StateVector<Real>(std::move(c));
}

/// N_+- of the even/odd cat, with N^-2 = 2 (1 +- exp(-2|alpha|^2)).
template <typename Real>
Real cat_normalization(Real abs_alpha2, CatParity parity) {
  const Real e = -std::expm1(Real(-2) * abs_alpha2);  // 1 - exp(-2x)
  const Real inv2 = parity == CatParity::Even ? Real(2) * (Real(2) - e) : Real(2) * e;
  return Real(1) / std::sqrt(inv2);
}

/// Even or odd Schroedinger cat N_+-(|alpha> +- |-alpha>).
template <typename Real>
StateVector<Real> cat_state(Complex<Real> alpha, CatParity parity, FockDim dim = kDefaultDim) {
  const Real x = std::norm(alpha);
  if (parity == CatParity::Odd && std::abs(alpha) < Real(1e-8))
    throw DegenerateCatError("cat_state: odd cat needs |alpha| >= 1e-8");
  detail::require_tail(x, dim, "cat_state");
  const Real norm = cat_normalization(x, parity);
  CVector<Real> c = detail::coherent_amplitudes(alpha, dim);
  for (int n = 0; n < dim.size(); ++n) {
    const bool even = n % 2 == 0;
    const bool keep = parity == CatParity::Even ? even : !even;
    c[n] = keep ? Real(2) * norm * c[n] : Complex<Real>(0);
  }
  c /= c.norm();
  return StateVector<Real>(std::move(c));
}

/// Sparse superposition sum_k coeff_k |n_k>.
template <typename Real>
StateVector<Real> fock_superposition(const std::vector<std::pair<int, Complex<Real>>>& terms, FockDim dim = kDefaultDim) {
  CVector<Real> c = CVector<Real>::Zero(dim.size());
  for (const auto& [n, coeff] : terms) {
    if (n < 0 || n > dim.n_max())
      throw IndexError("fock_superposition: level " + std::to_string(n) + " outside 0.." + std::to_string(dim.n_max()));
    c[n] += coeff;
  }
  const Real norm2 = c.squaredNorm();
  if (std::abs(norm2 - Real(1)) > Real(1e-10))
    throw PreconditionError("fock_superposition: coefficients have squared norm " + std::to_string(double(norm2)));
  c /= std::sqrt(norm2);
  return StateVector<Real>(std::move(c));
}

template <typename Real>
StateVector<Real> fock_state(int n, FockDim dim = kDefaultDim) {
  return fock_superposition<Real>({{n, Complex<Real>(1)}}, dim);
}

/// <P> = sum_n (-1)^n rho_nn.
template <typename Real>
Real parity_expectation(const DensityMatrix<Real>& rho) {
  const auto& m = rho.matrix();
  Real p = 0;
  for (int n = 0; n < m.rows(); ++n) p += (n % 2 == 0 ? Real(1) : Real(-1)) * m(n, n).real();
  return p;
}

template <typename Real>
Real mean_photon_number(const DensityMatrix<Real>& rho) {
  const auto& m = rho.matrix();
  Real s = 0;
  for (int n = 1; n < m.rows(); ++n) s += Real(n) * m(n, n).real();
  return s;
}

/// Tr{rho0 rho_t} = sum_{n,m} conj(rho0_nm) rho_t_nm.
template <typename Real>
Real fidelity(const DensityMatrix<Real>& rho0, const DensityMatrix<Real>& rho_t) {
  if (!(rho0.dim() == rho_t.dim()))
    throw DimMismatchError("fidelity: dimensions " + std::to_string(rho0.size()) + " and " + std::to_string(rho_t.size()));
  return (rho0.matrix().conjugate().cwiseProduct(rho_t.matrix())).sum().real();
}

/// <a> = sum_n sqrt(n+1) rho_{n+1,n}.
template <typename Real>
Complex<Real> mean_amplitude(const DensityMatrix<Real>& rho) {
  const auto& m = rho.matrix();
  Complex<Real> s = 0;
  for (int n = 0; n + 1 < m.rows(); ++n) s += std::sqrt(Real(n + 1)) * m(n + 1, n);
  return s;
}

/// e^{i phi n} rho e^{-i phi n}.
template <typename Real>
DensityMatrix<Real> rotate_phase(const DensityMatrix<Real>& rho, Real phi) {
  CMatrix<Real> m = rho.matrix();
  for (int n = 0; n < m.rows(); ++n)
    for (int k = 0; k < m.cols(); ++k) m(n, k) *= std::polar(Real(1), phi * Real(n - k));
  return DensityMatrix<Real>::adopt(std::move(m));
}

/// Half the trace norm of the Hermitian difference.
template <typename Real>
Real trace_distance(const CMatrix<Real>& a, const CMatrix<Real>& b) {
  const CMatrix<Real> d = a - b;
  const CMatrix<Real> h = (d + d.adjoint()) * Real(0.5);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h, Eigen::EigenvaluesOnly);
  return Real(0.5) * es.eigenvalues().cwiseAbs().sum();
}

template <typename Real>
Real trace_distance(const DensityMatrix<Real>& a, const DensityMatrix<Real>& b) {
  return trace_distance<Real>(a.matrix(), b.matrix());
}

/// Copy rho into a basis with a different truncation; fails if populated levels would be cut.
template <typename Real>
DensityMatrix<Real> resize(const DensityMatrix<Real>& rho, FockDim dim) {
  const int n_new = dim.size();
  const int n_old = rho.size();
  CMatrix<Real> m = CMatrix<Real>::Zero(n_new, n_new);
  const int k = std::min(n_new, n_old);
  if (n_new < n_old) {
    const Real cut = rho.matrix().diagonal().real().tail(n_old - n_new).sum();
    if (cut > Real(tolerance::kTruncationTail))
      throw TruncationError("resize: discarding population " + std::to_string(double(cut)));
  }
  m.topLeftCorner(k, k) = rho.matrix().topLeftCorner(k, k);
  return DensityMatrix<Real>::adopt(std::move(m));
}

}  // namespace cavfb
