#pragma once

// Wigner function of a Fock-basis operator, in the convention where the
// vacuum has W(0) = 2/pi:
//
//   W(r, theta) = (2/pi) e^{-2r^2} sum_{n,m} X_{n,m} (-1)^j sqrt(j!/(j+k)!)
//                 (2r)^k e^{i theta (m-n)} L_j^k(4r^2),   j = min(n,m), k = |m-n|.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cavfb/errors.hpp"
#include "cavfb/fock.hpp"

namespace cavfb {

/// Generalized Laguerre polynomial L_n^k(x) by three-term recurrence.
template <typename Real>
Real generalized_laguerre(int n, int k, Real x) {
  if (n < 0 || k < 0) throw PreconditionError("generalized_laguerre: need n >= 0 and k >= 0");
  if (n == 0) return Real(1);
  Real prev = 1;
  Real cur = Real(1 + k) - x;
  for (int j = 1; j < n; ++j) {
    const Real next = ((Real(2 * j + 1 + k) - x) * cur - Real(j + k) * prev) / Real(j + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

enum class GridMode { Cartesian, Polar };

/// Sampling axes: (x, y) for Cartesian grids, (r, theta) for polar ones.
template <typename Real = double>
struct GridSpec {
  GridMode mode = GridMode::Cartesian;
  std::vector<Real> axis0;
  std::vector<Real> axis1;

  static std::vector<Real> linspace(Real lo, Real hi, int points) {
    if (points < 2) throw PreconditionError("GridSpec: need at least two points per axis");
    std::vector<Real> v(points);
    for (int i = 0; i < points; ++i) v[i] = lo + (hi - lo) * Real(i) / Real(points - 1);
    return v;
  }

  /// Square grid over [-extent, extent]^2.
  static GridSpec cartesian(Real extent, int points) {
    if (!(extent > Real(0))) throw PreconditionError("GridSpec: extent must be > 0");
    auto ax = linspace(-extent, extent, points);
    return GridSpec{GridMode::Cartesian, ax, ax};
  }

  /// r in [0, r_max], theta uniform over [0, 2 pi).
  static GridSpec polar(Real r_max, int n_r, int n_theta) {
    if (!(r_max > Real(0))) throw PreconditionError("GridSpec: r_max must be > 0");
    if (n_theta < 3) throw PreconditionError("GridSpec: need at least three angles");
    std::vector<Real> th(n_theta);
    for (int i = 0; i < n_theta; ++i) th[i] = Real(2) * std::numbers::pi_v<Real> * Real(i) / Real(n_theta);
    return GridSpec{GridMode::Polar, linspace(Real(0), r_max, n_r), th};
  }

  /// Default grid for states with |alpha|^2 <= 5.
  static GridSpec default_grid() { return cartesian(Real(4.5), 121); }

  void validate() const {
    for (const auto* ax : {&axis0, &axis1}) {
      if (ax->size() < 2) throw PreconditionError("GridSpec: each axis needs at least two points");
      for (std::size_t i = 1; i < ax->size(); ++i)
        if (!((*ax)[i] > (*ax)[i - 1])) throw PreconditionError("GridSpec: axes must be strictly increasing");
    }
    if (mode == GridMode::Polar && axis0.front() < Real(0)) throw PreconditionError("GridSpec: radii must be >= 0");
  }
};

template <typename Real = double>
struct WignerGrid {
  GridSpec<Real> spec;
  RMatrix<Real> values;  // values(i, j) = W(axis0[i], axis1[j])
  std::string source_digest;
  Real integral = 0;          // quadrature of W over the grid
  Real max_imag_residue = 0;  // largest |Im| discarded from the complex sum
};

/// FNV-1a digest of the raw matrix bytes, as 16 hex digits.
template <typename Real>
std::string matrix_digest(const CMatrix<Real>& m) {
  std::uint64_t h = 1469598103934665603ULL;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double parts[2] = {double(m(i, j).real()), double(m(i, j).imag())};
      unsigned char bytes[sizeof(parts)];
      std::memcpy(bytes, parts, sizeof(parts));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
      }
    }
  static const char* hex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[i] = hex[h & 0xF];
  return s;
}

/// Evaluates the phase-space transform of an operator X at arbitrary points.
/// Factorial ratios are kept in log space.
template <typename Real = double>
class WignerKernel {
 public:
  explicit WignerKernel(CMatrix<Real> x) : x_(std::move(x)), n_(static_cast<int>(x_.rows())) {
    ratio_ = RMatrix<Real>::Zero(n_, n_);
    for (int k = 0; k < n_; ++k)
      for (int j = 0; j + k < n_; ++j)
        ratio_(j, k) = std::exp(Real(0.5) * (std::lgamma(Real(j + 1)) - std::lgamma(Real(j + k + 1))));
    band_used_.assign(n_, false);
    for (int k = 0; k < n_; ++k)
      for (int j = 0; j + k < n_ && !band_used_[k]; ++j)
        band_used_[k] = x_(j, j + k) != Complex<Real>(0) || x_(j + k, j) != Complex<Real>(0);
  }

  /// Complex sum at polar point (r, theta); its imaginary part is round-off for Hermitian X.
  Complex<Real> at_polar(Real r, Real theta) const {
    const Real x = Real(4) * r * r;
    const Real gauss_log = Real(-2) * r * r;
    const Real two_over_pi = Real(2) / std::numbers::pi_v<Real>;
    Complex<Real> sum = 0;
    std::vector<Real> lag(n_);
    for (int k = 0; k < n_; ++k) {
      if (k > 0 && r == Real(0)) break;
      if (!band_used_[k]) continue;
      const int len = n_ - k;
      lag[0] = 1;
      if (len > 1) lag[1] = Real(1 + k) - x;
      for (int j = 1; j + 1 < len; ++j)
        lag[j + 1] = ((Real(2 * j + 1 + k) - x) * lag[j] - Real(j + k) * lag[j - 1]) / Real(j + 1);
      const Real log_rk = k == 0 ? Real(0) : Real(k) * std::log(Real(2) * r);
      const Real radial = std::exp(log_rk + gauss_log);
      const Complex<Real> up = std::polar(Real(1), theta * Real(k));
      for (int j = 0; j < len; ++j) {
        const Real mag = ratio_(j, k) * radial * lag[j] * (j % 2 == 0 ? Real(1) : Real(-1));
        if (k == 0) {
          sum += mag * x_(j, j);
        } else {
          sum += mag * (x_(j, j + k) * up + x_(j + k, j) * std::conj(up));
        }
      }
    }
    return two_over_pi * sum;
  }

  Complex<Real> at_cartesian(Real x, Real y) const { return at_polar(std::hypot(x, y), std::atan2(y, x)); }

  const CMatrix<Real>& op() const { return x_; }

 private:
  CMatrix<Real> x_;
  int n_;
  RMatrix<Real> ratio_;  // sqrt(j! / (j+k)!), built from log-gamma
  std::vector<bool> band_used_;
};

namespace detail {

template <typename Real>
Real trapezoid_weight(const std::vector<Real>& ax, std::size_t i) {
  const std::size_t n = ax.size();
  Real w = 0;
  if (i > 0) w += Real(0.5) * (ax[i] - ax[i - 1]);
  if (i + 1 < n) w += Real(0.5) * (ax[i + 1] - ax[i]);
  return w;
}

/// Trapezoid weights on a periodic angle axis, closing the gap back to theta_0 + 2 pi.
template <typename Real>
std::vector<Real> periodic_weights(const std::vector<Real>& th) {
  const std::size_t n = th.size();
  std::vector<Real> w(n);
  const Real two_pi = Real(2) * std::numbers::pi_v<Real>;
  for (std::size_t i = 0; i < n; ++i) {
    const Real next = i + 1 < n ? th[i + 1] : th[0] + two_pi;
    const Real prev = i > 0 ? th[i - 1] : th[n - 1] - two_pi;
    w[i] = Real(0.5) * (next - prev);
  }
  return w;
}

template <typename Real>
Real grid_integral(const GridSpec<Real>& spec, const RMatrix<Real>& v) {
  Real s = 0;
  if (spec.mode == GridMode::Cartesian) {
    for (std::size_t i = 0; i < spec.axis0.size(); ++i)
      for (std::size_t j = 0; j < spec.axis1.size(); ++j)
        s += trapezoid_weight(spec.axis0, i) * trapezoid_weight(spec.axis1, j) * v(i, j);
  } else {
    const auto wt = periodic_weights(spec.axis1);
    for (std::size_t i = 0; i < spec.axis0.size(); ++i)
      for (std::size_t j = 0; j < spec.axis1.size(); ++j)
        s += trapezoid_weight(spec.axis0, i) * spec.axis0[i] * wt[j] * v(i, j);
  }
  return s;
}

}  // namespace detail

/// Samples the transform of an arbitrary operator on a grid and checks the
/// quadrature against its trace.
template <typename Real>
WignerGrid<Real> wigner_transform(const CMatrix<Real>& op, const GridSpec<Real>& spec) {
  spec.validate();
  const WignerKernel<Real> kernel(op);
  WignerGrid<Real> g;
  g.spec = spec;
  g.values = RMatrix<Real>(spec.axis0.size(), spec.axis1.size());
  for (std::size_t i = 0; i < spec.axis0.size(); ++i)
    for (std::size_t j = 0; j < spec.axis1.size(); ++j) {
      const Complex<Real> w = spec.mode == GridMode::Cartesian ? kernel.at_cartesian(spec.axis0[i], spec.axis1[j])
                                                               : kernel.at_polar(spec.axis0[i], spec.axis1[j]);
      g.values(i, j) = w.real();
      g.max_imag_residue = std::max(g.max_imag_residue, std::abs(w.imag()));
    }
  if (!g.values.allFinite()) throw InvariantError("wigner_transform: non-finite values");
  g.integral = detail::grid_integral(spec, g.values);
  const Real expected = op.trace().real();
  if (std::abs(g.integral - expected) > Real(1e-2))
    throw GridTooCoarseError("wigner_transform: grid quadrature " + std::to_string(double(g.integral)) + " vs trace " +
                             std::to_string(double(expected)));
  g.source_digest = matrix_digest<Real>(op);
  return g;
}

template <typename Real>
WignerGrid<Real> wigner_function(const DensityMatrix<Real>& rho, const GridSpec<Real>& spec = GridSpec<Real>::default_grid()) {
  return wigner_transform<Real>(rho.matrix(), spec);
}

/// Operator -[sqrt n, [sqrt n, rho]], elementwise -(sqrt n - sqrt m)^2 rho_{n,m}.
template <typename Real>
CMatrix<Real> sqrt_diffusion_generator(const CMatrix<Real>& rho) {
  CMatrix<Real> g = rho;
  for (int n = 0; n < g.rows(); ++n)
    for (int m = 0; m < g.cols(); ++m) {
      const Real d = std::sqrt(Real(n)) - std::sqrt(Real(m));
      g(n, m) *= -d * d;
    }
  return g;
}

/// Operator -[n, [n, rho]], elementwise -(n - m)^2 rho_{n,m}.
template <typename Real>
CMatrix<Real> phase_diffusion_generator(const CMatrix<Real>& rho) {
  CMatrix<Real> g = rho;
  for (int n = 0; n < g.rows(); ++n)
    for (int m = 0; m < g.cols(); ++m) g(n, m) *= -Real((n - m) * (n - m));
  return g;
}

template <typename Real>
WignerGrid<Real> sqrt_diffusion_generator_wigner(const DensityMatrix<Real>& rho,
                                                 const GridSpec<Real>& spec = GridSpec<Real>::default_grid()) {
  return wigner_transform<Real>(sqrt_diffusion_generator<Real>(rho.matrix()), spec);
}

/// Interference-fringe visibility: max - min of W along the imaginary axis
/// (the grid column closest to x = 0). Cartesian grids only.
template <typename Real>
Real fringe_visibility(const WignerGrid<Real>& g) {
  if (g.spec.mode != GridMode::Cartesian) throw PreconditionError("fringe_visibility: needs a Cartesian grid");
  std::size_t col = 0;
  for (std::size_t i = 1; i < g.spec.axis0.size(); ++i)
    if (std::abs(g.spec.axis0[i]) < std::abs(g.spec.axis0[col])) col = i;
  const auto line = g.values.row(col);
  return line.maxCoeff() - line.minCoeff();
}

}  // namespace cavfb
