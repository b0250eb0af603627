// Shared numeric plumbing: complex aliases, tolerance constants, mixed-radix
// index helpers, and the global-phase alignment metric used across modules.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hqp {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double tau = 2.0 * std::numbers::pi;

namespace tol {
// Norm / unitarity invariants at desk scale (dims <= 2^12).
inline constexpr double invariant = 1e-10;
// Exact algebraic identities.
inline constexpr double identity = 1e-12;
// 0/1-patterned (permutation / block) matrices.
inline constexpr double pattern = 1e-14;
}  // namespace tol

inline double max_abs(const CMat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const CVec& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// ‖U†U − I‖_max; zero iff U is exactly unitary.
inline double unitarity_defect(const CMat& u) {
  if (u.rows() != u.cols()) {
    throw std::invalid_argument("unitarity_defect: matrix is not square");
  }
  return max_abs(CMat(u.adjoint() * u - CMat::Identity(u.rows(), u.cols())));
}

namespace detail {

inline Complex frobenius_alignment(const Complex& overlap) {
  const double r = std::abs(overlap);
  return r < 1e-300 ? Complex(1.0, 0.0) : overlap / r;
}

}  // namespace detail

/// min over unit phases φ of ‖φ·a − b‖_max, with φ picked by Frobenius
/// alignment. Zero (to rounding) iff a and b agree up to a global phase.
inline double phase_aligned_distance(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("phase_aligned_distance: shape mismatch");
  }
  const Complex phi = detail::frobenius_alignment((a.conjugate().cwiseProduct(b)).sum());
  return max_abs(CMat(phi * a - b));
}

inline double phase_aligned_distance(const CVec& a, const CVec& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("phase_aligned_distance: length mismatch");
  }
  const Complex phi = detail::frobenius_alignment(a.dot(b));  // conj(a)·b
  return max_abs(CVec(phi * a - b));
}

/// Canonical representative of a θ-gate phase parameter in [0, 1).
inline double canonical_phase_parameter(double q) {
  double r = q - std::floor(q);
  if (r >= 1.0) r -= 1.0;  // q just below an integer rounds up to 1.0
  return r == 0.0 ? 0.0 : r;
}

/// Canonical representative of an angle in [0, 2π).
inline double canonical_radians(double alpha) {
  double r = alpha - tau * std::floor(alpha / tau);
  if (r >= tau) r -= tau;
  return r == 0.0 ? 0.0 : r;
}

inline long product_dim(const std::vector<long>& dims) {
  long p = 1;
  for (long d : dims) {
    if (d < 1) throw std::invalid_argument("factor dimension must be >= 1");
    p *= d;
  }
  return p;
}

/// Flat index from per-factor digits; the FIRST factor varies slowest.
inline long ravel_index(const std::vector<long>& digits, const std::vector<long>& dims) {
  if (digits.size() != dims.size()) {
    throw std::invalid_argument("ravel_index: digit/dimension count mismatch");
  }
  long flat = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= dims[k]) {
      throw std::out_of_range("ravel_index: digit out of range");
    }
    flat = flat * dims[k] + digits[k];
  }
  return flat;
}

inline std::vector<long> unravel_index(long flat, const std::vector<long>& dims) {
  std::vector<long> digits(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    digits[k] = flat % dims[k];
    flat /= dims[k];
  }
  return digits;
}

}  // namespace hqp
