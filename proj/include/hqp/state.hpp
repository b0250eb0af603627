// Core state-vector substrate: amplitude vectors over labeled tensor factors,
// certified unitary matrices, the position/momentum discrete Fourier
// transform, Schmidt analysis of bipartite cuts, and the finite-matrix
// commutator demonstration.
//
// Conventions used project-wide:
//   * Multi-factor amplitudes are stored with the FIRST listed factor as the
//     slowest-varying index.
//   * A continuous program variable is realized in a truncated basis of M
//     integer momenta {0..M−1}; the position picture is the sampled grid
//     q_j = 2πj/M, related by dft().
#pragma once

#include "hqp/core.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace hqp {

enum class FactorRole { DataQubit, ProgramDiscrete, ProgramContinuous };

inline const char* to_string(FactorRole role) {
  switch (role) {
    case FactorRole::DataQubit: return "data-qubit";
    case FactorRole::ProgramDiscrete: return "program-discrete";
    case FactorRole::ProgramContinuous: return "program-continuous";
  }
  return "?";
}

/// Normalized amplitude vector over an ordered list of tensor factors.
class StateVector {
 public:
  StateVector(CVec amplitudes, std::vector<long> dims, std::vector<FactorRole> roles)
      : amps_(std::move(amplitudes)), dims_(std::move(dims)), roles_(std::move(roles)) {
    if (dims_.empty()) throw std::invalid_argument("StateVector: no factors");
    if (roles_.size() != dims_.size()) {
      throw std::invalid_argument("StateVector: role/dimension count mismatch");
    }
    if (product_dim(dims_) != amps_.size()) {
      throw std::invalid_argument("StateVector: product(dims) != amplitude count");
    }
    if (std::abs(amps_.norm() - 1.0) > tol::invariant) {
      throw std::invalid_argument("StateVector: not normalized");
    }
  }

  /// Single-factor state.
  static StateVector single(CVec amplitudes, FactorRole role) {
    const long d = amplitudes.size();
    return StateVector(std::move(amplitudes), {d}, {role});
  }

  /// Rescales to unit norm; rejects (near-)zero vectors.
  static StateVector normalized(CVec amplitudes, std::vector<long> dims,
                                std::vector<FactorRole> roles) {
    const double n = amplitudes.norm();
    if (n < 1e-12) throw std::invalid_argument("StateVector: zero vector");
    return StateVector(amplitudes / n, std::move(dims), std::move(roles));
  }

  /// Basis state |index⟩ of the given factor structure.
  static StateVector basis(std::vector<long> dims, std::vector<FactorRole> roles, long index) {
    CVec v = CVec::Zero(product_dim(dims));
    if (index < 0 || index >= v.size()) throw std::out_of_range("basis index out of range");
    v(index) = 1.0;
    return StateVector(std::move(v), std::move(dims), std::move(roles));
  }

  /// n-qubit computational basis state; qubit 0 is the most significant bit
  /// of `index`, so qubit_basis(2, 0b10) is |10⟩.
  static StateVector qubit_basis(int n, long index, FactorRole role = FactorRole::DataQubit) {
    if (n < 1 || n > 24) throw std::invalid_argument("qubit count out of range");
    return basis(std::vector<long>(n, 2), std::vector<FactorRole>(n, role), index);
  }

  const CVec& amplitudes() const { return amps_; }
  const std::vector<long>& dims() const { return dims_; }
  const std::vector<FactorRole>& roles() const { return roles_; }
  long dim() const { return amps_.size(); }
  std::size_t factor_count() const { return dims_.size(); }
  Complex amplitude(long flat) const { return amps_(flat); }
  double norm() const { return amps_.norm(); }

 private:
  CVec amps_;
  std::vector<long> dims_;
  std::vector<FactorRole> roles_;
};

/// Square complex matrix with unitarity certified at construction.
class Unitary {
 public:
  explicit Unitary(CMat entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("Unitary: matrix is not square");
    const double defect = unitarity_defect(m_);
    if (defect > tol::invariant) {
      throw std::invalid_argument("Unitary: ||U'U - I||_max = " + std::to_string(defect) +
                                  " exceeds tolerance");
    }
  }

  static Unitary identity(long d) { return Unitary(CMat::Identity(d, d)); }

  long dim() const { return m_.rows(); }
  const CMat& matrix() const { return m_; }
  Complex entry(long i, long j) const { return m_(i, j); }
  Unitary adjoint() const { return Unitary(m_.adjoint()); }

  friend Unitary operator*(const Unitary& a, const Unitary& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("Unitary product: dimension mismatch");
    return Unitary(a.m_ * b.m_);
  }

 private:
  CMat m_;
};

/// Exact two-sided partition of a state's factors.
class BipartiteCut {
 public:
  BipartiteCut(std::vector<std::size_t> left_factors, std::size_t factor_count) {
    std::sort(left_factors.begin(), left_factors.end());
    left_factors.erase(std::unique(left_factors.begin(), left_factors.end()),
                       left_factors.end());
    if (left_factors.empty() || left_factors.size() >= factor_count) {
      throw std::invalid_argument("BipartiteCut: both sides must be non-empty");
    }
    for (std::size_t f : left_factors) {
      if (f >= factor_count) throw std::invalid_argument("BipartiteCut: factor index out of range");
    }
    for (std::size_t f = 0; f < factor_count; ++f) {
      if (!std::binary_search(left_factors.begin(), left_factors.end(), f)) right_.push_back(f);
    }
    left_ = std::move(left_factors);
  }

  const std::vector<std::size_t>& left() const { return left_; }
  const std::vector<std::size_t>& right() const { return right_; }

 private:
  std::vector<std::size_t> left_;
  std::vector<std::size_t> right_;
};

/// a ⊗ b; the left operand's factors vary slower.
inline StateVector tensor_product(const StateVector& a, const StateVector& b) {
  CVec out(a.dim() * b.dim());
  for (long i = 0; i < a.dim(); ++i) {
    out.segment(i * b.dim(), b.dim()) = a.amplitude(i) * b.amplitudes();
  }
  std::vector<long> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  std::vector<FactorRole> roles = a.roles();
  roles.insert(roles.end(), b.roles().begin(), b.roles().end());
  return StateVector(std::move(out), std::move(dims), std::move(roles));
}

/// Forward transform matrix, position → momentum: F_{pj} = e^{−2πi p j/M}/√M.
inline CMat dft_matrix(long m) {
  if (m < 1) throw std::invalid_argument("dft_matrix: dimension must be >= 1");
  CMat f(m, m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (long p = 0; p < m; ++p) {
    for (long j = 0; j < m; ++j) {
      const double phase = -tau * static_cast<double>(p) * static_cast<double>(j) /
                           static_cast<double>(m);
      f(p, j) = scale * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return f;
}

namespace detail {

inline StateVector apply_matrix_to_factor(const StateVector& s, std::size_t factor,
                                          const CMat& m) {
  if (factor >= s.factor_count()) throw std::out_of_range("factor index out of range");
  const long fd = s.dims()[factor];
  if (m.rows() != fd || m.cols() != fd) {
    throw std::invalid_argument("matrix does not match factor dimension");
  }
  long outer = 1, inner = 1;
  for (std::size_t k = 0; k < factor; ++k) outer *= s.dims()[k];
  for (std::size_t k = factor + 1; k < s.factor_count(); ++k) inner *= s.dims()[k];

  CVec out(s.dim());
  CVec slice(fd);
  for (long o = 0; o < outer; ++o) {
    for (long i = 0; i < inner; ++i) {
      const long base = o * fd * inner + i;
      for (long j = 0; j < fd; ++j) slice(j) = s.amplitude(base + j * inner);
      const CVec y = m * slice;
      for (long j = 0; j < fd; ++j) out(base + j * inner) = y(j);
    }
  }
  return StateVector(std::move(out), s.dims(), s.roles());
}

}  // namespace detail

/// Discrete Fourier transform of one factor (position → momentum
/// coefficients): c̃_p = (1/√M) Σ_j e^{−2πi p j/M} c_j.
inline StateVector dft(const StateVector& s, std::size_t factor = 0) {
  if (factor >= s.factor_count()) throw std::out_of_range("dft: factor index out of range");
  return detail::apply_matrix_to_factor(s, factor, dft_matrix(s.dims()[factor]));
}

/// Inverse of dft() on the same factor.
inline StateVector inverse_dft(const StateVector& s, std::size_t factor = 0) {
  if (factor >= s.factor_count()) throw std::out_of_range("inverse_dft: factor index out of range");
  return detail::apply_matrix_to_factor(s, factor, dft_matrix(s.dims()[factor]).adjoint());
}

/// Schmidt coefficients across the cut, sorted descending; squares sum to 1.
inline std::vector<double> schmidt_coefficients(const StateVector& s, const BipartiteCut& cut) {
  if (cut.left().size() + cut.right().size() != s.factor_count()) {
    throw std::invalid_argument("schmidt_coefficients: cut does not match factor count");
  }
  std::vector<long> ldims, rdims;
  for (std::size_t f : cut.left()) ldims.push_back(s.dims()[f]);
  for (std::size_t f : cut.right()) rdims.push_back(s.dims()[f]);

  CMat coeff(product_dim(ldims), product_dim(rdims));
  std::vector<long> ldig(ldims.size()), rdig(rdims.size());
  for (long flat = 0; flat < s.dim(); ++flat) {
    const std::vector<long> digits = unravel_index(flat, s.dims());
    for (std::size_t k = 0; k < cut.left().size(); ++k) ldig[k] = digits[cut.left()[k]];
    for (std::size_t k = 0; k < cut.right().size(); ++k) rdig[k] = digits[cut.right()[k]];
    coeff(ravel_index(ldig, ldims), ravel_index(rdig, rdims)) = s.amplitude(flat);
  }

  Eigen::JacobiSVD<CMat> svd(coeff);
  std::vector<double> out(svd.singularValues().data(),
                          svd.singularValues().data() + svd.singularValues().size());
  return out;  // Eigen returns them sorted descending
}

/// Count of Schmidt coefficients above the rank threshold.
inline int schmidt_rank(const std::vector<double>& coefficients, double threshold = 1e-9) {
  return static_cast<int>(std::count_if(coefficients.begin(), coefficients.end(),
                                        [&](double c) { return c > threshold; }));
}

struct CommutatorDefect {
  Complex trace_of_commutator;          // i·Tr[P,Q]
  double trace_of_identity;             // D
  double max_deviation_from_identity;   // ‖i[P,Q] − I‖_max
};

/// Demonstrates that i[P,Q] = I has no D×D matrix solution: the commutator's
/// trace vanishes while Tr(I) = D, so the deviation from identity is large.
/// Q is the sampled grid diag(2πj/D); P is the dft-conjugate of diag(j).
inline CommutatorDefect commutator_defect(long d) {
  if (d < 2) throw std::invalid_argument("commutator_defect: D must be >= 2");
  CMat q = CMat::Zero(d, d);
  CMat pdiag = CMat::Zero(d, d);
  for (long j = 0; j < d; ++j) {
    q(j, j) = tau * static_cast<double>(j) / static_cast<double>(d);
    pdiag(j, j) = static_cast<double>(j);
  }
  const CMat f = dft_matrix(d);
  const CMat p = f.adjoint() * pdiag * f;
  const CMat icomm = Complex(0, 1) * (p * q - q * p);
  return CommutatorDefect{
      .trace_of_commutator = icomm.trace(),
      .trace_of_identity = static_cast<double>(d),
      .max_deviation_from_identity = max_abs(CMat(icomm - CMat::Identity(d, d))),
  };
}

}  // namespace hqp
