// Gate constructors: the exp(2πi q σ_k) one-parameter families, CNOT,
// embedding of single-qubit gates into n-qubit registers, and synthesis of an
// arbitrary 2×2 unitary into three rotation angles.
#pragma once

#include "hqp/core.hpp"
#include "hqp/state.hpp"

#include <array>

namespace hqp {

/// Pauli matrix σ_k, k ∈ {1,2,3}.
inline CMat pauli(int k) {
  CMat s(2, 2);
  switch (k) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli: axis must be 1, 2 or 3");
  }
  return s;
}

/// Phase parameter of the rotation family; the gate has period 1 in q.
struct PhaseParameter {
  double value = 0.0;
  static PhaseParameter canonical(double q) { return {canonical_phase_parameter(q)}; }
};

/// Rotation angles for axes 1, 2, 3, applied in that order (θ1 first).
struct AngleTriple {
  PhaseParameter q1, q2, q3;
};

/// exp(2πi q σ_k) = cos(2πq)·I + i·sin(2πq)·σ_k. Determinant 1 for every q.
inline Unitary theta_gate(int axis, double q) {
  const double phase = tau * q;
  return Unitary(std::cos(phase) * CMat::Identity(2, 2) +
                 Complex(0, std::sin(phase)) * pauli(axis));
}

namespace detail {

inline long qubit_mask(int qubit, int n) {
  if (n < 1 || n > 12) throw std::invalid_argument("qubit count out of range for dense gates");
  if (qubit < 0 || qubit >= n) throw std::invalid_argument("qubit index out of range");
  return 1L << (n - 1 - qubit);  // qubit 0 is the most significant bit
}

}  // namespace detail

/// CNOT on an n-qubit register: flips `target` iff `control` is 1.
inline Unitary cnot(int control, int target, int n) {
  if (control == target) throw std::invalid_argument("cnot: control equals target");
  const long cmask = detail::qubit_mask(control, n);
  const long tmask = detail::qubit_mask(target, n);
  const long dim = 1L << n;
  CMat m = CMat::Zero(dim, dim);
  for (long idx = 0; idx < dim; ++idx) {
    m((idx & cmask) ? (idx ^ tmask) : idx, idx) = 1.0;
  }
  return Unitary(std::move(m));
}

/// Acts as `u` on the target qubit and as identity on the other n−1 wires.
inline Unitary embed_single_qubit(const Unitary& u, int target, int n) {
  if (u.dim() != 2) throw std::invalid_argument("embed_single_qubit: gate must be 2x2");
  const long tmask = detail::qubit_mask(target, n);
  const long dim = 1L << n;
  CMat m = CMat::Zero(dim, dim);
  for (long idx = 0; idx < dim; ++idx) {
    if (idx & tmask) continue;
    const long i0 = idx, i1 = idx | tmask;
    m(i0, i0) = u.entry(0, 0);
    m(i0, i1) = u.entry(0, 1);
    m(i1, i0) = u.entry(1, 0);
    m(i1, i1) = u.entry(1, 1);
  }
  return Unitary(std::move(m));
}

/// θ3(q3)·θ2(q2)·θ1(q1) — the gate the triple compiles to.
inline Unitary rebuild_su2(const AngleTriple& t) {
  return theta_gate(3, t.q3.value) * theta_gate(2, t.q2.value) * theta_gate(1, t.q1.value);
}

/// Decomposes a 2×2 unitary into three rotation angles so that
/// rebuild_su2(result) equals the input up to a global phase.
///
/// The determinant phase is stripped first and the angles are extracted from
/// the special-unitary representative v = θ3·θ2·θ1:
///   2·v00·conj(v01)    = sin(2β) − i·sin(2α)cos(2β)
///   |v00|² − |v01|²    = cos(2α)cos(2β)
/// with α = 2πq1, β = 2πq2, picking cos(2β) ≥ 0. At gimbal lock
/// (cos(2β) = 0 — the middle rotation is a quarter turn) the split between
/// q1 and q3 is free; the tie-break fixes q1 = 0. The output is canonical:
/// q1, q2 ∈ [0,1) and q3 ∈ [0,1/2) — the ± sign of the representative only
/// moves q3 by 1/2, so restricting it makes the triple unique.
inline AngleTriple compile_su2(const Unitary& target) {
  if (target.dim() != 2) throw std::invalid_argument("compile_su2: gate must be 2x2");
  const CMat& m = target.matrix();
  const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const CMat v = m * std::exp(Complex(0, -0.5 * std::arg(det)));

  const Complex v00 = v(0, 0), v01 = v(0, 1);
  const Complex x = 2.0 * v00 * std::conj(v01);
  const double d = std::norm(v00) - std::norm(v01);

  const double cos2b = std::hypot(d, x.imag());
  const double two_b = std::atan2(x.real(), cos2b);
  double two_a = 0.0;  // gimbal lock: q1 = 0
  if (cos2b >= 1e-13) {
    // + 0.0 collapses a signed zero so the atan2 branch cut lands at +π and
    // exp(2πi/4 σ1)-like inputs compile to q1 = 1/4, not 3/4.
    two_a = std::atan2(-x.imag() + 0.0, d);
  }
  const double a = 0.5 * two_a, b = 0.5 * two_b;

  const Complex w00(std::cos(a) * std::cos(b), std::sin(a) * std::sin(b));
  const Complex w01(std::cos(a) * std::sin(b), std::sin(a) * std::cos(b));
  const Complex phase = std::abs(w00) >= std::abs(w01) ? v00 / w00 : v01 / w01;
  const double c = std::arg(phase);

  AngleTriple t{PhaseParameter::canonical(a / tau), PhaseParameter::canonical(b / tau),
                PhaseParameter::canonical(c / tau)};
  if (t.q3.value >= 0.5) t.q3.value -= 0.5;
  return t;
}

}  // namespace hqp
