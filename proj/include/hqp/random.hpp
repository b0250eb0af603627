// Seeded random sampling: Haar-distributed unitaries and random state vectors.
#pragma once

#include "hqp/core.hpp"

#include <cstdint>
#include <random>

namespace hqp {

/// Stateless seed mixer; gives independent per-trial streams from (seed, index).
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Haar-random SU(2): normalized quaternion → [[a+bi, c+di], [−c+di, a−bi]].
inline CMat random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  double a = gauss(rng), b = gauss(rng), c = gauss(rng), d = gauss(rng);
  const double n = std::sqrt(a * a + b * b + c * c + d * d);
  a /= n;
  b /= n;
  c /= n;
  d /= n;
  CMat u(2, 2);
  u << Complex(a, b), Complex(c, d), Complex(-c, d), Complex(a, -b);
  return u;
}

/// Haar-random U(n): QR of a complex Ginibre matrix with phase-fixed R diagonal.
inline CMat random_unitary(long n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CMat g(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long j = 0; j < n; ++j) {
    const Complex rjj = r(j, j);
    q.col(j) *= std::abs(rjj) < 1e-300 ? Complex(1, 0) : rjj / std::abs(rjj);
  }
  return q;
}

/// Random normalized complex vector (Gaussian direction).
inline CVec random_state(long n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CVec v(n);
  for (long i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v / v.norm();
}

}  // namespace hqp
