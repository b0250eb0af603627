#include "hqp/random.hpp"
#include "hqp/state.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

namespace hqp {
namespace {

// Reference transform straight from the definition:
// out_p = (1/sqrt(M)) sum_j e^{-2pi i p j / M} in_j.
CVec dft_reference(const CVec& in) {
  const long m = in.size();
  CVec out = CVec::Zero(m);
  for (long p = 0; p < m; ++p) {
    for (long j = 0; j < m; ++j) {
      out(p) += std::polar(1.0 / std::sqrt(static_cast<double>(m)),
                           -tau * static_cast<double>(p * j) / static_cast<double>(m)) *
                in(j);
    }
  }
  return out;
}

TEST(StateVector, ConstructionValidatesShapeRolesAndNorm) {
  CVec v(4);
  v << 0.5, 0.5, 0.5, 0.5;
  const std::vector<FactorRole> qq{FactorRole::DataQubit, FactorRole::DataQubit};
  EXPECT_NO_THROW(StateVector(v, {2, 2}, qq));
  EXPECT_NO_THROW(StateVector(v, {4}, {FactorRole::ProgramContinuous}));
  EXPECT_THROW(StateVector(v, {3}, {FactorRole::DataQubit}), std::invalid_argument);
  EXPECT_THROW(StateVector(v, {2, 2}, {FactorRole::DataQubit}), std::invalid_argument);
  EXPECT_THROW(StateVector(2.0 * v, {2, 2}, qq), std::invalid_argument);
  EXPECT_THROW(StateVector(CVec(), {}, {}), std::invalid_argument);
}

TEST(StateVector, NormalizedFactoryRescalesAndRejectsZero) {
  CVec v(2);
  v << 3.0, 4.0;
  const StateVector s = StateVector::normalized(v, {2}, {FactorRole::DataQubit});
  EXPECT_NEAR(std::abs(s.amplitude(0)), 0.6, 1e-15);
  EXPECT_NEAR(std::abs(s.amplitude(1)), 0.8, 1e-15);
  EXPECT_THROW(StateVector::normalized(CVec::Zero(2), {2}, {FactorRole::DataQubit}),
               std::invalid_argument);
}

TEST(StateVector, QubitBasisPutsQubitZeroInTheTopBit) {
  const StateVector s = StateVector::qubit_basis(2, 0b10);
  EXPECT_EQ(s.dim(), 4);
  EXPECT_DOUBLE_EQ(std::abs(s.amplitude(2)), 1.0);
  EXPECT_THROW(StateVector::basis({2, 2}, {FactorRole::DataQubit, FactorRole::DataQubit}, 4),
               std::out_of_range);
}

TEST(TensorProduct, LeftFactorVariesSlower) {
  const StateVector a = StateVector::basis({2}, {FactorRole::ProgramDiscrete}, 1);
  const StateVector b = StateVector::basis({3}, {FactorRole::ProgramContinuous}, 0);
  const StateVector ab = tensor_product(a, b);
  ASSERT_EQ(ab.dim(), 6);
  EXPECT_DOUBLE_EQ(std::abs(ab.amplitude(1 * 3 + 0)), 1.0);  // index = left*3 + right
  EXPECT_EQ(ab.dims(), (std::vector<long>{2, 3}));
  EXPECT_EQ(ab.roles()[0], FactorRole::ProgramDiscrete);
}

TEST(TensorProduct, IsLinearAndNormPreserving) {
  CVec plus(2);
  plus << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  const StateVector left(plus, {2}, {FactorRole::DataQubit});
  const StateVector prod = tensor_product(left, StateVector::qubit_basis(1, 0));
  EXPECT_NEAR(std::abs(prod.amplitude(0)), 1.0 / std::numbers::sqrt2, 1e-15);  // |00>
  EXPECT_NEAR(std::abs(prod.amplitude(2)), 1.0 / std::numbers::sqrt2, 1e-15);  // |10>
  EXPECT_LE(std::abs(prod.amplitude(1)) + std::abs(prod.amplitude(3)), 0.0);

  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 50; ++rep) {
    const StateVector a(random_state(3, rng), {3}, {FactorRole::ProgramContinuous});
    const StateVector b(random_state(4, rng), {4}, {FactorRole::ProgramContinuous});
    EXPECT_NEAR(tensor_product(a, b).norm(), 1.0, 1e-12);
  }
}

TEST(Dft, UniformAndPointStatesExchange) {
  const long m = 8;
  const StateVector uniform(CVec::Constant(m, 1.0 / std::sqrt(static_cast<double>(m))), {m},
                            {FactorRole::ProgramContinuous});
  const StateVector zero_momentum = dft(uniform);
  EXPECT_NEAR(std::abs(zero_momentum.amplitude(0)), 1.0, 1e-12);

  const StateVector grid_origin =
      StateVector::basis({m}, {FactorRole::ProgramContinuous}, 0);
  const CVec spread = dft(grid_origin).amplitudes();
  for (long p = 0; p < m; ++p) {
    EXPECT_NEAR(std::abs(spread(p) - Complex(1.0 / std::sqrt(static_cast<double>(m)))), 0.0,
                1e-12);
  }
}

TEST(IndexHelpers, RavelUnravelRoundTrip) {
  const std::vector<long> dims{3, 2, 4};
  for (long flat = 0; flat < 24; ++flat) {
    const std::vector<long> digits = unravel_index(flat, dims);
    EXPECT_EQ(ravel_index(digits, dims), flat);
  }
  EXPECT_EQ(unravel_index(23, dims), (std::vector<long>{2, 1, 3}));
}

TEST(Unitary, ConstructionRejectsNonUnitaryWithMeasuredDefect) {
  CMat bad = CMat::Identity(2, 2);
  bad(0, 0) = 1.1;
  try {
    Unitary u(bad);
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("0.2"), std::string::npos);  // |1.21 - 1|
  }
  EXPECT_NO_THROW(Unitary::identity(5));
}

TEST(Unitary, AdjointAndProductStayUnitary) {
  std::mt19937_64 rng(7);
  const Unitary u(random_unitary(4, rng));
  const Unitary v(random_unitary(4, rng));
  EXPECT_LE(max_abs(CMat((u.adjoint() * u).matrix() - CMat::Identity(4, 4))), 1e-12);
  EXPECT_LE(unitarity_defect((u * v).matrix()), 1e-12);
  EXPECT_THROW(u * Unitary::identity(3), std::invalid_argument);
}

TEST(Dft, MatchesDirectSummationOracle) {
  std::mt19937_64 rng(11);
  for (long m : {1L, 2L, 3L, 5L, 8L, 16L}) {
    const CVec in = random_state(m, rng);
    const StateVector s(in, {m}, {FactorRole::ProgramContinuous});
    EXPECT_LE(max_abs(CVec(dft(s).amplitudes() - dft_reference(in))), 1e-12) << "M=" << m;
  }
}

TEST(Dft, MomentumGridStateTransformsToMomentumBasisState) {
  // Grid coefficients e^{2pi i p j / M}/sqrt(M) are exactly the momentum-p
  // eigvector of the transform: dft sends them to the basis vector |p>.
  const long m = 8;
  for (long p = 0; p < m; ++p) {
    CVec grid(m);
    for (long j = 0; j < m; ++j) {
      grid(j) = std::polar(1.0 / std::sqrt(static_cast<double>(m)),
                           tau * static_cast<double>(p * j) / static_cast<double>(m));
    }
    const StateVector s(grid, {m}, {FactorRole::ProgramContinuous});
    CVec expected = CVec::Zero(m);
    expected(p) = 1.0;
    EXPECT_LE(max_abs(CVec(dft(s).amplitudes() - expected)), 1e-12);
  }
}

TEST(Dft, RoundTripsOnEveryFactorOfAComposite) {
  std::mt19937_64 rng(13);
  const StateVector s(random_state(2 * 5 * 3, rng), {2, 5, 3},
                      {FactorRole::DataQubit, FactorRole::ProgramContinuous,
                       FactorRole::ProgramContinuous});
  for (std::size_t f = 0; f < 3; ++f) {
    EXPECT_LE(max_abs(CVec(inverse_dft(dft(s, f), f).amplitudes() - s.amplitudes())), 1e-12);
  }
  EXPECT_THROW(dft(s, 3), std::out_of_range);
}

TEST(Dft, SingleFactorTransformEqualsMatrixProduct) {
  // Acting on the middle factor must equal (I (x) F (x) I) on the flat vector.
  std::mt19937_64 rng(17);
  const std::vector<long> dims{2, 4, 3};
  const CVec in = random_state(24, rng);
  const StateVector s(in, dims,
                      {FactorRole::DataQubit, FactorRole::ProgramContinuous,
                       FactorRole::ProgramContinuous});
  const CMat f = dft_matrix(4);
  CVec expected = CVec::Zero(24);
  for (long a = 0; a < 2; ++a) {
    for (long p = 0; p < 4; ++p) {
      for (long j = 0; j < 4; ++j) {
        for (long c = 0; c < 3; ++c) {
          expected(a * 12 + p * 3 + c) += f(p, j) * in(a * 12 + j * 3 + c);
        }
      }
    }
  }
  EXPECT_LE(max_abs(CVec(dft(s, 1).amplitudes() - expected)), 1e-12);
}

TEST(Schmidt, ProductStateHasRankOne) {
  std::mt19937_64 rng(19);
  const StateVector left(random_state(4, rng), {4}, {FactorRole::ProgramContinuous});
  const StateVector right(random_state(2, rng), {2}, {FactorRole::DataQubit});
  const std::vector<double> cs = schmidt_coefficients(tensor_product(left, right),
                                                      BipartiteCut({0}, 2));
  EXPECT_NEAR(cs.front(), 1.0, 1e-12);
  EXPECT_EQ(schmidt_rank(cs), 1);
}

TEST(Schmidt, MaximallyEntangledPairSplitsEvenly) {
  CVec bell = CVec::Zero(4);
  bell(0) = bell(3) = 1.0 / std::numbers::sqrt2;
  const StateVector s(bell, {2, 2}, {FactorRole::DataQubit, FactorRole::DataQubit});
  const std::vector<double> cs = schmidt_coefficients(s, BipartiteCut({0}, 2));
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_NEAR(cs[0], 1.0 / std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(cs[1], 1.0 / std::numbers::sqrt2, 1e-12);
  EXPECT_EQ(schmidt_rank(cs), 2);
}

TEST(Schmidt, MatchesReducedDensityEigenvalueOracle) {
  // Independent route: singular values equal the square roots of the
  // eigenvalues of the left-side reduced density matrix.
  std::mt19937_64 rng(23);
  const std::vector<long> dims{3, 2, 2};
  const StateVector s(random_state(12, rng), dims,
                      {FactorRole::ProgramContinuous, FactorRole::DataQubit,
                       FactorRole::DataQubit});
  const BipartiteCut cut({0, 2}, 3);  // non-contiguous left side
  CMat coeff(6, 2);
  for (long flat = 0; flat < 12; ++flat) {
    const std::vector<long> d = unravel_index(flat, dims);
    coeff(d[0] * 2 + d[2], d[1]) = s.amplitude(flat);
  }
  const CMat rho = coeff * coeff.adjoint();
  Eigen::SelfAdjointEigenSolver<CMat> eig(rho);
  std::vector<double> expected;
  for (long i = 0; i < eig.eigenvalues().size(); ++i) {
    expected.push_back(std::sqrt(std::max(0.0, eig.eigenvalues()(i))));
  }
  std::sort(expected.begin(), expected.end(), std::greater<>());
  std::vector<double> got = schmidt_coefficients(s, cut);
  got.resize(expected.size(), 0.0);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(got[i], expected[i], 1e-10);
}

TEST(Schmidt, CutValidation) {
  EXPECT_THROW(BipartiteCut({}, 2), std::invalid_argument);
  EXPECT_THROW(BipartiteCut({0, 1}, 2), std::invalid_argument);
  EXPECT_THROW(BipartiteCut({2}, 2), std::invalid_argument);
  const BipartiteCut cut({1}, 3);
  EXPECT_EQ(cut.left(), (std::vector<std::size_t>{1}));
  EXPECT_EQ(cut.right(), (std::vector<std::size_t>{0, 2}));
}

TEST(CommutatorDefect, TraceVanishesWhileIdentityTraceIsD) {
  for (long d : {2L, 4L, 8L, 16L, 32L, 64L}) {
    const CommutatorDefect c = commutator_defect(d);
    EXPECT_LE(std::abs(c.trace_of_commutator), 1e-10 * static_cast<double>(d)) << "D=" << d;
    EXPECT_DOUBLE_EQ(c.trace_of_identity, static_cast<double>(d));
    EXPECT_GE(c.max_deviation_from_identity, 0.5) << "D=" << d;
  }
  EXPECT_THROW(commutator_defect(1), std::invalid_argument);
}

TEST(PhaseAlignedDistance, VanishesExactlyUnderGlobalPhase) {
  std::mt19937_64 rng(29);
  const CMat u = random_unitary(3, rng);
  const CMat rotated = std::polar(1.0, 1.234) * u;
  EXPECT_LE(phase_aligned_distance(rotated, u), 1e-12);
  CMat flip = CMat::Zero(2, 2);
  flip(0, 1) = flip(1, 0) = 1.0;
  EXPECT_GE(phase_aligned_distance(flip, CMat::Identity(2, 2)), 0.9);
  const CVec v = random_state(5, rng);
  EXPECT_LE(phase_aligned_distance(CVec(std::polar(1.0, -2.1) * v), v), 1e-12);
}

TEST(RandomSamplers, ProduceValidStatesAndUnitaries) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    EXPECT_NEAR(random_state(7, rng).norm(), 1.0, 1e-12);
    EXPECT_LE(unitarity_defect(random_unitary(6, rng)), 1e-12);
    const CMat s = random_su2(rng);
    EXPECT_LE(unitarity_defect(s), 1e-12);
    EXPECT_LE(std::abs(s.determinant() - Complex(1.0)), 1e-12);
  }
  EXPECT_NE(split_seed(1, 0), split_seed(1, 1));
  EXPECT_NE(split_seed(1, 0), split_seed(2, 0));
}

}  // namespace
}  // namespace hqp
