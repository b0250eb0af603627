// Runtime verification suite: every library module invariant as one named,
// self-contained check. The CLI `verify` command prints one line per result;
// fault injection perturbs a θ-gate entry so the unitarity line (and only
// that line) goes red, proving the harness can fail.
#pragma once

#include "hqp/core.hpp"
#include "hqp/gates.hpp"
#include "hqp/processor.hpp"
#include "hqp/random.hpp"
#include "hqp/state.hpp"
#include "hqp/stochastic.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace hqp {

struct InvariantResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;  // worst deviation unless detail says otherwise
  double threshold = 0.0;
  std::string detail;
};

struct VerifyOptions {
  bool fault_inject = false;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::mt19937_64 check_rng(const VerifyOptions& opts, std::uint64_t check_tag) {
  return std::mt19937_64(split_seed(opts.seed, check_tag));
}

inline InvariantResult check_qstate_type_invariants(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 1);
  double worst = 0.0;
  for (long m : {2L, 5L, 8L, 16L}) {
    StateVector s(random_state(m, rng), {m}, {FactorRole::ProgramContinuous});
    worst = std::max(worst, std::abs(s.norm() - 1.0));
    worst = std::max(worst, std::abs(dft(s).norm() - 1.0));
    worst = std::max(worst, std::abs(inverse_dft(s).norm() - 1.0));
  }
  {
    std::vector<long> d4{4};
    StateVector a(random_state(4, rng), d4, {FactorRole::ProgramContinuous});
    StateVector b(random_state(2, rng), {2}, {FactorRole::DataQubit});
    worst = std::max(worst, std::abs(tensor_product(a, b).norm() - 1.0));
  }
  worst = std::max(worst, unitarity_defect(dft_matrix(8)));
  worst = std::max(worst, unitarity_defect(random_unitary(5, rng)));
  worst = std::max(worst, unitarity_defect(Unitary(random_su2(rng)).matrix()));
  {
    StateVector joint(random_state(32, rng), {4, 2, 2, 2},
                      {FactorRole::ProgramContinuous, FactorRole::DataQubit,
                       FactorRole::DataQubit, FactorRole::DataQubit});
    const std::vector<double> cs = schmidt_coefficients(joint, BipartiteCut({0}, 4));
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (cs[i] < 0.0) worst = std::max(worst, -cs[i]);
      if (i > 0 && cs[i] > cs[i - 1]) worst = std::max(worst, cs[i] - cs[i - 1]);
      sum_sq += cs[i] * cs[i];
    }
    worst = std::max(worst, std::abs(sum_sq - 1.0));
  }
  return {"qstate.op_outputs_satisfy_type_invariants", worst <= tol::invariant, worst,
          tol::invariant, "norms, unitarity, and Schmidt-spectrum shape across all ops"};
}

inline InvariantResult check_dft_roundtrip(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 2);
  double worst = 0.0;
  for (long m = 2; m <= 64; ++m) {
    StateVector s(random_state(m, rng), {m}, {FactorRole::ProgramContinuous});
    worst = std::max(worst, max_abs(CVec(inverse_dft(dft(s)).amplitudes() - s.amplitudes())));
  }
  // Non-leading factor exercises the strided transform path.
  StateVector joint(random_state(3 * 16 * 2, rng), {3, 16, 2},
                    {FactorRole::ProgramDiscrete, FactorRole::ProgramContinuous,
                     FactorRole::DataQubit});
  worst = std::max(
      worst, max_abs(CVec(inverse_dft(dft(joint, 1), 1).amplitudes() - joint.amplitudes())));
  return {"qstate.dft_roundtrip", worst <= tol::identity, worst, tol::identity,
          "inverse_dft(dft(s)) = s for every M in 2..64"};
}

inline InvariantResult check_schmidt_local_unitary_invariance(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 3);
  double worst = 0.0;
  const StateVector s(random_state(16, rng), {4, 2, 2},
                      {FactorRole::ProgramContinuous, FactorRole::DataQubit,
                       FactorRole::DataQubit});
  const BipartiteCut cut({0}, 3);
  std::vector<double> base = schmidt_coefficients(s, cut);
  std::sort(base.begin(), base.end());
  for (int rep = 0; rep < 20; ++rep) {
    StateVector t = detail::apply_matrix_to_factor(s, 0, random_unitary(4, rng));
    t = detail::apply_matrix_to_factor(t, 1, random_unitary(2, rng));
    t = detail::apply_matrix_to_factor(t, 2, random_unitary(2, rng));
    std::vector<double> moved = schmidt_coefficients(t, cut);
    std::sort(moved.begin(), moved.end());
    for (std::size_t i = 0; i < base.size(); ++i) {
      worst = std::max(worst, std::abs(moved[i] - base[i]));
    }
  }
  return {"qstate.schmidt_local_unitary_invariance", worst <= tol::invariant, worst,
          tol::invariant, "coefficient multiset fixed under 20 random local rotations"};
}

inline InvariantResult check_commutator_trace(const VerifyOptions&) {
  double worst_ratio = 0.0;
  double min_deviation = 1e300;
  for (long d = 2; d <= 64; ++d) {
    const CommutatorDefect c = commutator_defect(d);
    worst_ratio = std::max(worst_ratio,
                           std::abs(c.trace_of_commutator) / static_cast<double>(d));
    min_deviation = std::min(min_deviation, c.max_deviation_from_identity);
  }
  std::ostringstream detail;
  detail << "i*tr[P,Q]/D for D in 2..64; i[P,Q] stays far from I (min deviation "
         << min_deviation << ")";
  return {"qstate.commutator_trace_vanishes", worst_ratio <= tol::invariant, worst_ratio,
          tol::invariant, detail.str()};
}

inline InvariantResult check_theta_group_law(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int axis = 1; axis <= 3; ++axis) {
    worst = std::max(worst, max_abs(CMat(theta_gate(axis, 0.0).matrix() - CMat::Identity(2, 2))));
    for (int rep = 0; rep < 100; ++rep) {
      const double q = unit(rng), r = unit(rng);
      const CMat lhs = theta_gate(axis, q).matrix() * theta_gate(axis, r).matrix();
      const CMat rhs = theta_gate(axis, canonical_phase_parameter(q + r)).matrix();
      worst = std::max(worst, max_abs(CMat(lhs - rhs)));
      worst = std::max(
          worst, max_abs(CMat(theta_gate(axis, q + 1.0).matrix() - theta_gate(axis, q).matrix())));
    }
  }
  return {"gates.theta_group_law", worst <= tol::identity, worst, tol::identity,
          "theta_k(q)theta_k(r) = theta_k(q+r mod 1), period 1, 100 pairs per axis"};
}

inline InvariantResult check_theta_unitary_det1(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int axis = 1; axis <= 3; ++axis) {
    for (int rep = 0; rep < 50; ++rep) {
      CMat g = theta_gate(axis, unit(rng)).matrix();
      if (opts.fault_inject && axis == 2 && rep == 0) g(0, 0) += 1e-3;
      worst = std::max(worst, unitarity_defect(g));
      worst = std::max(worst, std::abs(g.determinant() - Complex(1.0)));
    }
  }
  std::string detail = "unitarity defect and |det - 1| over sampled parameters";
  if (opts.fault_inject) detail += " [fault injected: one entry perturbed by 1e-3]";
  return {"gates.theta_unitary_det1", worst <= tol::identity, worst, tol::identity, detail};
}

inline InvariantResult check_compile_su2_roundtrip(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  auto roundtrip = [&](const Unitary& v) {
    const AngleTriple t = compile_su2(v);
    worst = std::max(worst, phase_aligned_distance(rebuild_su2(t).matrix(), v.matrix()));
  };
  for (int rep = 0; rep < 100; ++rep) roundtrip(Unitary(random_su2(rng)));
  // Middle angle within 1e-6 (in q units: 1e-6 / 2pi) of the degenerate locus.
  for (double base : {0.125, 0.375, 0.625, 0.875}) {
    for (double off : {0.0, 1e-6 / tau, -1e-6 / tau, 1e-9 / tau}) {
      roundtrip(rebuild_su2(AngleTriple{{unit(rng)}, {base + off}, {unit(rng)}}));
    }
  }
  return {"gates.compile_su2_roundtrip", worst <= tol::invariant, worst, tol::invariant,
          "rebuild matches target up to global phase, incl. near-gimbal-lock inputs"};
}

inline InvariantResult check_permutation_pattern(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 8);
  double worst = 0.0;
  constexpr std::array<std::array<int, 3>, 5> wirings{
      {{0, 1, 2}, {1, 0, 2}, {0, 2, 3}, {2, 0, 3}, {1, 2, 3}}};
  for (const auto& [c, t, n] : wirings) {
    const CMat g = cnot(c, t, n).matrix();
    const long dim = g.rows();
    for (long row = 0; row < dim; ++row) {
      for (long col = 0; col < dim; ++col) {
        const double expected =
            (row == (((col >> (n - 1 - c)) & 1) ? col ^ (1L << (n - 1 - t)) : col)) ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(g(row, col) - expected));
      }
    }
    worst = std::max(worst, max_abs(CMat(g * g - CMat::Identity(dim, dim))));
  }
  // Embedded single-qubit gates are exact block patterns: u's entries where
  // the spectator bits agree, exact zeros elsewhere.
  const Unitary u(random_su2(rng));
  for (int target = 0; target < 3; ++target) {
    const CMat g = embed_single_qubit(u, target, 3).matrix();
    const long mask = 1L << (2 - target);
    for (long row = 0; row < 8; ++row) {
      for (long col = 0; col < 8; ++col) {
        const Complex expected = ((row & ~mask) == (col & ~mask))
                                     ? u.matrix()((row & mask) ? 1 : 0, (col & mask) ? 1 : 0)
                                     : Complex(0.0);
        worst = std::max(worst, std::abs(g(row, col) - expected));
      }
    }
  }
  return {"gates.permutation_pattern_exact", worst <= tol::pattern, worst, tol::pattern,
          "cnot is an exact 0/1 involution; embeddings are exact block patterns"};
}

inline InvariantResult check_basis_program_purity(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 9);
  double worst = 0.0;
  const long m = 5;
  std::vector<Unitary> blocks;
  for (long p = 0; p < m; ++p) blocks.emplace_back(random_unitary(4, rng));
  const ConditionalUnitary cond = build_conditional(blocks);
  for (long p = 0; p < m; ++p) {
    const StateVector program =
        StateVector::basis({m}, {FactorRole::ProgramContinuous}, p);
    const StateVector data = tensor_product(
        StateVector(random_state(2, rng), {2}, {FactorRole::DataQubit}),
        StateVector(random_state(2, rng), {2}, {FactorRole::DataQubit}));
    const StateVector out = apply_processor(cond, program, data);
    CVec expected = CVec::Zero(m * 4);
    expected.segment(p * 4, 4) = blocks[static_cast<std::size_t>(p)].matrix() * data.amplitudes();
    worst = std::max(worst, max_abs(CVec(out.amplitudes() - expected)));
    const std::vector<double> cs = schmidt_coefficients(out, BipartiteCut({0}, 3));
    worst = std::max(worst, std::abs(cs.front() - 1.0));
    if (schmidt_rank(cs) != 1) worst = std::max(worst, 1.0);
  }
  return {"processor.basis_program_purity", worst <= tol::invariant, worst, tol::invariant,
          "basis programs act as |P> tensor u_P|D>, Schmidt rank 1 across the cut"};
}

inline InvariantResult check_program_orthogonality(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 10);
  const long m = 4, n = 2;
  std::vector<Unitary> blocks;
  for (long p = 0; p < m; ++p) blocks.emplace_back(random_unitary(n, rng));
  const ConditionalUnitary cond = build_conditional(blocks);
  double worst = 0.0;
  for (long p = 0; p < m; ++p) {
    for (long q = p + 1; q < m; ++q) {
      const StateVector out_p = apply_processor(
          cond, StateVector::basis({m}, {FactorRole::ProgramContinuous}, p),
          StateVector(random_state(n, rng), {2}, {FactorRole::DataQubit}));
      const StateVector out_q = apply_processor(
          cond, StateVector::basis({m}, {FactorRole::ProgramContinuous}, q),
          StateVector(random_state(n, rng), {2}, {FactorRole::DataQubit}));
      worst = std::max(worst, std::abs(out_p.amplitudes().dot(out_q.amplitudes())));
    }
  }
  // Counterexample direction: non-orthogonal programs with distinct gates
  // cannot come from any joint unitary — inner products would have to move.
  double violation = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const CMat u = random_unitary(n, rng), v = random_unitary(n, rng);
    const CVec s = random_state(n, rng), t = random_state(n, rng);
    violation = std::max(
        violation, std::abs(s.dot(t) - CVec(u * s).dot(CVec(v * t))));
  }
  std::ostringstream detail;
  detail << "orthogonal programs stay orthogonal; inner-product shift " << violation
         << " (>= 0.01 required) witnesses why overlapping programs are impossible";
  return {"processor.program_orthogonality",
          worst <= tol::pattern && violation >= 0.01, worst, tol::pattern, detail.str()};
}

inline InvariantResult check_momentum_position_equivalence(const VerifyOptions&) {
  double worst = 0.0;
  for (long m : {2L, 4L, 8L}) {
    for (int axis = 1; axis <= 3; ++axis) {
      const GateFamily family = GateFamily::theta(ConditioningBasis::Momentum, axis, m);
      const CMat lib = momentum_processor(family, m).assemble_in_grid_basis();
      // Direct grid-basis formula: entry block (j', j) is
      // (1/M) Σ_p e^{2πi p (j'−j)/M} u_(p).
      CMat oracle = CMat::Zero(2 * m, 2 * m);
      for (long jr = 0; jr < m; ++jr) {
        for (long jc = 0; jc < m; ++jc) {
          for (long sr = 0; sr < 2; ++sr) {
            for (long sc = 0; sc < 2; ++sc) {
              Complex acc = 0.0;
              for (long p = 0; p < m; ++p) {
                const long k = ((jr - jc) * p % m + m) % m;
                acc += std::polar(1.0, tau * static_cast<double>(k) / static_cast<double>(m)) *
                       family[p].matrix()(sr, sc);
              }
              oracle(2 * jr + sr, 2 * jc + sc) = acc / static_cast<double>(m);
            }
          }
        }
      }
      worst = std::max(worst, max_abs(CMat(lib - oracle)));
    }
  }
  return {"processor.momentum_position_equivalence", worst <= tol::identity, worst, tol::identity,
          "dft-conjugated momentum processor matches the direct grid-basis formula"};
}

inline InvariantResult check_network_matches_sequence(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 12);
  const long m = 8;
  std::uniform_int_distribution<long> pval(0, m - 1);
  std::uniform_int_distribution<int> bit(0, 1);
  double worst = 0.0;

  std::vector<NetworkSpec> specs;
  specs.push_back(NetworkSpec::canonical(2));
  specs.push_back(NetworkSpec::canonical(3));
  specs.push_back(NetworkSpec(
      3, {RotationSlot{0, {0, 1, 2}}, RotationSlot{2, {3, 4, 5}}, TwoQubitSlot{6, 0, 2},
          RotationSlot{1, {7, 8, 9}}, TwoQubitSlot{10, 2, 1}, TwoQubitSlot{11, 0, 1}}));

  for (const NetworkSpec& spec : specs) {
    const int n = spec.data_qubits();
    ProgramAssignment assignment;
    std::vector<long> values(static_cast<std::size_t>(spec.factor_count()));
    for (int id = 0; id < spec.factor_count(); ++id) {
      const long v = spec.factor_role(id) == FactorRole::ProgramContinuous
                         ? pval(rng)
                         : static_cast<long>(bit(rng));
      values[static_cast<std::size_t>(id)] = v;
      assignment.set_basis(id, v);
    }
    CMat oracle = CMat::Identity(1L << n, 1L << n);
    for (const NetworkSlot& slot : spec.slots()) {
      if (const auto* r = std::get_if<RotationSlot>(&slot)) {
        CMat g = CMat::Identity(2, 2);
        for (int axis = 1; axis <= 3; ++axis) {
          const long p = values[static_cast<std::size_t>(r->vars[axis - 1])];
          g = theta_gate(axis, static_cast<double>(p) / static_cast<double>(m)).matrix() * g;
        }
        oracle = embed_single_qubit(Unitary(g), r->qubit, n).matrix() * oracle;
      } else {
        const auto& t = std::get<TwoQubitSlot>(slot);
        if (values[static_cast<std::size_t>(t.control_bit)] == 1) {
          oracle = cnot(t.control, t.target, n).matrix() * oracle;
        }
      }
    }
    const StateVector data(random_state(1L << n, rng), std::vector<long>(n, 2),
                           std::vector<FactorRole>(n, FactorRole::DataQubit));
    const NetworkRun run = run_network(spec, assignment, data, m);
    worst = std::max(worst, max_abs(CVec(run.state.amplitudes() - CVec(oracle * data.amplitudes()))));
    worst = std::max(worst, max_abs(CMat(run.data_unitary->matrix() - oracle)));
  }
  return {"processor.network_matches_gate_sequence", worst <= tol::identity, worst, tol::identity,
          "pinned networks equal the explicitly multiplied gate sequence"};
}

inline InvariantResult check_network_linearity(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 13);
  double worst = 0.0;
  {
    // Continuous factor superposed on a one-qubit rotation network.
    const long m = 4;
    const NetworkSpec spec = NetworkSpec::canonical(1);
    const StateVector data(random_state(2, rng), {2}, {FactorRole::DataQubit});
    const CVec coeff = random_state(m, rng);
    ProgramAssignment mixed;
    mixed.set_basis(0, 1).set_amplitudes(1, coeff).set_basis(2, 3);
    const StateVector joint = materialize_joint(run_network(spec, mixed, data, m));
    CVec expected = CVec::Zero(joint.dim());
    for (long p = 0; p < m; ++p) {
      ProgramAssignment pinned;
      pinned.set_basis(0, 1).set_basis(1, p).set_basis(2, 3);
      expected += coeff(p) *
                  materialize_joint(run_network(spec, pinned, data, m)).amplitudes();
    }
    worst = std::max(worst, max_abs(CVec(joint.amplitudes() - expected)));
  }
  {
    // Discrete control bit superposed on a two-qubit network.
    const long m = 2;
    const NetworkSpec spec = NetworkSpec::canonical(2);
    const StateVector data(random_state(4, rng), {2, 2},
                           {FactorRole::DataQubit, FactorRole::DataQubit});
    const CVec coeff = random_state(2, rng);
    ProgramAssignment mixed;
    for (int id = 0; id < 6; ++id) mixed.set_basis(id, id % m);
    mixed.set_amplitudes(6, coeff);
    const StateVector joint = materialize_joint(run_network(spec, mixed, data, m));
    CVec expected = CVec::Zero(joint.dim());
    for (long b = 0; b < 2; ++b) {
      ProgramAssignment pinned;
      for (int id = 0; id < 6; ++id) pinned.set_basis(id, id % m);
      pinned.set_basis(6, b);
      expected += coeff(b) *
                  materialize_joint(run_network(spec, pinned, data, m)).amplitudes();
    }
    worst = std::max(worst, max_abs(CVec(joint.amplitudes() - expected)));
  }
  return {"processor.network_linearity", worst <= tol::identity, worst, tol::identity,
          "superposed programs equal amplitude-weighted pinned runs"};
}

inline InvariantResult check_phi_closed_form(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 14);
  std::uniform_real_distribution<double> angle(-8.0, 8.0);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const double alpha = angle(rng);
    for (int m = 1; m <= 8; ++m) {
      StateVector product = phi_single(alpha);
      for (int k = 1; k < m; ++k) {
        product = tensor_product(product, phi_single(std::ldexp(alpha, k)));
      }
      worst = std::max(
          worst, max_abs(CVec(phi_state(alpha, m).amplitudes() - product.amplitudes())));
    }
  }
  return {"stochastic.phi_closed_form", worst <= tol::identity, worst, tol::identity,
          "inverted-binary closed form equals the explicit stage product, m <= 8"};
}

inline InvariantResult check_momentum_basis_equivalence(const VerifyOptions&) {
  double worst = 0.0;
  for (int m = 1; m <= 8; ++m) {
    const long dim = 1L << m;
    for (long p = 0; p < dim; ++p) {
      const double alpha = -tau * static_cast<double>(p) / static_cast<double>(dim);
      worst = std::max(worst, std::abs(std::abs(momentum_overlap(alpha, m, p)) - 1.0));
      if (m <= 6) {
        for (long q = 0; q < dim; ++q) {
          if (q == p) continue;
          worst = std::max(worst, std::abs(momentum_overlap(alpha, m, q)));
        }
      } else {
        for (long step : {1L, dim / 2, dim - 1}) {
          worst = std::max(worst, std::abs(momentum_overlap(alpha, m, (p + step) % dim)));
        }
      }
    }
  }
  return {"stochastic.momentum_basis_equivalence", worst <= tol::identity, worst, tol::identity,
          "phase programs at alpha = -2pi p/M are exactly the momentum basis"};
}

inline InvariantResult check_cascade_tree_probability(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 16);
  double worst = 0.0;
  for (int m = 1; m <= 12; ++m) {
    const double expected = 1.0 - std::ldexp(1.0, -m);
    worst = std::max(worst, std::abs(success_probability_exact(m) - expected));
    const StateVector probe(random_state(2, rng), {2}, {FactorRole::DataQubit});
    worst = std::max(worst, std::abs(success_probability_exact(m, 0.37 * m, probe) - expected));
  }
  return {"stochastic.cascade_tree_probability", worst <= tol::pattern, worst, tol::pattern,
          "outcome-tree success mass equals 1 - 2^-m for m <= 12"};
}

inline InvariantResult check_cascade_monte_carlo(const VerifyOptions& opts) {
  double worst_se = 0.0;
  for (int m = 1; m <= 3; ++m) {
    const MonteCarloEstimate est =
        monte_carlo_success(0.9, m, 100000, split_seed(opts.seed, 1700 + static_cast<std::uint64_t>(m)));
    const double p = 1.0 - std::ldexp(1.0, -m);
    worst_se = std::max(worst_se, std::abs(est.frequency - p) / est.std_error);
  }
  return {"stochastic.cascade_monte_carlo", worst_se <= 4.0, worst_se, 4.0,
          "empirical frequency within 4 standard errors over 1e5 seeded trials (units: SE)"};
}

inline InvariantResult check_success_branch_rotation(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 18);
  const double alpha = 0.9;
  double worst = 0.0;
  const StateVector data(random_state(2, rng), {2}, {FactorRole::DataQubit});
  for (int succeed_at = 0; succeed_at < 4; ++succeed_at) {
    std::vector<int> script(static_cast<std::size_t>(succeed_at), 1);
    script.push_back(0);
    const CascadeResult r = cascade(data, 0, alpha, 4, forced_bits(script));
    const CVec expected = phase_rotation(alpha).matrix() * data.amplitudes();
    worst = std::max(worst, phase_aligned_distance(r.final_state.amplitudes(), expected));
    if (!r.success || r.stages_used != succeed_at + 1) worst = std::max(worst, 1.0);
  }
  {
    const CascadeResult r = cascade(data, 0, alpha, 4, forced_bits({1, 1, 1, 1}));
    const CVec expected = phase_rotation(-15.0 * alpha).matrix() * data.amplitudes();
    worst = std::max(worst, phase_aligned_distance(r.final_state.amplitudes(), expected));
    if (r.success) worst = std::max(worst, 1.0);
  }
  {
    // Target inside a larger register.
    const StateVector wide(random_state(4, rng), {2, 2},
                           {FactorRole::DataQubit, FactorRole::DataQubit});
    const CascadeResult r = cascade(wide, 1, alpha, 3, forced_bits({1, 1, 0}));
    const CVec expected =
        embed_single_qubit(phase_rotation(alpha), 1, 2).matrix() * wide.amplitudes();
    worst = std::max(worst, phase_aligned_distance(r.final_state.amplitudes(), expected));
  }
  return {"stochastic.success_branch_rotation", worst <= tol::invariant, worst, tol::invariant,
          "every success branch applies R(alpha); the all-fail branch applies R(-(M-1)alpha)"};
}

inline InvariantResult check_overlap_symmetry_identity(const VerifyOptions& opts) {
  std::mt19937_64 rng = check_rng(opts, 19);
  std::uniform_real_distribution<double> angle(0.1, tau - 0.1);
  double worst = 0.0;
  double sharpest = 0.0;  // largest overlap seen between distinct phases
  for (int rep = 0; rep < 20; ++rep) {
    const double a = angle(rng);
    double b = angle(rng);
    if (std::abs(a - b) < 0.1) b = std::fmod(b + 1.0, tau);
    for (int m : {1, 4, 6}) {
      worst = std::max(worst, std::abs(overlap_decay(a, b, m) - overlap_decay(b, a, m)));
      worst = std::max(worst, std::abs(overlap_decay(a, a, m) - 1.0));
      worst = std::max(worst, std::abs(overlap_decay(a, a + tau, m) - 1.0));
      sharpest = std::max(sharpest, overlap_decay(a, b, m));
    }
  }
  std::ostringstream detail;
  detail << "symmetric, 1 exactly at alpha = beta (mod 2pi); distinct phases peak at "
         << sharpest << " (< 0.999 required)";
  return {"stochastic.overlap_symmetry_identity", worst <= tol::identity && sharpest < 0.999,
          worst, tol::identity, detail.str()};
}

}  // namespace detail

/// All in-library invariants; the CLI layer appends its own two checks.
inline std::vector<InvariantResult> library_invariant_suite(const VerifyOptions& opts = {}) {
  return {
      detail::check_qstate_type_invariants(opts),
      detail::check_dft_roundtrip(opts),
      detail::check_schmidt_local_unitary_invariance(opts),
      detail::check_commutator_trace(opts),
      detail::check_theta_group_law(opts),
      detail::check_theta_unitary_det1(opts),
      detail::check_compile_su2_roundtrip(opts),
      detail::check_permutation_pattern(opts),
      detail::check_basis_program_purity(opts),
      detail::check_program_orthogonality(opts),
      detail::check_momentum_position_equivalence(opts),
      detail::check_network_matches_sequence(opts),
      detail::check_network_linearity(opts),
      detail::check_phi_closed_form(opts),
      detail::check_momentum_basis_equivalence(opts),
      detail::check_cascade_tree_probability(opts),
      detail::check_cascade_monte_carlo(opts),
      detail::check_success_branch_rotation(opts),
      detail::check_overlap_symmetry_identity(opts),
  };
}

}  // namespace hqp
