// The programmable processor: conditional dynamics Σ_P |P⟩⟨P| ⊗ u_P over a
// finite program register, the momentum-conditioned hybrid operator, the
// sampled-grid coordinate-basis action, and the universal network runner
// (one rotation triple per qubit plus control-bit-gated CNOTs).
//
// A ConditionalUnitary is block-diagonal in its *conditioning basis*; program
// amplitudes handed to apply_processor are interpreted in that basis. For
// momentum conditioning the grid-representation matrix (which is dense, not
// block-diagonal) is exposed via assemble_in_grid_basis().
#pragma once

#include "hqp/core.hpp"
#include "hqp/gates.hpp"
#include "hqp/state.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <variant>
#include <vector>

namespace hqp {

enum class ConditioningBasis { Grid, Momentum };

/// Mapping from a momentum index or grid coordinate to a gate, evaluated
/// eagerly into a table.
class GateFamily {
 public:
  GateFamily(ConditioningBasis domain, std::vector<Unitary> table)
      : domain_(domain), table_(std::move(table)) {
    if (table_.empty()) throw std::invalid_argument("GateFamily: empty table");
    for (const Unitary& u : table_) {
      if (u.dim() != table_.front().dim()) {
        throw std::invalid_argument("GateFamily: blocks must share one dimension");
      }
    }
  }

  static GateFamily tabulate(ConditioningBasis domain, long size,
                             const std::function<Unitary(long)>& rule) {
    std::vector<Unitary> table;
    table.reserve(static_cast<std::size_t>(size));
    for (long p = 0; p < size; ++p) table.push_back(rule(p));
    return GateFamily(domain, std::move(table));
  }

  /// Index p ↦ θ_axis(p/M): the M momenta sweep one full gate period.
  static GateFamily theta(ConditioningBasis domain, int axis, long size) {
    return tabulate(domain, size, [&](long p) {
      return theta_gate(axis, static_cast<double>(p) / static_cast<double>(size));
    });
  }

  ConditioningBasis domain() const { return domain_; }
  long size() const { return static_cast<long>(table_.size()); }
  long block_dim() const { return table_.front().dim(); }
  const Unitary& operator[](long p) const { return table_.at(static_cast<std::size_t>(p)); }
  const std::vector<Unitary>& table() const { return table_; }

 private:
  ConditioningBasis domain_;
  std::vector<Unitary> table_;
};

/// Block-diagonal joint unitary: applies block P to the data when the program
/// factor is basis state |P⟩ of the conditioning basis.
class ConditionalUnitary {
 public:
  ConditionalUnitary(std::vector<Unitary> blocks, ConditioningBasis basis)
      : blocks_(std::move(blocks)), basis_(basis) {
    if (blocks_.empty()) throw std::invalid_argument("ConditionalUnitary: no blocks");
    for (const Unitary& u : blocks_) {
      if (u.dim() != blocks_.front().dim()) {
        throw std::invalid_argument("ConditionalUnitary: block dimension mismatch");
      }
    }
  }

  long program_dim() const { return static_cast<long>(blocks_.size()); }
  long data_dim() const { return blocks_.front().dim(); }
  ConditioningBasis basis() const { return basis_; }
  const Unitary& block(long p) const { return blocks_.at(static_cast<std::size_t>(p)); }

  /// MN×MN matrix in the conditioning basis — block-diagonal by construction.
  CMat assemble() const {
    const long m = program_dim(), n = data_dim();
    CMat u = CMat::Zero(m * n, m * n);
    for (long p = 0; p < m; ++p) u.block(p * n, p * n, n, n) = blocks_[p].matrix();
    return u;
  }

  /// The same operator in the grid representation of the program factor.
  /// Identical to assemble() for grid conditioning; F† · blockdiag · F (and
  /// generally dense) for momentum conditioning.
  CMat assemble_in_grid_basis() const {
    if (basis_ == ConditioningBasis::Grid) return assemble();
    const long m = program_dim(), n = data_dim();
    const CMat f = dft_matrix(m);
    CMat fk = CMat::Zero(m * n, m * n);  // F ⊗ I_N
    for (long p = 0; p < m; ++p) {
      for (long j = 0; j < m; ++j) fk.block(p * n, j * n, n, n) = f(p, j) * CMat::Identity(n, n);
    }
    return fk.adjoint() * assemble() * fk;
  }

 private:
  std::vector<Unitary> blocks_;
  ConditioningBasis basis_;
};

/// Conditional dynamics over a grid/computational-basis program register.
inline ConditionalUnitary build_conditional(std::vector<Unitary> blocks) {
  return ConditionalUnitary(std::move(blocks), ConditioningBasis::Grid);
}

/// Hybrid operator block-diagonal in the momentum basis: sends
/// (momentum state p) ⊗ |s⟩ to the same momentum state ⊗ u_(p)|s⟩.
inline ConditionalUnitary momentum_processor(const GateFamily& family, long m) {
  if (family.domain() != ConditioningBasis::Momentum) {
    throw std::invalid_argument("momentum_processor: family is not indexed by momentum");
  }
  if (family.size() != m) {
    throw std::invalid_argument("momentum_processor: family size does not match M");
  }
  return ConditionalUnitary(family.table(), ConditioningBasis::Momentum);
}

/// U(program ⊗ data), program amplitudes read in U's conditioning basis.
/// For a basis-state program |P⟩ the result is |P⟩ ⊗ (u_P·data) exactly.
inline StateVector apply_processor(const ConditionalUnitary& u, const StateVector& program,
                                   const StateVector& data) {
  if (program.dim() != u.program_dim()) {
    throw std::invalid_argument("apply_processor: program dimension mismatch");
  }
  if (data.dim() != u.data_dim()) {
    throw std::invalid_argument("apply_processor: data dimension mismatch");
  }
  const long n = u.data_dim();
  CVec out(program.dim() * n);
  for (long p = 0; p < program.dim(); ++p) {
    out.segment(p * n, n) = program.amplitude(p) * (u.block(p).matrix() * data.amplitudes());
  }
  std::vector<long> dims = program.dims();
  dims.insert(dims.end(), data.dims().begin(), data.dims().end());
  std::vector<FactorRole> roles = program.roles();
  roles.insert(roles.end(), data.roles().begin(), data.roles().end());
  return StateVector(std::move(out), std::move(dims), std::move(roles));
}

/// Coordinate-basis action on a sampled grid: amplitude block j of the output
/// is ψ_j · u_(j)·data, where ψ is the program factor in grid coordinates.
inline StateVector position_action(const GateFamily& family, const StateVector& program,
                                   const StateVector& data) {
  if (family.domain() != ConditioningBasis::Grid) {
    throw std::invalid_argument("position_action: family is not indexed by grid coordinates");
  }
  if (program.dim() != family.size()) {
    throw std::invalid_argument("position_action: program dimension mismatch");
  }
  if (data.dim() != family.block_dim()) {
    throw std::invalid_argument("position_action: data dimension mismatch");
  }
  const long n = data.dim();
  CVec out(program.dim() * n);
  for (long j = 0; j < program.dim(); ++j) {
    out.segment(j * n, n) = program.amplitude(j) * (family[j].matrix() * data.amplitudes());
  }
  std::vector<long> dims = program.dims();
  dims.insert(dims.end(), data.dims().begin(), data.dims().end());
  std::vector<FactorRole> roles = program.roles();
  roles.insert(roles.end(), data.roles().begin(), data.roles().end());
  return StateVector(std::move(out), std::move(dims), std::move(roles));
}

// ---------------------------------------------------------------------------
// Network runner
// ---------------------------------------------------------------------------

/// Momentum-conditioned rotation triple on one data qubit; vars name the
/// three continuous program factors driving θ1, θ2, θ3 in application order.
struct RotationSlot {
  int qubit = 0;
  std::array<int, 3> vars{};
};

/// CNOT(control → target) gated on a discrete program factor being |1⟩.
struct TwoQubitSlot {
  int control_bit = 0;
  int control = 0;
  int target = 0;
};

using NetworkSlot = std::variant<RotationSlot, TwoQubitSlot>;

/// Fixed circuit structure: data qubit count plus an ordered slot list.
/// Program factor ids are inferred from the slots and must cover 0..F−1
/// exactly once; rotation vars are continuous (dim M), control bits discrete
/// (dim 2).
class NetworkSpec {
 public:
  NetworkSpec(int data_qubits, std::vector<NetworkSlot> slots)
      : data_qubits_(data_qubits), slots_(std::move(slots)) {
    if (data_qubits_ < 1 || data_qubits_ > 12) {
      throw std::invalid_argument("NetworkSpec: data qubit count out of range");
    }
    std::map<int, FactorRole> roles;
    auto claim = [&](int id, FactorRole role) {
      if (id < 0) throw std::invalid_argument("NetworkSpec: negative program factor id");
      if (!roles.emplace(id, role).second) {
        throw std::invalid_argument("NetworkSpec: program factor " + std::to_string(id) +
                                    " used more than once");
      }
    };
    for (const NetworkSlot& slot : slots_) {
      if (const auto* r = std::get_if<RotationSlot>(&slot)) {
        if (r->qubit < 0 || r->qubit >= data_qubits_) {
          throw std::invalid_argument("NetworkSpec: rotation qubit out of range");
        }
        for (int id : r->vars) claim(id, FactorRole::ProgramContinuous);
      } else {
        const auto& t = std::get<TwoQubitSlot>(slot);
        if (t.control < 0 || t.control >= data_qubits_ || t.target < 0 ||
            t.target >= data_qubits_) {
          throw std::invalid_argument("NetworkSpec: two-qubit slot wire out of range");
        }
        if (t.control == t.target) {
          throw std::invalid_argument("NetworkSpec: control equals target");
        }
        claim(t.control_bit, FactorRole::ProgramDiscrete);
      }
    }
    roles_.reserve(roles.size());
    for (const auto& [id, role] : roles) {
      if (id != static_cast<int>(roles_.size())) {
        throw std::invalid_argument("NetworkSpec: program factor ids must cover 0..F-1");
      }
      roles_.push_back(role);
    }
  }

  /// The visible pattern of the universal circuit: a rotation triple on each
  /// qubit, then CNOT(i → i+1) after qubit i's triple, each gated by a fresh
  /// control bit.
  static NetworkSpec canonical(int data_qubits) {
    std::vector<NetworkSlot> slots;
    int next = 0;
    for (int qb = 0; qb < data_qubits; ++qb) {
      RotationSlot r{qb, {next, next + 1, next + 2}};
      next += 3;
      slots.emplace_back(r);
      if (qb + 1 < data_qubits) {
        slots.emplace_back(TwoQubitSlot{next++, qb, qb + 1});
      }
    }
    return NetworkSpec(data_qubits, std::move(slots));
  }

  int data_qubits() const { return data_qubits_; }
  const std::vector<NetworkSlot>& slots() const { return slots_; }
  int factor_count() const { return static_cast<int>(roles_.size()); }
  FactorRole factor_role(int id) const { return roles_.at(static_cast<std::size_t>(id)); }

 private:
  int data_qubits_;
  std::vector<NetworkSlot> slots_;
  std::vector<FactorRole> roles_;
};

/// Per-factor program state: a basis value (momentum index / control bit) or
/// an amplitude vector. Continuous-factor amplitudes are momentum-basis
/// coefficients over {0..M−1}.
class ProgramAssignment {
 public:
  ProgramAssignment& set_basis(int factor, long value) {
    entries_[factor] = value;
    return *this;
  }
  ProgramAssignment& set_amplitudes(int factor, CVec coefficients) {
    entries_[factor] = std::move(coefficients);
    return *this;
  }

  bool has(int factor) const { return entries_.count(factor) != 0; }
  bool is_basis(int factor) const { return std::holds_alternative<long>(entries_.at(factor)); }
  long basis_value(int factor) const { return std::get<long>(entries_.at(factor)); }
  const CVec& amplitudes(int factor) const { return std::get<CVec>(entries_.at(factor)); }

 private:
  std::map<int, std::variant<long, CVec>> entries_;
};

/// Result of a network run. Basis-assigned ("pinned") program factors are
/// provably unchanged by the conditional dynamics and are kept out of the
/// explicit joint state, which covers the superposed program factors (in id
/// order, momentum coordinates) followed by the data qubits.
struct NetworkRun {
  StateVector state;
  std::vector<int> explicit_factors;
  std::vector<std::optional<long>> pinned;  // indexed by factor id
  std::vector<long> factor_dims;            // indexed by factor id
  std::vector<FactorRole> factor_roles;     // indexed by factor id
  std::optional<Unitary> data_unitary;      // composite on the data register, all-pinned runs
  long momentum_resolution = 0;
  int data_qubits = 0;
};

namespace detail {

// Applies a digit-dependent 2×2 gate to `target` (a dim-2 factor): for every
// amplitude pair, the gate is gate_of(digit of control_factor). Pass
// control_factor = npos for an unconditioned gate.
inline void apply_single_qubit_kernel(CVec& amps, const std::vector<long>& dims,
                                      std::size_t target_factor, std::size_t control_factor,
                                      const std::function<const CMat&(long)>& gate_of,
                                      std::optional<std::pair<std::size_t, long>> extra_condition =
                                          std::nullopt) {
  std::vector<long> strides(dims.size());
  long s = 1;
  for (std::size_t k = dims.size(); k-- > 0;) {
    strides[k] = s;
    s *= dims[k];
  }
  const long tstride = strides[target_factor];
  for (long flat = 0; flat < amps.size(); ++flat) {
    if ((flat / tstride) % 2 != 0) continue;
    if (extra_condition &&
        (flat / strides[extra_condition->first]) % dims[extra_condition->first] !=
            extra_condition->second) {
      continue;
    }
    const long digit = control_factor == static_cast<std::size_t>(-1)
                           ? 0
                           : (flat / strides[control_factor]) % dims[control_factor];
    const CMat& g = gate_of(digit);
    const Complex a0 = amps(flat), a1 = amps(flat + tstride);
    amps(flat) = g(0, 0) * a0 + g(0, 1) * a1;
    amps(flat + tstride) = g(1, 0) * a0 + g(1, 1) * a1;
  }
}

}  // namespace detail

/// Runs the network: slots in listed order, each rotation conditioned on its
/// continuous factor's momentum value p via θ_axis(p/M), each two-qubit slot
/// a CNOT gated on its control bit. `data` must have 2^n amplitudes.
inline NetworkRun run_network(const NetworkSpec& spec, const ProgramAssignment& assignment,
                              const StateVector& data, long momentum_resolution) {
  const int n = spec.data_qubits();
  if (momentum_resolution < 1) {
    throw std::invalid_argument("run_network: momentum resolution must be >= 1");
  }
  if (data.dim() != (1L << n)) {
    throw std::invalid_argument("run_network: data register must have 2^n amplitudes");
  }

  const int f = spec.factor_count();
  std::vector<std::optional<long>> pinned(static_cast<std::size_t>(f));
  std::vector<long> factor_dims(static_cast<std::size_t>(f));
  std::vector<FactorRole> factor_roles(static_cast<std::size_t>(f));
  std::vector<int> explicit_factors;
  for (int id = 0; id < f; ++id) {
    if (!assignment.has(id)) {
      throw std::invalid_argument("run_network: program factor " + std::to_string(id) +
                                  " unassigned");
    }
    const long fdim = spec.factor_role(id) == FactorRole::ProgramContinuous
                          ? momentum_resolution
                          : 2;
    factor_dims[static_cast<std::size_t>(id)] = fdim;
    factor_roles[static_cast<std::size_t>(id)] = spec.factor_role(id);
    if (assignment.is_basis(id)) {
      const long v = assignment.basis_value(id);
      if (v < 0 || v >= fdim) {
        throw std::out_of_range("run_network: basis value for factor " + std::to_string(id) +
                                " out of range");
      }
      pinned[static_cast<std::size_t>(id)] = v;
    } else {
      if (assignment.amplitudes(id).size() != fdim) {
        throw std::invalid_argument("run_network: amplitude vector for factor " +
                                    std::to_string(id) + " has wrong length");
      }
      explicit_factors.push_back(id);
    }
  }

  // Joint layout: explicit program factors (id order), then data qubits.
  std::vector<long> dims;
  std::vector<FactorRole> roles;
  std::map<int, std::size_t> factor_pos;
  for (int id : explicit_factors) {
    factor_pos[id] = dims.size();
    dims.push_back(spec.factor_role(id) == FactorRole::ProgramContinuous ? momentum_resolution
                                                                         : 2);
    roles.push_back(spec.factor_role(id));
  }
  const std::size_t qubit_base = dims.size();
  dims.insert(dims.end(), static_cast<std::size_t>(n), 2);
  roles.insert(roles.end(), static_cast<std::size_t>(n), FactorRole::DataQubit);

  CVec amps = data.amplitudes();
  for (auto it = explicit_factors.rbegin(); it != explicit_factors.rend(); ++it) {
    const CVec& fvec = assignment.amplitudes(*it);
    CVec joint(fvec.size() * amps.size());
    for (long i = 0; i < fvec.size(); ++i) joint.segment(i * amps.size(), amps.size()) = fvec(i) * amps;
    amps = std::move(joint);
  }

  const bool all_pinned = explicit_factors.empty();
  CMat composite;
  if (all_pinned) composite = CMat::Identity(1L << n, 1L << n);

  // One momentum-indexed θ table per axis, shared across slots.
  std::array<std::vector<CMat>, 3> theta_tables;
  auto theta_of = [&](int axis, long p) -> const CMat& {
    auto& table = theta_tables[static_cast<std::size_t>(axis - 1)];
    if (table.empty()) {
      table.reserve(static_cast<std::size_t>(momentum_resolution));
      for (long k = 0; k < momentum_resolution; ++k) {
        table.push_back(
            theta_gate(axis, static_cast<double>(k) / static_cast<double>(momentum_resolution))
                .matrix());
      }
    }
    return table[static_cast<std::size_t>(p)];
  };
  const CMat pauli_x = pauli(1);
  constexpr auto npos = static_cast<std::size_t>(-1);

  for (const NetworkSlot& slot : spec.slots()) {
    if (const auto* r = std::get_if<RotationSlot>(&slot)) {
      const std::size_t qpos = qubit_base + static_cast<std::size_t>(r->qubit);
      for (int axis = 1; axis <= 3; ++axis) {
        const int id = r->vars[static_cast<std::size_t>(axis - 1)];
        if (pinned[static_cast<std::size_t>(id)]) {
          const double q = static_cast<double>(*pinned[static_cast<std::size_t>(id)]) /
                           static_cast<double>(momentum_resolution);
          const CMat g = theta_gate(axis, q).matrix();
          detail::apply_single_qubit_kernel(amps, dims, qpos, npos,
                                            [&](long) -> const CMat& { return g; });
          if (all_pinned) composite = embed_single_qubit(Unitary(g), r->qubit, n).matrix() * composite;
        } else {
          detail::apply_single_qubit_kernel(
              amps, dims, qpos, factor_pos[id],
              [&](long p) -> const CMat& { return theta_of(axis, p); });
        }
      }
    } else {
      const auto& t = std::get<TwoQubitSlot>(slot);
      const std::size_t tpos = qubit_base + static_cast<std::size_t>(t.target);
      const std::size_t cpos = qubit_base + static_cast<std::size_t>(t.control);
      const int id = t.control_bit;
      if (pinned[static_cast<std::size_t>(id)]) {
        if (*pinned[static_cast<std::size_t>(id)] == 1) {
          detail::apply_single_qubit_kernel(amps, dims, tpos, npos,
                                            [&](long) -> const CMat& { return pauli_x; },
                                            std::make_pair(cpos, 1L));
          if (all_pinned) composite = cnot(t.control, t.target, n).matrix() * composite;
        }
      } else {
        const CMat identity2 = CMat::Identity(2, 2);
        detail::apply_single_qubit_kernel(
            amps, dims, tpos, factor_pos[id],
            [&](long bit) -> const CMat& { return bit == 1 ? pauli_x : identity2; },
            std::make_pair(cpos, 1L));
      }
    }
  }

  NetworkRun run{StateVector(std::move(amps), dims, roles), std::move(explicit_factors),
                 std::move(pinned),  std::move(factor_dims), std::move(factor_roles),
                 std::nullopt,       momentum_resolution,    n};
  if (all_pinned) run.data_unitary = Unitary(std::move(composite));
  return run;
}

/// Full joint state (every program factor in id order, then the data qubits)
/// with pinned factors tensored back in as basis states of their own factor.
/// Throws length_error when the joint would exceed `max_amplitudes`.
inline StateVector materialize_joint(const NetworkRun& run, long max_amplitudes = 1L << 22) {
  std::vector<long> dims(run.factor_dims);
  std::vector<FactorRole> roles(run.factor_roles);
  dims.insert(dims.end(), static_cast<std::size_t>(run.data_qubits), 2);
  roles.insert(roles.end(), static_cast<std::size_t>(run.data_qubits), FactorRole::DataQubit);
  long total = 1;
  for (long d : dims) {
    if (total > max_amplitudes / d) {
      throw std::length_error("materialize_joint: joint state exceeds amplitude cap");
    }
    total *= d;
  }

  // Offset contributed by the pinned basis values; explicit factors and data
  // qubits scatter with their own strides.
  std::vector<long> strides(dims.size());
  long s = 1;
  for (std::size_t k = dims.size(); k-- > 0;) {
    strides[k] = s;
    s *= dims[k];
  }
  long pinned_offset = 0;
  for (std::size_t id = 0; id < run.pinned.size(); ++id) {
    if (run.pinned[id]) pinned_offset += *run.pinned[id] * strides[id];
  }
  std::vector<long> live_strides;
  for (int id : run.explicit_factors) live_strides.push_back(strides[static_cast<std::size_t>(id)]);
  for (std::size_t k = run.pinned.size(); k < dims.size(); ++k) live_strides.push_back(strides[k]);

  const CVec& compact = run.state.amplitudes();
  const std::vector<long>& live_dims = run.state.dims();
  CVec full = CVec::Zero(total);
  for (long flat = 0; flat < compact.size(); ++flat) {
    long rem = flat, target = pinned_offset;
    for (std::size_t k = live_dims.size(); k-- > 0;) {
      target += (rem % live_dims[k]) * live_strides[k];
      rem /= live_dims[k];
    }
    full(target) = compact(flat);
  }
  return StateVector(std::move(full), std::move(dims), std::move(roles));
}

}  // namespace hqp
