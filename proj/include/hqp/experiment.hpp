// Experiment-document layer behind the CLI: JSON in (complex numbers as
// [re, im] pairs, amplitudes row-major under the global factor ordering),
// JSON state reports and CSV sweep tables out. Also assembles the full
// 21-line invariant suite (library checks + the two CLI-level checks).
#pragma once

#include "hqp/verify.hpp"

#include "json.hpp"

#include <charconv>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace hqp {

/// Schema violation; the message names the offending field.
class DocValidationError : public std::runtime_error {
 public:
  DocValidationError(std::string field, const std::string& message)
      : std::runtime_error("invalid experiment document: field '" + field + "': " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

namespace doc {

using nlohmann::json;
using nlohmann::ordered_json;

inline Complex parse_complex(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw DocValidationError(field, "expected a [re, im] pair");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline CVec parse_cvec(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw DocValidationError(field, "expected a non-empty array");
  CVec v(static_cast<long>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<long>(i)) = parse_complex(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

inline CMat parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw DocValidationError(field, "expected an array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw DocValidationError(field, "rows must be non-empty arrays");
  CMat m(static_cast<long>(j.size()), static_cast<long>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) {
      throw DocValidationError(row_field, "rows must all have the same length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<long>(r), static_cast<long>(c)) =
          parse_complex(j[r][c], row_field + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

inline long require_integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw DocValidationError(field, "expected an integer");
  return j.get<long>();
}

/// Renormalization policy: near-unit lists are silently rescaled; off by
/// more than 1e-8 draws a stderr warning; (near-)zero vectors are rejected.
inline CVec renormalized(CVec v, const std::string& field) {
  const double n = v.norm();
  if (n < 1e-12) throw DocValidationError(field, "amplitude list has near-zero norm");
  if (std::abs(n - 1.0) > 1e-8) {
    std::cerr << "warning: field '" << field << "' deviates from unit norm by "
              << std::abs(n - 1.0) << "; renormalizing\n";
  }
  return v / n;
}

/// {"basis": k} or {"amplitudes": [[re,im], ...]} of the given dimension.
inline CVec parse_state(const json& j, const std::string& field, long dim,
                        bool* was_basis = nullptr, long* basis_index = nullptr) {
  if (was_basis) *was_basis = false;
  if (!j.is_object()) {
    throw DocValidationError(field, "expected an object with 'basis' or 'amplitudes'");
  }
  if (j.contains("basis")) {
    const long k = require_integer(j["basis"], field + ".basis");
    if (k < 0 || k >= dim) throw DocValidationError(field + ".basis", "index out of range");
    if (was_basis) *was_basis = true;
    if (basis_index) *basis_index = k;
    CVec v = CVec::Zero(dim);
    v(k) = 1.0;
    return v;
  }
  if (j.contains("amplitudes")) {
    CVec v = parse_cvec(j["amplitudes"], field + ".amplitudes");
    if (v.size() != dim) {
      throw DocValidationError(field + ".amplitudes",
                               "expected " + std::to_string(dim) + " entries, got " +
                                   std::to_string(v.size()));
    }
    return renormalized(std::move(v), field + ".amplitudes");
  }
  throw DocValidationError(field, "missing 'basis' or 'amplitudes'");
}

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json cvec_to_json(const CVec& v) {
  json out = json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

inline json matrix_to_json(const CMat& m) {
  json out = json::array();
  for (long r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

inline std::string require_kind(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw DocValidationError("kind", "document must be an object with a string 'kind'");
  }
  return j["kind"].get<std::string>();
}

}  // namespace doc

struct SimulateOptions {
  std::optional<long> momentum_resolution;  // CLI override of the doc value
};

namespace detail {

inline nlohmann::ordered_json simulate_conditional(const nlohmann::json& d) {
  using doc::json;
  if (!d.contains("blocks")) throw DocValidationError("blocks", "required for kind 'conditional'");
  const json& jb = d["blocks"];
  if (!jb.is_array() || jb.empty()) {
    throw DocValidationError("blocks", "expected a non-empty array of matrices");
  }
  std::vector<Unitary> blocks;
  for (std::size_t p = 0; p < jb.size(); ++p) {
    const std::string field = "blocks[" + std::to_string(p) + "]";
    const CMat m = doc::parse_matrix(jb[p], field);
    try {
      blocks.emplace_back(m);
    } catch (const std::invalid_argument& e) {
      throw DocValidationError(field, e.what());
    }
    if (blocks.back().dim() != blocks.front().dim()) {
      throw DocValidationError(field, "blocks must share one dimension");
    }
  }

  ConditioningBasis basis = ConditioningBasis::Grid;
  if (d.contains("basis")) {
    const std::string b = d["basis"].is_string() ? d["basis"].get<std::string>() : "";
    if (b == "grid") {
      basis = ConditioningBasis::Grid;
    } else if (b == "momentum") {
      basis = ConditioningBasis::Momentum;
    } else {
      throw DocValidationError("basis", "expected \"grid\" or \"momentum\"");
    }
  }

  const long m = static_cast<long>(blocks.size());
  const long n = blocks.front().dim();
  const ConditionalUnitary cond(blocks, basis);

  if (!d.contains("program")) throw DocValidationError("program", "required");
  if (!d.contains("data")) throw DocValidationError("data", "required");
  bool program_is_basis = false;
  long program_index = 0;
  const CVec pv = doc::parse_state(d["program"], "program", m, &program_is_basis, &program_index);
  const CVec dv = doc::parse_state(d["data"], "data", n);

  const StateVector program(pv, {m}, {FactorRole::ProgramContinuous});
  const StateVector data(dv, {n}, {FactorRole::DataQubit});
  const StateVector out = apply_processor(cond, program, data);

  nlohmann::ordered_json report;
  report["kind"] = "conditional";
  report["program_dim"] = m;
  report["data_dim"] = n;
  report["conditioning_basis"] = basis == ConditioningBasis::Grid ? "grid" : "momentum";
  report["output"] = {{"dims", out.dims()}, {"amplitudes", doc::cvec_to_json(out.amplitudes())}};
  std::vector<double> coeffs;
  if (m == 1) {
    coeffs = {1.0};
  } else {
    coeffs = schmidt_coefficients(out, BipartiteCut({0}, 2));
  }
  report["schmidt_coefficients"] = coeffs;
  report["schmidt_rank"] = schmidt_rank(coeffs);
  if (program_is_basis) {
    report["effective_data_unitary"] = doc::matrix_to_json(cond.block(program_index).matrix());
  }
  return report;
}

inline nlohmann::ordered_json simulate_network(const nlohmann::json& d,
                                               const SimulateOptions& opts) {
  using doc::json;
  if (!d.contains("qubits")) throw DocValidationError("qubits", "required for kind 'network'");
  const long n = doc::require_integer(d["qubits"], "qubits");
  if (n < 1 || n > 10) throw DocValidationError("qubits", "expected 1..10");

  std::optional<NetworkSpec> spec;
  if (!d.contains("slots")) throw DocValidationError("slots", "required");
  if (d["slots"].is_string() && d["slots"].get<std::string>() == "canonical") {
    spec.emplace(NetworkSpec::canonical(static_cast<int>(n)));
  } else if (d["slots"].is_array()) {
    std::vector<NetworkSlot> slots;
    for (std::size_t i = 0; i < d["slots"].size(); ++i) {
      const json& js = d["slots"][i];
      const std::string field = "slots[" + std::to_string(i) + "]";
      if (js.is_object() && js.contains("rotation")) {
        const json& jr = js["rotation"];
        if (!jr.is_object() || !jr.contains("qubit") || !jr.contains("vars") ||
            !jr["vars"].is_array() || jr["vars"].size() != 3) {
          throw DocValidationError(field + ".rotation",
                                   "expected {\"qubit\": q, \"vars\": [a, b, c]}");
        }
        RotationSlot slot;
        slot.qubit = static_cast<int>(doc::require_integer(jr["qubit"], field + ".rotation.qubit"));
        for (int k = 0; k < 3; ++k) {
          slot.vars[static_cast<std::size_t>(k)] =
              static_cast<int>(doc::require_integer(jr["vars"][static_cast<std::size_t>(k)],
                                                    field + ".rotation.vars"));
        }
        slots.emplace_back(slot);
      } else if (js.is_object() && js.contains("cnot")) {
        const json& jc = js["cnot"];
        if (!jc.is_object() || !jc.contains("control_bit") || !jc.contains("control") ||
            !jc.contains("target")) {
          throw DocValidationError(
              field + ".cnot", "expected {\"control_bit\": f, \"control\": c, \"target\": t}");
        }
        TwoQubitSlot slot;
        slot.control_bit =
            static_cast<int>(doc::require_integer(jc["control_bit"], field + ".cnot.control_bit"));
        slot.control = static_cast<int>(doc::require_integer(jc["control"], field + ".cnot.control"));
        slot.target = static_cast<int>(doc::require_integer(jc["target"], field + ".cnot.target"));
        slots.emplace_back(slot);
      } else {
        throw DocValidationError(field, "expected an object with 'rotation' or 'cnot'");
      }
    }
    try {
      spec.emplace(static_cast<int>(n), std::move(slots));
    } catch (const std::invalid_argument& e) {
      throw DocValidationError("slots", e.what());
    }
  } else {
    throw DocValidationError("slots", "expected \"canonical\" or an array of slots");
  }

  long m = 256;
  if (d.contains("momentum_resolution")) {
    m = doc::require_integer(d["momentum_resolution"], "momentum_resolution");
  }
  if (opts.momentum_resolution) m = *opts.momentum_resolution;
  if (m < 1 || m > (1L << 20)) {
    throw DocValidationError("momentum_resolution", "expected 1..2^20");
  }

  if (!d.contains("program")) throw DocValidationError("program", "required");
  if (!d["program"].is_array()) {
    throw DocValidationError("program", "expected an array of factor assignments");
  }
  ProgramAssignment assignment;
  for (std::size_t i = 0; i < d["program"].size(); ++i) {
    const json& je = d["program"][i];
    const std::string field = "program[" + std::to_string(i) + "]";
    if (!je.is_object() || !je.contains("factor")) {
      throw DocValidationError(field, "expected an object with 'factor'");
    }
    const int id = static_cast<int>(doc::require_integer(je["factor"], field + ".factor"));
    if (je.contains("value")) {
      assignment.set_basis(id, doc::require_integer(je["value"], field + ".value"));
    } else if (je.contains("amplitudes")) {
      assignment.set_amplitudes(
          id, doc::renormalized(doc::parse_cvec(je["amplitudes"], field + ".amplitudes"),
                                field + ".amplitudes"));
    } else {
      throw DocValidationError(field, "missing 'value' or 'amplitudes'");
    }
  }

  if (!d.contains("data")) throw DocValidationError("data", "required");
  const CVec dv = doc::parse_state(d["data"], "data", 1L << n);
  const StateVector data(dv, std::vector<long>(static_cast<std::size_t>(n), 2),
                         std::vector<FactorRole>(static_cast<std::size_t>(n),
                                                 FactorRole::DataQubit));

  std::optional<NetworkRun> run;
  try {
    run.emplace(run_network(*spec, assignment, data, m));
  } catch (const std::invalid_argument& e) {
    throw DocValidationError("program", e.what());
  } catch (const std::out_of_range& e) {
    throw DocValidationError("program", e.what());
  }

  nlohmann::ordered_json report;
  report["kind"] = "network";
  report["momentum_resolution"] = m;
  report["data_qubits"] = n;
  nlohmann::ordered_json pinned = nlohmann::ordered_json::array();
  for (std::size_t id = 0; id < run->pinned.size(); ++id) {
    if (run->pinned[id]) {
      pinned.push_back({{"factor", id}, {"value", *run->pinned[id]}});
    }
  }
  report["pinned"] = std::move(pinned);
  report["superposed_factors"] = run->explicit_factors;
  std::vector<std::string> role_names;
  for (FactorRole r : run->state.roles()) role_names.emplace_back(to_string(r));
  report["output"] = {{"dims", run->state.dims()},
                      {"roles", role_names},
                      {"amplitudes", doc::cvec_to_json(run->state.amplitudes())}};

  std::vector<double> coeffs;
  if (run->explicit_factors.empty()) {
    coeffs = {1.0};  // program fully pinned: exact product across the cut
  } else {
    std::vector<std::size_t> left(run->explicit_factors.size());
    for (std::size_t k = 0; k < left.size(); ++k) left[k] = k;
    coeffs = schmidt_coefficients(run->state, BipartiteCut(left, run->state.factor_count()));
  }
  report["schmidt_coefficients"] = coeffs;
  report["schmidt_rank"] = schmidt_rank(coeffs);
  if (run->data_unitary) {
    report["effective_data_unitary"] = doc::matrix_to_json(run->data_unitary->matrix());
  }
  return report;
}

}  // namespace detail

/// Runs a 'conditional' or 'network' document and returns the state report.
inline nlohmann::ordered_json run_simulate(const nlohmann::json& d,
                                           const SimulateOptions& opts = {}) {
  const std::string kind = doc::require_kind(d);
  if (kind == "conditional") return detail::simulate_conditional(d);
  if (kind == "network") return detail::simulate_network(d, opts);
  throw DocValidationError("kind", "expected 'conditional' or 'network', got '" + kind + "'");
}

struct SweepRow {
  int stages = 0;
  double exact = 0.0;
  double closed_form = 0.0;
  double mc_frequency = 0.0;
  double mc_std_error = 0.0;
};

/// One row per stage count m: exact tree probability, 1 − 2⁻ᵐ, Monte Carlo
/// frequency and its standard error.
inline std::vector<SweepRow> run_sweep_rows(const nlohmann::json& d,
                                            std::optional<std::uint64_t> seed_override = {}) {
  const std::string kind = doc::require_kind(d);
  if (kind != "stochastic-sweep") {
    throw DocValidationError("kind", "expected 'stochastic-sweep', got '" + kind + "'");
  }
  if (!d.contains("alpha") || !d["alpha"].is_number()) {
    throw DocValidationError("alpha", "required number");
  }
  const double alpha = d["alpha"].get<double>();
  if (!d.contains("m_min")) throw DocValidationError("m_min", "required");
  if (!d.contains("m_max")) throw DocValidationError("m_max", "required");
  const long m_min = doc::require_integer(d["m_min"], "m_min");
  const long m_max = doc::require_integer(d["m_max"], "m_max");
  if (m_min < 1) throw DocValidationError("m_min", "expected >= 1");
  if (m_max < m_min || m_max > 20) throw DocValidationError("m_max", "expected m_min..20");
  if (!d.contains("trials")) throw DocValidationError("trials", "required");
  const long trials = doc::require_integer(d["trials"], "trials");
  if (trials < 1) throw DocValidationError("trials", "expected >= 1");
  std::uint64_t seed = 1;
  if (d.contains("seed")) {
    if (!d["seed"].is_number_unsigned() && !d["seed"].is_number_integer()) {
      throw DocValidationError("seed", "expected an unsigned integer");
    }
    seed = d["seed"].get<std::uint64_t>();
  }
  if (seed_override) seed = *seed_override;

  std::vector<SweepRow> rows;
  for (long m = m_min; m <= m_max; ++m) {
    const MonteCarloEstimate est =
        monte_carlo_success(alpha, static_cast<int>(m), trials,
                            split_seed(seed, static_cast<std::uint64_t>(m)));
    rows.push_back({static_cast<int>(m), success_probability_exact(static_cast<int>(m), alpha),
                    1.0 - std::ldexp(1.0, -static_cast<int>(m)), est.frequency, est.std_error});
  }
  return rows;
}

namespace doc {

/// Shortest round-trip decimal form; locale-independent '.' separator.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace doc

inline std::string render_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "m,exact,closed_form,mc_frequency,mc_std_error\n";
  for (const SweepRow& r : rows) {
    out += std::to_string(r.stages);
    out += ',';
    out += doc::format_double(r.exact);
    out += ',';
    out += doc::format_double(r.closed_form);
    out += ',';
    out += doc::format_double(r.mc_frequency);
    out += ',';
    out += doc::format_double(r.mc_std_error);
    out += '\n';
  }
  return out;
}

/// Angle triple + rebuild distance for a caller-validated unitary.
inline nlohmann::ordered_json run_compile(const CMat& matrix) {
  const Unitary u(matrix);
  const AngleTriple t = compile_su2(u);
  const double distance = phase_aligned_distance(rebuild_su2(t).matrix(), matrix);
  nlohmann::ordered_json report;
  report["q1"] = t.q1.value;
  report["q2"] = t.q2.value;
  report["q3"] = t.q3.value;
  report["rebuild_distance"] = distance;
  return report;
}

inline const std::vector<std::string>& expected_invariant_names() {
  static const std::vector<std::string> names = {
      "qstate.op_outputs_satisfy_type_invariants",
      "qstate.dft_roundtrip",
      "qstate.schmidt_local_unitary_invariance",
      "qstate.commutator_trace_vanishes",
      "gates.theta_group_law",
      "gates.theta_unitary_det1",
      "gates.compile_su2_roundtrip",
      "gates.permutation_pattern_exact",
      "processor.basis_program_purity",
      "processor.program_orthogonality",
      "processor.momentum_position_equivalence",
      "processor.network_matches_gate_sequence",
      "processor.network_linearity",
      "stochastic.phi_closed_form",
      "stochastic.momentum_basis_equivalence",
      "stochastic.cascade_tree_probability",
      "stochastic.cascade_monte_carlo",
      "stochastic.success_branch_rotation",
      "stochastic.overlap_symmetry_identity",
      "cli.sweep_determinism",
      "cli.verify_covers_all_invariants",
  };
  return names;
}

namespace detail {

inline InvariantResult check_sweep_determinism(const VerifyOptions& opts) {
  const nlohmann::json d = {{"kind", "stochastic-sweep"}, {"alpha", 0.8}, {"m_min", 1},
                            {"m_max", 3},                 {"trials", 2000}};
  const std::string a = render_sweep_csv(run_sweep_rows(d, opts.seed));
  const std::string b = render_sweep_csv(run_sweep_rows(d, opts.seed));
  const bool equal = a == b;
  return {"cli.sweep_determinism", equal, equal ? 0.0 : 1.0, 0.0,
          "two fixed-seed renders are byte-identical (observed 0 = equal)"};
}

inline InvariantResult check_verify_coverage(const std::vector<InvariantResult>& so_far) {
  std::vector<std::string> got;
  got.reserve(so_far.size() + 1);
  for (const InvariantResult& r : so_far) got.push_back(r.name);
  got.emplace_back("cli.verify_covers_all_invariants");
  const std::vector<std::string>& want = expected_invariant_names();
  std::size_t mismatches = std::max(got.size(), want.size()) - std::min(got.size(), want.size());
  for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
    if (got[i] != want[i]) ++mismatches;
  }
  return {"cli.verify_covers_all_invariants", mismatches == 0,
          static_cast<double>(mismatches), 0.0,
          "every module invariant appears as exactly one report line (" +
              std::to_string(got.size()) + " lines)"};
}

}  // namespace detail

/// Library checks plus the CLI layer's own two: the 21-line report.
inline std::vector<InvariantResult> full_invariant_suite(const VerifyOptions& opts = {}) {
  std::vector<InvariantResult> results = library_invariant_suite(opts);
  results.push_back(detail::check_sweep_determinism(opts));
  results.push_back(detail::check_verify_coverage(results));
  return results;
}

}  // namespace hqp
