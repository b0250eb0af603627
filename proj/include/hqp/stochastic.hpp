// Stochastic phase programming: a measured ancilla applies a phase rotation
// with probability exactly 1/2; failures leave a doubled residual phase, and
// an m-stage cascade succeeds with probability 1 − 2⁻ᵐ. The m ancillas of a
// full cascade form one product program state φ whose grid representation has
// a momentum-translation closed form.
#pragma once

#include "hqp/core.hpp"
#include "hqp/random.hpp"
#include "hqp/state.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

namespace hqp {

/// R(φ) = diag(e^{iφ/2}, e^{−iφ/2}); R(φ)R(ψ) = R(φ+ψ), R(0) = I.
inline Unitary phase_rotation(double phase) {
  CMat r = CMat::Zero(2, 2);
  r(0, 0) = std::polar(1.0, phase / 2.0);
  r(1, 1) = std::polar(1.0, -phase / 2.0);
  return Unitary(std::move(r));
}

/// θ_3(q) equals R(φ) with φ = 4πq; bridges the rotation-triple gate
/// parameter to the stochastic program phase.
inline double phase_for_theta_parameter(double q) { return 2.0 * tau * q; }

/// Program phase folded into [0, 2π).
struct ProgramPhase {
  double value = 0.0;
  static ProgramPhase canonical(double phase) {
    double r = std::fmod(phase, tau);
    if (r < 0.0) r += tau;
    if (r >= tau) r -= tau;
    return ProgramPhase{r + 0.0};
  }
};

/// Single-stage program state (e^{iα/2}|0⟩ + e^{−iα/2}|1⟩)/√2.
inline StateVector phi_single(double alpha) {
  CVec v(2);
  v(0) = std::polar(1.0 / std::numbers::sqrt2, alpha / 2.0);
  v(1) = std::polar(1.0 / std::numbers::sqrt2, -alpha / 2.0);
  return StateVector(std::move(v), {2}, {FactorRole::ProgramDiscrete});
}

/// K = Σ_k b_k 2^k where b_k is the bit of factor k — the m-bit reversal of
/// the standard flat index (factor 0 slowest).
inline long inverted_binary(long index, int bits) {
  long k = 0;
  for (int b = 0; b < bits; ++b) {
    k = (k << 1) | (index & 1);
    index >>= 1;
  }
  return k;
}

/// m-stage cascade program ⊗_{k<m} φ(2^k α): factor k carries stage k's
/// doubled phase. Amplitude at flat index j is e^{iα(M−1)/2} e^{−iK(j)α}/√M
/// with M = 2^m and K the inverted-binary value of j.
inline StateVector phi_state(double alpha, int stages) {
  if (stages < 1 || stages > 24) {
    throw std::invalid_argument("phi_state: stage count out of range");
  }
  const long m = 1L << stages;
  CVec v(m);
  const double base = alpha * static_cast<double>(m - 1) / 2.0;
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (long j = 0; j < m; ++j) {
    v(j) = std::polar(scale, base - alpha * static_cast<double>(inverted_binary(j, stages)));
  }
  return StateVector(std::move(v), std::vector<long>(static_cast<std::size_t>(stages), 2),
                     std::vector<FactorRole>(static_cast<std::size_t>(stages),
                                             FactorRole::ProgramDiscrete));
}

/// ⟨p̃|φ_α⟩ where |p̃⟩ is the momentum state on the M = 2^m grid and the grid
/// coordinate of a register basis state is its inverted-binary value.
inline Complex momentum_overlap(double alpha, int stages, long p) {
  const long m = 1L << stages;
  if (p < 0 || p >= m) throw std::out_of_range("momentum_overlap: momentum index out of range");
  const StateVector phi = phi_state(alpha, stages);
  Complex acc = 0.0;
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (long j = 0; j < m; ++j) {
    const long k = inverted_binary(j, stages);
    const Complex mom =
        std::polar(scale, tau * static_cast<double>((p * k) % m) / static_cast<double>(m));
    acc += std::conj(mom) * phi.amplitude(j);
  }
  return acc;
}

/// |⟨Φ_α|Φ_β⟩| = ∏_{k<m} |cos(2^k(α−β)/2)|: each extra stage multiplies in
/// another cosine of a doubled phase gap, so distinct phases decohere
/// exponentially fast in m (orthogonal in the m → ∞ limit).
inline double overlap_decay(double alpha, double beta, int stages) {
  if (stages < 1) throw std::invalid_argument("overlap_decay: stage count out of range");
  double prod = 1.0;
  for (int k = 0; k < stages; ++k) {
    prod *= std::abs(std::cos(std::ldexp(alpha - beta, k) / 2.0));
  }
  return prod;
}

/// Bundle of one cascade's program: target phase and stage count.
struct CascadeProgram {
  double alpha = 0.0;
  int stage_count = 1;

  long program_dim() const { return 1L << stage_count; }
  StateVector state() const { return phi_state(alpha, stage_count); }
};

/// Measurement outcome supplier: receives the outcome-0 probability, returns
/// 0 or 1.
using OutcomeSource = std::function<int(double)>;

inline OutcomeSource seeded_sampler(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng](double prob0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(*rng) < prob0 ? 0 : 1;
  };
}

/// Replays a fixed outcome script; throws once the script is exhausted.
inline OutcomeSource forced_bits(std::vector<int> bits) {
  auto cursor = std::make_shared<std::size_t>(0);
  auto script = std::make_shared<std::vector<int>>(std::move(bits));
  return [cursor, script](double) {
    if (*cursor >= script->size()) {
      throw std::out_of_range("forced_bits: outcome script exhausted");
    }
    return (*script)[(*cursor)++];
  };
}

struct AttemptOutcome {
  int outcome_bit = 0;
  double branch_probability = 0.0;
  StateVector post_state;        // data register only, ancilla measured out
  double residual_phase = 0.0;   // 0 on success, 2α on failure
};

/// One programmed-rotation attempt on `target`: adjoin a φ_α ancilla as the
/// fastest factor, CNOT target → ancilla, measure the ancilla. Outcome 0
/// applies R(α); outcome 1 applies R(−α) and leaves residual 2α. The
/// outcome-0 probability is exactly 1/2 for every input state.
inline AttemptOutcome attempt(const StateVector& data, int target, double alpha,
                              const OutcomeSource& source) {
  const std::vector<long>& dims = data.dims();
  if (target < 0 || static_cast<std::size_t>(target) >= dims.size() ||
      dims[static_cast<std::size_t>(target)] != 2) {
    throw std::invalid_argument("attempt: target is not a qubit factor");
  }
  long below = 1;  // product of dims after the target factor
  for (std::size_t k = static_cast<std::size_t>(target) + 1; k < dims.size(); ++k) below *= dims[k];

  const Complex anc0 = std::polar(1.0 / std::numbers::sqrt2, alpha / 2.0);
  const Complex anc1 = std::polar(1.0 / std::numbers::sqrt2, -alpha / 2.0);

  // Joint amplitudes with the ancilla fastest: joint(2x + a). CNOT swaps the
  // ancilla pair wherever the target bit of x is 1.
  const CVec& c = data.amplitudes();
  CVec joint(2 * c.size());
  for (long x = 0; x < c.size(); ++x) {
    const bool bit = (x / below) % 2 != 0;
    joint(2 * x) = c(x) * (bit ? anc1 : anc0);
    joint(2 * x + 1) = c(x) * (bit ? anc0 : anc1);
  }

  long double prob0 = 0.0L;
  for (long x = 0; x < c.size(); ++x) prob0 += static_cast<long double>(std::norm(joint(2 * x)));

  const int outcome = source(static_cast<double>(prob0));
  if (outcome != 0 && outcome != 1) {
    throw std::invalid_argument("attempt: outcome source must return 0 or 1");
  }
  const double branch =
      outcome == 0 ? static_cast<double>(prob0) : static_cast<double>(1.0L - prob0);
  if (branch <= 0.0) throw std::runtime_error("attempt: zero-probability branch selected");

  CVec post(c.size());
  const double renorm = 1.0 / std::sqrt(branch);
  for (long x = 0; x < c.size(); ++x) post(x) = joint(2 * x + outcome) * renorm;
  return AttemptOutcome{outcome, branch, StateVector(std::move(post), dims, data.roles()),
                        outcome == 0 ? 0.0 : 2.0 * alpha};
}

struct CascadeResult {
  StateVector final_state;
  bool success = false;
  int stages_used = 0;
  double applied_phase = 0.0;  // α on success, −(2^m − 1)α when every stage fails
  std::vector<int> outcomes;
};

/// Repeat-until-success cascade: attempt R(α); each failure doubles the
/// attempted phase. Stops at the first success or after `max_stages`.
inline CascadeResult cascade(const StateVector& data, int target, double alpha, int max_stages,
                             const OutcomeSource& source) {
  if (max_stages < 1 || max_stages > 62) {
    throw std::invalid_argument("cascade: stage count out of range");
  }
  CascadeResult result{data, false, 0, 0.0, {}};
  double stage_phase = alpha;
  for (int k = 0; k < max_stages; ++k) {
    AttemptOutcome a = attempt(result.final_state, target, stage_phase, source);
    result.final_state = std::move(a.post_state);
    result.outcomes.push_back(a.outcome_bit);
    result.stages_used = k + 1;
    if (a.outcome_bit == 0) {
      result.applied_phase += stage_phase;
      result.success = true;
      return result;
    }
    result.applied_phase -= stage_phase;
    stage_phase = a.residual_phase;
  }
  return result;
}

/// Success probability of the m-stage cascade summed over its outcome tree
/// (m success leaves 1…10 plus the all-fail leaf), using the branch
/// probabilities the attempts actually produce. Equals 1 − 2⁻ᵐ.
inline double success_probability_exact(int stages, double alpha = 1.0,
                                        const StateVector& probe = StateVector::qubit_basis(1, 0)) {
  if (stages < 1 || stages > 62) {
    throw std::invalid_argument("success_probability_exact: stage count out of range");
  }
  long double total = 0.0L;
  long double reach = 1.0L;  // probability of having failed every stage so far
  StateVector state = probe;
  double stage_phase = alpha;
  for (int k = 0; k < stages; ++k) {
    AttemptOutcome success_branch = attempt(state, 0, stage_phase, forced_bits({0}));
    total += reach * static_cast<long double>(success_branch.branch_probability);
    AttemptOutcome fail_branch = attempt(state, 0, stage_phase, forced_bits({1}));
    reach *= static_cast<long double>(fail_branch.branch_probability);
    state = std::move(fail_branch.post_state);
    stage_phase = fail_branch.residual_phase;
  }
  return static_cast<double>(total);
}

struct MonteCarloEstimate {
  double frequency = 0.0;
  double std_error = 0.0;  // √(p(1−p)/trials) at the theoretical p = 1 − 2⁻ᵐ
  long trials = 0;
};

/// Empirical cascade success frequency over independent seeded trials.
inline MonteCarloEstimate monte_carlo_success(double alpha, int stages, long trials,
                                              std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("monte_carlo_success: trials must be positive");
  CVec probe_amps(2);
  probe_amps(0) = std::cos(0.3);
  probe_amps(1) = std::polar(std::sin(0.3), 0.4);
  const StateVector probe(std::move(probe_amps), {2}, {FactorRole::DataQubit});

  long successes = 0;
  for (long t = 0; t < trials; ++t) {
    OutcomeSource source = seeded_sampler(split_seed(seed, static_cast<std::uint64_t>(t)));
    if (cascade(probe, 0, alpha, stages, source).success) ++successes;
  }
  const double p = 1.0 - std::ldexp(1.0, -stages);
  return MonteCarloEstimate{static_cast<double>(successes) / static_cast<double>(trials),
                            std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}

}  // namespace hqp
