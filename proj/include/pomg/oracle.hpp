#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pomg/estimate.hpp"
#include "pomg/exact_value.hpp"
#include "pomg/model.hpp"
#include "pomg/policy.hpp"
#include "pomg/superstate.hpp"

namespace pomg {

/// One verification line: a named inequality, its allowed bound and the
/// measured value.
struct CheckResult {
  std::string name;
  double bound = 0.0;
  double measured = 0.0;
  bool pass = false;
};

// ---------------------------------------------------------------------------
// Best responses and Nash gaps
// ---------------------------------------------------------------------------

struct BestResponseResult {
  double value = 0.0;
  FiniteWindowPolicy policy;
};

/// Optimal value of the marginalized MDP M^{π_{-i}} over Π^m via backward
/// Bellman optimality, with the greedy argmax policy (ties to lowest index).
BestResponseResult best_response_superstate(const SuperstateMdp& ss, const PolicyProfile& profile,
                                            int player);

/// max over full-history deviations Π^H_i of the true POMG value, holding the
/// opponents to their finite-window policies. Expectimax over player i's
/// action-observation tree; the belief over (joint state, opponents' windows)
/// is the sufficient statistic carried along the tree.
double best_response_full_history(const PomgModel& model, const PolicyProfile& profile, int player,
                                  std::int64_t budget = 10'000'000);

/// Per-player exploitability certificate. The window-class gap lives in the
/// superstate game (both sides measured by V^m); the history-class gap lives
/// in the POMG (both sides measured by V). The two coincide at m = H.
struct PlayerGap {
  double value_pomg = 0.0;        // V_i(π)
  double value_superstate = 0.0;  // V^m_i(π)
  double br_window = 0.0;         // max_{Π^m} V^m_i(·, π_{-i})
  double br_history = 0.0;        // max_{Π^H} V_i(·, π_{-i})
  double gap_window = 0.0;        // br_window - value_superstate
  double gap_history = 0.0;       // br_history - value_pomg
};

struct NashGapReport {
  int window_len = 0;
  std::vector<PlayerGap> players;
  double max_gap_window = 0.0;
  double max_gap_history = 0.0;
};

NashGapReport nash_gap(const SuperstateMdp& ss, const PolicyProfile& profile,
                       std::int64_t budget = 10'000'000);
NashGapReport nash_gap(const PomgModel& model, const PolicyProfile& profile,
                       std::int64_t budget = 10'000'000);

// ---------------------------------------------------------------------------
// Filter stability
// ---------------------------------------------------------------------------

struct StabilityEstimate {
  double rho_joint = 0.0;               // 1 - worst joint TV ratio, floored at 0
  std::vector<double> rho_per_player;   // same sweep per player
  std::vector<double> step_worst_ratio; // worst joint ratio per base step
  int horizon = 0;

  /// ε^m_ρ = 4 H² (1-ρ)^m at the measured joint rate.
  double eps_budget(int m) const;
};

/**
 * Exhaustive one-step contraction sweep. At every base step the candidate
 * belief set holds the posteriors of all valid histories together with every
 * window-restart belief (the filter re-seeded from the prior mid-stream);
 * those restarts are exactly the priors the finite-window comparisons use,
 * and including them can only lower ρ̂. Ratios with a base TV below 1e-12
 * are skipped; if nothing is measurable, beliefs have already collapsed and
 * ρ̂ = 1.
 */
StabilityEstimate measure_filter_stability(const PomgModel& model, int depth = -1,
                                           std::int64_t budget = 50'000'000);

/// Suffix contraction check: every pair of same-step beliefs whose
/// histories share an m-suffix has TV at most (1-ρ)^m. Window restarts count
/// as zero-length prefixes, so the b^m-vs-posterior comparison is included.
CheckResult belief_contraction_check(const PomgModel& model, int m, double rho, int depth = -1);

// ---------------------------------------------------------------------------
// Blended (estimator-limit) tables
// ---------------------------------------------------------------------------

/**
 * Exact limits of the empirical estimators under the true POMG law: window
 * transition frequencies and window-conditional rewards, both computed from
 * the exact (window, state) chain of the behavior profile. |P̂-P̃| is pure
 * sampling error; |P̃-P^m| is the finite-window truncation bias.
 */
struct BlendedTables {
  PlayerDims dims;
  WindowCodec codec;
  std::vector<std::vector<double>> p;        // [h][(w*A + a)*O + o]
  std::vector<std::vector<double>> r;        // [h][w*A + a]
  std::vector<std::vector<double>> reach_wa; // [h][w*A + a]: P(W_h = w, A_h = a)
};

BlendedTables blended_kernel(const PomgModel& model, const PolicyProfile& behavior, int player);

/// Kernel and reward bias checks against the superstate tables:
/// Σ_o |P̃ - P^m| ≤ 2(1-ρ)^m per reachable (w, a) row, and |r̃ - r^{m,π_{-i}}|
/// ≤ 2(1-ρ)^m per reachable cell.
std::vector<CheckResult> kernel_reward_bias_check(const SuperstateMdp& ss,
                                                  const PolicyProfile& profile, int player,
                                                  double rho);

// ---------------------------------------------------------------------------
// Potential structure
// ---------------------------------------------------------------------------

/// Stage potential tables φ_h(s, a) in reward layout, with the derived Φ.
struct PotentialSpec {
  std::vector<std::vector<double>> phi;  // [h][joint_s * A_joint + joint_a]

  double evaluate(const PomgModel& model, const PolicyProfile& profile,
                  std::int64_t budget = 10'000'000) const {
    return potential_value(model, profile, phi, budget);
  }
};

struct PotentialViolation {
  double max_violation = 0.0;
  std::string where;
};

/// Checks the statewise potential equation on all unilateral (s_i, a_i)
/// swaps for all players and steps; reports the largest violation.
PotentialViolation verify_statewise_potential(const PomgModel& model,
                                              const std::vector<std::vector<double>>& phi);

struct DeviationTriple {
  PolicyProfile profile;
  int player = 0;
  FiniteWindowPolicy alternative;
};

struct NearPotentialReport {
  double bound = 0.0;          // 2 ε^m_ρ
  double max_mismatch = 0.0;   // worst |ΔV^m - ΔΦ|
  double worst_utilization = 0.0;  // max_mismatch / bound (0 when bound is 0 and mismatch 0)
  bool pass = false;
};

/// Near-potential audit: for every unilateral deviation the superstate value
/// difference ΔV^m (joint superstate DP) must match the exact potential
/// difference ΔΦ (joint state-window DP) within 2 ε^m_ρ.
NearPotentialReport near_potential_audit(const PomgModel& model, const SuperstateMdp& ss,
                                         const PotentialSpec& phi,
                                         std::span<const DeviationTriple> deviations, double rho,
                                         std::int64_t budget = 10'000'000);

// ---------------------------------------------------------------------------
// Small oracles
// ---------------------------------------------------------------------------

/// Both sides of the symmetric pairwise-difference identity:
/// Σ p x - Σ q x  and  ½ ΣΣ (p_i q_j - p_j q_i)(x_i - x_j).
std::pair<double, double> pairwise_identity(std::span<const double> p, std::span<const double> q,
                                            std::span<const double> x);

/// V^m for all players by forward DP over the joint window chain with the
/// product kernel. Exponential in N; desk-scale oracle only.
std::vector<double> joint_superstate_values(const SuperstateMdp& ss, const PolicyProfile& profile,
                                            std::int64_t budget = 10'000'000);

}  // namespace pomg
