#pragma once

#include <cstdint>
#include <vector>

#include "pomg/model.hpp"
#include "pomg/policy.hpp"

namespace pomg {

/**
 * Exact forward law of one player's (window, state) pair under the true POMG
 * dynamics. The pair is Markov — the window is a function of the player's own
 * history and the player's state chain is decoupled — so everything a single
 * player can be asked about (occupancies, window frequencies, window-state
 * joints) falls out of one recursion.
 */
struct PlayerChainResult {
  // [h][w * S + s]: P(window_h = w, s_h = s); w is the global codec index,
  // rows outside the step's length block are zero.
  std::vector<std::vector<double>> window_state;
  // [h][s * A + a]: state-action occupancy λ_{i,h}
  std::vector<std::vector<double>> occupancy;
  // [h][w]: true window frequency
  std::vector<std::vector<double>> window_marginal;
  // [h][s]: latent state marginal d_{i,h}
  std::vector<std::vector<double>> state_marginal;
};

PlayerChainResult player_chain_dp(const PomgModel& model, int player,
                                  const FiniteWindowPolicy& behavior);

struct JointDpOptions {
  std::int64_t budget = 10'000'000;  // max joint (state, window) cells per step
  // Optional stage tables g_h(s, a) (same layout as rewards); their expected
  // sum under the trajectory law is returned in stage_value.
  const std::vector<std::vector<double>>* stage_tables = nullptr;
  bool want_state_visitation = false;
  bool want_window_marginals = false;
};

struct JointDpResult {
  std::vector<double> values;   // per-player V_i(π), exact
  double stage_value = 0.0;     // E[Σ_h g_h(s_h, a_h)] when stage_tables set
  std::vector<std::vector<std::vector<double>>> state_visitation;  // [i][h][s_i]
  std::vector<std::vector<std::vector<double>>> window_marginals;  // [i][h][w]
};

/**
 * Forward dynamic program over the joint chain (s_h, w_h). The pair is Markov
 * because observations depend only on s_h and actions only on windows; no
 * decoupledness shortcut is taken here, which keeps this engine usable as an
 * assumption-free reference for the factorized routes.
 */
JointDpResult joint_chain_dp(const PomgModel& model, const PolicyProfile& profile,
                             const JointDpOptions& opts = {});

/// Exact V_i(π) for a finite-window product profile, all players.
std::vector<double> exact_window_policy_value(const PomgModel& model, const PolicyProfile& profile,
                                              std::int64_t budget = 10'000'000);

/// Exact per-player per-step latent state marginals d^π_{i,h}.
std::vector<std::vector<std::vector<double>>> state_visitation(const PomgModel& model,
                                                               const PolicyProfile& profile,
                                                               std::int64_t budget = 10'000'000);

/// Φ(π) = E_π[Σ_h φ_h(s_h, a_h)] for arbitrary stage tables φ.
double potential_value(const PomgModel& model, const PolicyProfile& profile,
                       const std::vector<std::vector<double>>& stage_tables,
                       std::int64_t budget = 10'000'000);

}  // namespace pomg
