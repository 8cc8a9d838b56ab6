#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pomg/estimate.hpp"
#include "pomg/model.hpp"
#include "pomg/policy.hpp"
#include "pomg/superstate.hpp"

namespace pomg {

struct LearnerConfig {
  int iterations = 100;          // K
  int episodes_per_iter = 1000;  // T
  int window_len = 1;            // m
  double exploration_eps = 0.05;
  double stepsize_scale = 1.0;  // c in η^(k) = min(c / sqrt(4 N² H³ k), 1/2)
  std::uint64_t seed = 0;
  int eval_cadence = 0;  // 0 disables gap diagnostics
  int num_threads = 1;

  void validate() const;
};

/// η^(k) = min(c / sqrt(4 N² H³ k), 1/2); the clamp keeps the update inside
/// its (0,1) domain when k is small and c large.
double stepsize_schedule(int k, int num_players, int horizon, double scale);

/**
 * Common shape for the per-player window model fed to the backward Q
 * recursion, whether estimated from data or filled with exact superstate
 * quantities. Non-extension successors are zero by shape; unvisited rows are
 * all-zero.
 */
struct WindowModelTables {
  PlayerDims dims;
  WindowCodec codec;
  std::vector<std::vector<double>> p;  // [h][(w*A + a)*O + o]
  std::vector<std::vector<double>> r;  // [h][w*A + a]
};

WindowModelTables tables_from_estimates(const TransitionEstimate& transitions,
                                        const RewardEstimate& rewards);

/// Exact P^m_i and r^{m,π_{-i}}_i cast into the estimator table shape
/// (step-consistent rows filled, everything else zero).
WindowModelTables exact_window_tables(const SuperstateMdp& ss, const PolicyProfile& profile,
                                      int player);

/// Backward Q iteration: Q_{H} = 0 and
/// Q_h(w,a) = r_h(w,a) + Σ_{w'} P_h(w'|w,a) Σ_{a'} π_{h+1}(a'|w') Q_{h+1}(w',a'),
/// run over every window in H^{≤m}. Throws on NaN. Shape [h][w*A + a].
std::vector<std::vector<double>> backward_q(const WindowModelTables& tables,
                                            const FiniteWindowPolicy& policy);

struct IterationRecord {
  int k = 0;
  double eta = 0.0;
  std::vector<std::vector<std::vector<double>>> q_tables;  // [i][h][w*A + a]
  PolicyProfile policies;                                  // π^{(k+1)}
  std::int64_t episodes_consumed = 0;
  std::vector<double> value_estimates;  // empirical mean returns this iteration
  std::int64_t min_visit = 0;
  double gap = -1.0;  // diagnostic; negative when not evaluated
};

/// Optional diagnostic hook evaluated at the configured cadence.
using GapEvaluator = std::function<double(const PolicyProfile& profile, int k)>;

/**
 * Independent model-based soft policy iteration. Per iteration: mix in
 * ε-exploration, collect T episodes, estimate each player's window model
 * from that player's own views only, run the backward Q recursion against
 * the current policy, and smooth every row toward its greedy action.
 * Deterministic given the master seed, for any thread count.
 */
std::vector<IterationRecord> run_learning(const PomgModel& model, const LearnerConfig& config,
                                          const GapEvaluator& gap_eval = {});

}  // namespace pomg
