#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pomg/codec.hpp"
#include "pomg/model.hpp"
#include "pomg/policy.hpp"

namespace pomg {

/// Posterior over one player's latent state given a truncated window,
/// together with the unnormalized mass of the window under the filter.
struct WindowBelief {
  std::vector<double> probs;  // zeros when unreachable
  double mass = 0.0;          // normalization Z
  bool reachable = false;
};

struct SuperstateOptions {
  // Prior used to restart the filter at the window's first global step.
  // Empty means the model's initial distribution μ_i (the default).
  std::vector<std::vector<double>> prior_override;
};

/**
 * The per-player window belief: a forward Bayes filter over the window's
 * pairs, restarted from the prior at global step h - len(window). Each pair
 * (a, o) recorded at step g weights by O_{i,g}(o | s) and then propagates
 * through P_{i,g}(· | s, a), which reproduces the trajectory-marginalization
 * formula and collapses to the exact posterior while h <= m.
 */
WindowBelief window_belief(const PomgModel& model, int player, int h,
                           const std::vector<WindowPair>& pairs,
                           std::span<const double> prior = {});

/// Typed overload enforcing the window contract: length min(step, m) and
/// components inside the player's action/observation spaces.
WindowBelief window_belief(const PomgModel& model, const HistoryWindow& window, int window_len,
                           std::span<const double> prior = {});

/**
 * The superstate Markov game restricted to one player's factor: window
 * beliefs b^m_{i,h} and the kernel over successor windows. The kernel
 * assigns trunc_m(w ∘ (a, o)) the probability Σ_s O_{i,h}(o | s) b(s | w)
 * and every non-extension window probability zero. Rows of unreachable
 * windows fall back to uniform over admissible successors so downstream
 * recursions stay well defined; such rows carry no visitation mass.
 */
class SuperstateMdp {
 public:
  SuperstateMdp(PomgModel model, int window_len, SuperstateOptions opts = {});

  const PomgModel& model() const { return model_; }
  int window_len() const { return m_; }
  const WindowCodec& codec(int i) const { return codecs_[static_cast<std::size_t>(i)]; }

  /// Belief at a step-consistent window (global codec index).
  const WindowBelief& belief(int i, int h, int w) const;

  /// P^m_{i,h}(trunc(w ∘ (a, o)) | w, a); does not depend on a.
  double obs_margin(int i, int h, int w, int o) const;

  /// Successor window index trunc_m(w ∘ (a, o)).
  int successor(int i, int /*h*/, int w, int a, int o) const {
    return codecs_[static_cast<std::size_t>(i)].extend(w, a, o);
  }

  /// Full kernel entry with the zero case for non-extension successors.
  double kernel_prob(int i, int h, int w, int a, int w_next) const;

  /// First/last+1 global window index consistent with acting at step h.
  int block_begin(int i, int h) const;
  int block_end(int i, int h) const;

 private:
  PomgModel model_;
  int m_ = 0;
  SuperstateOptions opts_;
  std::vector<WindowCodec> codecs_;
  // beliefs_[i][h][w - block_begin]
  std::vector<std::vector<std::vector<WindowBelief>>> beliefs_;
  // obs_margin_[i][h][(w - block_begin) * O + o]
  std::vector<std::vector<std::vector<double>>> obs_margin_;
};

/// Expected reward r^m_{i,h}(w, a) of `player` under the product of window
/// beliefs, for step-consistent joint windows. Throws if a window component
/// is unreachable.
double superstate_reward(const SuperstateMdp& ss, int h, std::span<const int> windows,
                         std::span<const int> actions, int player);

/// Surrogate-chain window visitation d^{m,π}_{i,h} under P^m_i and π_i:
/// [h][w] over global window indices. This is deliberately the law of the
/// superstate chain, not the true POMG window frequency.
std::vector<std::vector<double>> window_visitation(const SuperstateMdp& ss,
                                                   const FiniteWindowPolicy& policy, int player);

/// Marginalized MDP reward r^{m,π_{-i}}_{i,h}(w_i, a_i): opponents' windows
/// drawn from their surrogate visitations, actions from their policies.
/// Shape [h][w * A + a], zero on step-inconsistent rows.
std::vector<std::vector<double>> marginal_reward(const SuperstateMdp& ss,
                                                 const PolicyProfile& profile, int player);

/// Ground-truth Q̄^{m,π}_{i,h} of the marginalized MDP via backward recursion;
/// the ε_Q = 0 reference for the learner. Shape [h][w * A + a].
std::vector<std::vector<double>> exact_marginal_q(const SuperstateMdp& ss,
                                                  const PolicyProfile& profile, int player);

/// Policy value in the marginalized MDP, Σ_a π_{i,0}(a | ∅) Q̄_{i,0}(∅, a);
/// equals V^m_i(π) for the full profile.
double marginal_policy_value(const SuperstateMdp& ss, const PolicyProfile& profile, int player);

}  // namespace pomg
