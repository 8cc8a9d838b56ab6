#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pomg {

/// Joint index vectors, one entry per player.
using JointState = std::vector<int>;
using JointAction = std::vector<int>;
using JointObservation = std::vector<int>;

/// Thrown when an exact computation would enumerate more cells than allowed.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/**
 * Mixed-radix coder over per-player index spaces. Player 0 owns the most
 * significant digit, so joint tables are row-major in player order.
 */
class MixedRadix {
 public:
  MixedRadix() = default;
  explicit MixedRadix(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    total_ = 1;
    for (int s : sizes_) {
      if (s < 1) throw std::invalid_argument("MixedRadix: size < 1");
      total_ *= s;
      if (total_ > (1LL << 40)) throw BudgetExceeded("MixedRadix: joint space too large");
    }
  }

  std::int64_t total() const { return total_; }
  int size(int i) const { return sizes_[static_cast<std::size_t>(i)]; }
  int rank() const { return static_cast<int>(sizes_.size()); }

  std::int64_t encode(std::span<const int> digits) const {
    std::int64_t code = 0;
    for (int i = 0; i < rank(); ++i) code = code * sizes_[static_cast<std::size_t>(i)] + digits[static_cast<std::size_t>(i)];
    return code;
  }

  void decode(std::int64_t code, std::span<int> out) const {
    for (int i = rank() - 1; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = static_cast<int>(code % sizes_[static_cast<std::size_t>(i)]);
      code /= sizes_[static_cast<std::size_t>(i)];
    }
  }

  /// Odometer step over digit vectors; returns false after wrapping to zero.
  bool advance(std::span<int> digits) const {
    for (int i = rank() - 1; i >= 0; --i) {
      if (++digits[static_cast<std::size_t>(i)] < sizes_[static_cast<std::size_t>(i)]) return true;
      digits[static_cast<std::size_t>(i)] = 0;
    }
    return false;
  }

 private:
  std::vector<int> sizes_;
  std::int64_t total_ = 1;
};

/**
 * A decoupled partially observable Markov game.
 *
 * Per-player transition and observation kernels plus per-player joint-state
 * reward tables; the joint dynamics are the products of the stored factors,
 * so decoupledness holds by construction. All steps are 0-based in code.
 *
 * Timing at step h: observation o_h is emitted from s_h, each player acts on
 * its window of past (a, o) pairs, reward r_h(s_h, a_h) accrues, the pair
 * (a_h, o_h) joins the history, and the state moves through P_h.
 */
struct PomgModel {
  int num_players = 0;
  int horizon = 0;
  std::vector<int> state_sizes, action_sizes, obs_sizes;

  // transition[i][h] is row-major [s][a][s']
  std::vector<std::vector<std::vector<double>>> transition;
  // observation[i][h] is row-major [s][o]
  std::vector<std::vector<std::vector<double>>> observation;
  // reward[i][h] is row-major [joint_state][joint_action] (MixedRadix order)
  std::vector<std::vector<std::vector<double>>> reward;
  // init[i] is a distribution over player i's states
  std::vector<std::vector<double>> init;

  double trans_prob(int i, int h, int s, int a, int s_next) const {
    return transition[i_(i)][h_(h)][static_cast<std::size_t>((s * action_sizes[i_(i)] + a) * state_sizes[i_(i)] + s_next)];
  }
  std::span<const double> trans_row(int i, int h, int s, int a) const {
    const auto& t = transition[i_(i)][h_(h)];
    const int S = state_sizes[i_(i)];
    return {t.data() + static_cast<std::size_t>((s * action_sizes[i_(i)] + a) * S), static_cast<std::size_t>(S)};
  }
  double obs_prob(int i, int h, int s, int o) const {
    return observation[i_(i)][h_(h)][static_cast<std::size_t>(s * obs_sizes[i_(i)] + o)];
  }
  std::span<const double> obs_row(int i, int h, int s) const {
    const auto& t = observation[i_(i)][h_(h)];
    const int O = obs_sizes[i_(i)];
    return {t.data() + static_cast<std::size_t>(s * O), static_cast<std::size_t>(O)};
  }
  double reward_at(int i, int h, std::int64_t joint_s, std::int64_t joint_a) const {
    return reward[i_(i)][h_(h)][static_cast<std::size_t>(joint_s * joint_action_space().total() + joint_a)];
  }

  MixedRadix joint_state_space() const { return MixedRadix(state_sizes); }
  MixedRadix joint_action_space() const { return MixedRadix(action_sizes); }
  MixedRadix joint_obs_space() const { return MixedRadix(obs_sizes); }

 private:
  std::size_t i_(int i) const { return static_cast<std::size_t>(i); }
  std::size_t h_(int h) const { return static_cast<std::size_t>(h); }
};

struct ValidationIssue {
  std::string where;  // e.g. "transition player=1 step=2 row(s=0,a=1)"
  std::string what;   // e.g. "row sums to 0.9"
};

/// Report-style model check: empty result iff the model is well-formed.
/// Flags dimension mismatches, non-stochastic rows and out-of-range rewards.
std::vector<ValidationIssue> validate_model(const PomgModel& model);

/// Convenience: throws std::invalid_argument listing the first issues.
void require_valid(const PomgModel& model);

}  // namespace pomg
