#pragma once

#include <span>
#include <vector>

#include "pomg/codec.hpp"
#include "pomg/rng.hpp"

namespace pomg {

/// A truncated action-observation history owned by one player, as used when
/// acting at (0-based) `step`; pairs.size() must equal min(step, m).
struct HistoryWindow {
  int player = 0;
  int step = 0;
  std::vector<WindowPair> pairs;
};

/**
 * Per-step maps from encoded windows to action distributions (the class Π^m
 * for one player). Rows exist for every codec-enumerable window at every
 * step, including step-inconsistent ones; those extra rows are initialized
 * uniform and are never consulted by the dynamics.
 */
class FiniteWindowPolicy {
 public:
  FiniteWindowPolicy() = default;
  FiniteWindowPolicy(int horizon, int num_actions, int num_obs, int window_len);

  static FiniteWindowPolicy uniform(int horizon, int num_actions, int num_obs, int window_len) {
    return FiniteWindowPolicy(horizon, num_actions, num_obs, window_len);
  }

  int horizon() const { return horizon_; }
  int num_actions() const { return num_actions_; }
  int window_len() const { return codec_.max_len(); }
  const WindowCodec& codec() const { return codec_; }

  double prob(int h, int window, int action) const {
    return rows_[static_cast<std::size_t>(h)][static_cast<std::size_t>(window * num_actions_ + action)];
  }
  std::span<const double> row(int h, int window) const {
    return {rows_[static_cast<std::size_t>(h)].data() + static_cast<std::size_t>(window * num_actions_),
            static_cast<std::size_t>(num_actions_)};
  }
  void set_row(int h, int window, std::span<const double> row);

  std::vector<double>& table(int h) { return rows_[static_cast<std::size_t>(h)]; }
  const std::vector<double>& table(int h) const { return rows_[static_cast<std::size_t>(h)]; }

  /// True iff every stored row is a distribution within 1e-12.
  bool rows_are_distributions() const;

  friend bool operator==(const FiniteWindowPolicy&, const FiniteWindowPolicy&) = default;

 private:
  int horizon_ = 0;
  int num_actions_ = 0;
  WindowCodec codec_;
  std::vector<std::vector<double>> rows_;  // [h][window * A + a]
};

/// One finite-window policy per player, sharing a window length.
struct PolicyProfile {
  int window_len = 0;
  std::vector<FiniteWindowPolicy> players;

  friend bool operator==(const PolicyProfile&, const PolicyProfile&) = default;
};

/// ε-greedy mix: every row becomes eps/|A| + (1-eps)·row.
FiniteWindowPolicy mix_exploration(const FiniteWindowPolicy& policy, double eps);
PolicyProfile mix_exploration(const PolicyProfile& profile, double eps);

/// Lowest index among the maximizers of `values`.
int argmax_lowest(std::span<const double> values);

/// Smoothed policy-iteration row update:
/// (1-eta)·row + eta·indicator(argmax q), ties broken by lowest action index.
std::vector<double> soft_update(std::span<const double> policy_row, std::span<const double> q_row,
                                double eta);

/// Policy with independently random rows (normalized uniforms).
FiniteWindowPolicy random_policy(int horizon, int num_actions, int num_obs, int window_len,
                                 SeededRng& rng);

}  // namespace pomg
