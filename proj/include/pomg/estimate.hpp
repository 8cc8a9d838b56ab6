#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pomg/codec.hpp"
#include "pomg/sampler.hpp"

namespace pomg {

/// Dimensions of one player's local interface.
struct PlayerDims {
  int horizon = 0;
  int num_actions = 0;
  int num_obs = 0;
};

/**
 * Empirical window-transition frequencies P̂^m_{i,h}(w' | w, a). Counts are
 * kept per step and per (window, action, new observation); the successor
 * window is implied by the codec, so non-extension successors are zero by
 * shape. Unvisited (w, a) cells keep an all-zero row.
 */
struct TransitionEstimate {
  PlayerDims dims;
  WindowCodec codec;
  std::vector<std::vector<std::int64_t>> counts;  // [h][(w*A + a)*O + o]
  std::vector<std::vector<std::int64_t>> visits;  // [h][w*A + a]

  double p_hat(int h, int w, int a, int o) const {
    const auto v = visits[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * dims.num_actions + a)];
    if (v == 0) return 0.0;
    return static_cast<double>(counts[static_cast<std::size_t>(h)][static_cast<std::size_t>(
               (w * dims.num_actions + a) * dims.num_obs + o)]) /
           static_cast<double>(v);
  }
};

/// Empirical reward averages r̂^{m,π_{-i}}_{i,h}(w, a); zero where unvisited.
struct RewardEstimate {
  PlayerDims dims;
  WindowCodec codec;
  std::vector<std::vector<double>> sums;          // [h][w*A + a]
  std::vector<std::vector<std::int64_t>> visits;  // [h][w*A + a]

  double r_hat(int h, int w, int a) const {
    const auto v = visits[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * dims.num_actions + a)];
    if (v == 0) return 0.0;
    return sums[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * dims.num_actions + a)] /
           static_cast<double>(v);
  }
};

TransitionEstimate estimate_transitions(std::span<const PlayerView> views, const PlayerDims& dims,
                                        int window_len);
RewardEstimate estimate_rewards(std::span<const PlayerView> views, const PlayerDims& dims,
                                int window_len);

/// Both estimates from one batch of views.
struct ModelEstimate {
  TransitionEstimate transitions;
  RewardEstimate rewards;
};
ModelEstimate estimate_model(std::span<const PlayerView> views, const PlayerDims& dims,
                             int window_len);

/// Smallest visit count over step-consistent (h, w, a) cells.
std::int64_t min_visit_count(const TransitionEstimate& est, int window_len);

}  // namespace pomg
