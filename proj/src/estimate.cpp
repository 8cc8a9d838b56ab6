#include "pomg/estimate.hpp"

#include <algorithm>
#include <stdexcept>

namespace pomg {

namespace {

void check_views(std::span<const PlayerView> views, const PlayerDims& dims) {
  for (const auto& v : views)
    if (static_cast<int>(v.actions.size()) != dims.horizon ||
        static_cast<int>(v.observations.size()) != dims.horizon ||
        static_cast<int>(v.rewards.size()) != dims.horizon)
      throw std::invalid_argument("estimate: episode view length != horizon");
}

}  // namespace

TransitionEstimate estimate_transitions(std::span<const PlayerView> views, const PlayerDims& dims,
                                        int window_len) {
  check_views(views, dims);
  TransitionEstimate est{dims, WindowCodec(dims.num_actions, dims.num_obs, window_len), {}, {}};
  const int W = est.codec.total();
  est.counts.assign(static_cast<std::size_t>(dims.horizon),
                    std::vector<std::int64_t>(static_cast<std::size_t>(W * dims.num_actions * dims.num_obs), 0));
  est.visits.assign(static_cast<std::size_t>(dims.horizon),
                    std::vector<std::int64_t>(static_cast<std::size_t>(W * dims.num_actions), 0));
  for (const auto& v : views) {
    int w = 0;
    for (int h = 0; h < dims.horizon; ++h) {
      const int a = v.actions[static_cast<std::size_t>(h)];
      const int o = v.observations[static_cast<std::size_t>(h)];
      est.visits[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * dims.num_actions + a)] += 1;
      est.counts[static_cast<std::size_t>(h)][static_cast<std::size_t>(
          (w * dims.num_actions + a) * dims.num_obs + o)] += 1;
      w = est.codec.extend(w, a, o);
    }
  }
  return est;
}

RewardEstimate estimate_rewards(std::span<const PlayerView> views, const PlayerDims& dims,
                                int window_len) {
  check_views(views, dims);
  RewardEstimate est{dims, WindowCodec(dims.num_actions, dims.num_obs, window_len), {}, {}};
  const int W = est.codec.total();
  est.sums.assign(static_cast<std::size_t>(dims.horizon),
                  std::vector<double>(static_cast<std::size_t>(W * dims.num_actions), 0.0));
  est.visits.assign(static_cast<std::size_t>(dims.horizon),
                    std::vector<std::int64_t>(static_cast<std::size_t>(W * dims.num_actions), 0));
  for (const auto& v : views) {
    int w = 0;
    for (int h = 0; h < dims.horizon; ++h) {
      const int a = v.actions[static_cast<std::size_t>(h)];
      est.sums[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * dims.num_actions + a)] +=
          v.rewards[static_cast<std::size_t>(h)];
      est.visits[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * dims.num_actions + a)] += 1;
      w = est.codec.extend(w, a, v.observations[static_cast<std::size_t>(h)]);
    }
  }
  return est;
}

ModelEstimate estimate_model(std::span<const PlayerView> views, const PlayerDims& dims,
                             int window_len) {
  return {estimate_transitions(views, dims, window_len),
          estimate_rewards(views, dims, window_len)};
}

std::int64_t min_visit_count(const TransitionEstimate& est, int window_len) {
  std::int64_t lo = -1;
  for (int h = 0; h < est.dims.horizon; ++h) {
    const int len = WindowCodec::length_at_step(h, window_len);
    const int wb = est.codec.offset(len), we = est.codec.offset(len + 1);
    for (int w = wb; w < we; ++w)
      for (int a = 0; a < est.dims.num_actions; ++a) {
        const auto v = est.visits[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * est.dims.num_actions + a)];
        lo = (lo < 0) ? v : std::min(lo, v);
      }
  }
  return lo < 0 ? 0 : lo;
}

}  // namespace pomg
