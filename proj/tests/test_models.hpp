#pragma once

// Hand-built fixtures shared by the test binaries.

#include <vector>

#include "pomg/model.hpp"
#include "pomg/policy.hpp"

namespace pomg::testing {

/// Model with every kernel row uniform and constant reward.
inline PomgModel uniform_model(int num_players, int horizon, int S, int A, int O,
                               double reward_value = 1.0) {
  PomgModel m;
  m.num_players = num_players;
  m.horizon = horizon;
  m.state_sizes.assign(static_cast<std::size_t>(num_players), S);
  m.action_sizes.assign(static_cast<std::size_t>(num_players), A);
  m.obs_sizes.assign(static_cast<std::size_t>(num_players), O);
  std::int64_t cells = 1;
  for (int i = 0; i < num_players; ++i) cells *= static_cast<std::int64_t>(S) * A;
  for (int i = 0; i < num_players; ++i) {
    m.transition.push_back(std::vector<std::vector<double>>(
        static_cast<std::size_t>(horizon),
        std::vector<double>(static_cast<std::size_t>(S * A * S), 1.0 / S)));
    m.observation.push_back(std::vector<std::vector<double>>(
        static_cast<std::size_t>(horizon),
        std::vector<double>(static_cast<std::size_t>(S * O), 1.0 / O)));
    m.reward.push_back(std::vector<std::vector<double>>(
        static_cast<std::size_t>(horizon),
        std::vector<double>(static_cast<std::size_t>(cells), reward_value)));
    m.init.push_back(std::vector<double>(static_cast<std::size_t>(S), 1.0 / S));
  }
  return m;
}

/// Single-player chain: P(stay) = stay, O(correct) = correct, uniform init.
inline PomgModel noisy_chain_model(int horizon, double stay = 0.9, double correct = 0.8,
                                   double reward_value = 0.5) {
  PomgModel m = uniform_model(1, horizon, 2, 2, 2, reward_value);
  for (int h = 0; h < horizon; ++h) {
    auto& t = m.transition[0][static_cast<std::size_t>(h)];
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        t[static_cast<std::size_t>((s * 2 + a) * 2 + s)] = stay;
        t[static_cast<std::size_t>((s * 2 + a) * 2 + (1 - s))] = 1.0 - stay;
      }
    auto& o = m.observation[0][static_cast<std::size_t>(h)];
    for (int s = 0; s < 2; ++s) {
      o[static_cast<std::size_t>(s * 2 + s)] = correct;
      o[static_cast<std::size_t>(s * 2 + (1 - s))] = 1.0 - correct;
    }
  }
  return m;
}

/// Everything deterministic: identity observations, action-driven moves
/// (next state = action), point-mass init at state 0. Reward is
/// (s_own + a_own) scaled into [0,1] so trajectories are distinguishable.
inline PomgModel deterministic_model(int num_players, int horizon, int S) {
  PomgModel m = uniform_model(num_players, horizon, S, S, S, 0.0);
  for (int i = 0; i < num_players; ++i) {
    for (int h = 0; h < horizon; ++h) {
      auto& t = m.transition[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
      std::fill(t.begin(), t.end(), 0.0);
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < S; ++a) t[static_cast<std::size_t>((s * S + a) * S + a)] = 1.0;
      auto& o = m.observation[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
      std::fill(o.begin(), o.end(), 0.0);
      for (int s = 0; s < S; ++s) o[static_cast<std::size_t>(s * S + s)] = 1.0;
    }
    auto& mu = m.init[static_cast<std::size_t>(i)];
    std::fill(mu.begin(), mu.end(), 0.0);
    mu[0] = 1.0;
  }
  const MixedRadix sspace = m.joint_state_space();
  const MixedRadix aspace = m.joint_action_space();
  std::vector<int> s(static_cast<std::size_t>(num_players)), a(static_cast<std::size_t>(num_players));
  for (int i = 0; i < num_players; ++i)
    for (int h = 0; h < horizon; ++h) {
      auto& r = m.reward[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
      for (std::int64_t sj = 0; sj < sspace.total(); ++sj) {
        sspace.decode(sj, s);
        for (std::int64_t aj = 0; aj < aspace.total(); ++aj) {
          aspace.decode(aj, a);
          r[static_cast<std::size_t>(sj * aspace.total() + aj)] =
              (s[static_cast<std::size_t>(i)] + a[static_cast<std::size_t>(i)]) /
              static_cast<double>(2 * (S - 1) > 0 ? 2 * (S - 1) : 1);
        }
      }
    }
  return m;
}

inline PolicyProfile uniform_profile(const PomgModel& m, int window_len) {
  PolicyProfile p{window_len, {}};
  for (int i = 0; i < m.num_players; ++i)
    p.players.push_back(FiniteWindowPolicy::uniform(
        m.horizon, m.action_sizes[static_cast<std::size_t>(i)],
        m.obs_sizes[static_cast<std::size_t>(i)], window_len));
  return p;
}

inline PolicyProfile random_profile(const PomgModel& m, int window_len, SeededRng& rng) {
  PolicyProfile p{window_len, {}};
  for (int i = 0; i < m.num_players; ++i)
    p.players.push_back(random_policy(m.horizon, m.action_sizes[static_cast<std::size_t>(i)],
                                      m.obs_sizes[static_cast<std::size_t>(i)], window_len, rng));
  return p;
}

}  // namespace pomg::testing
