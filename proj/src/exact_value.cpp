#include "pomg/exact_value.hpp"

#include <stdexcept>

namespace pomg {

PlayerChainResult player_chain_dp(const PomgModel& model, int player,
                                  const FiniteWindowPolicy& behavior) {
  const int H = model.horizon;
  const int S = model.state_sizes[static_cast<std::size_t>(player)];
  const int A = model.action_sizes[static_cast<std::size_t>(player)];
  const int O = model.obs_sizes[static_cast<std::size_t>(player)];
  const WindowCodec& codec = behavior.codec();
  const int W = codec.total();

  PlayerChainResult res;
  res.window_state.assign(static_cast<std::size_t>(H), std::vector<double>(static_cast<std::size_t>(W * S), 0.0));
  res.occupancy.assign(static_cast<std::size_t>(H), std::vector<double>(static_cast<std::size_t>(S * A), 0.0));
  res.window_marginal.assign(static_cast<std::size_t>(H), std::vector<double>(static_cast<std::size_t>(W), 0.0));
  res.state_marginal.assign(static_cast<std::size_t>(H), std::vector<double>(static_cast<std::size_t>(S), 0.0));

  // step 0: empty window (codec index 0), state from the initial distribution
  for (int s = 0; s < S; ++s)
    res.window_state[0][static_cast<std::size_t>(s)] = model.init[static_cast<std::size_t>(player)][static_cast<std::size_t>(s)];

  for (int h = 0; h < H; ++h) {
    auto& cur = res.window_state[static_cast<std::size_t>(h)];
    const int len = WindowCodec::length_at_step(h, codec.max_len());
    const int wb = codec.offset(len), we = codec.offset(len + 1);
    for (int w = wb; w < we; ++w) {
      for (int s = 0; s < S; ++s) {
        const double mass = cur[static_cast<std::size_t>(w * S + s)];
        if (mass == 0.0) continue;
        res.window_marginal[static_cast<std::size_t>(h)][static_cast<std::size_t>(w)] += mass;
        res.state_marginal[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)] += mass;
        for (int a = 0; a < A; ++a) {
          const double pa = behavior.prob(h, w, a);
          if (pa == 0.0) continue;
          res.occupancy[static_cast<std::size_t>(h)][static_cast<std::size_t>(s * A + a)] += mass * pa;
          if (h + 1 >= H) continue;
          auto& nxt = res.window_state[static_cast<std::size_t>(h + 1)];
          for (int o = 0; o < O; ++o) {
            const double po = model.obs_prob(player, h, s, o);
            if (po == 0.0) continue;
            const int w2 = codec.extend(w, a, o);
            const auto trow = model.trans_row(player, h, s, a);
            for (int s2 = 0; s2 < S; ++s2)
              nxt[static_cast<std::size_t>(w2 * S + s2)] += mass * pa * po * trow[static_cast<std::size_t>(s2)];
          }
        }
      }
    }
  }
  return res;
}

JointDpResult joint_chain_dp(const PomgModel& model, const PolicyProfile& profile,
                             const JointDpOptions& opts) {
  const int N = model.num_players;
  const int H = model.horizon;
  if (static_cast<int>(profile.players.size()) != N)
    throw std::invalid_argument("joint_chain_dp: profile/model player count mismatch");
  if (opts.stage_tables && static_cast<int>(opts.stage_tables->size()) != H)
    throw std::invalid_argument("joint_chain_dp: stage tables must have one table per step");

  const MixedRadix sspace = model.joint_state_space();
  const MixedRadix aspace = model.joint_action_space();
  const MixedRadix ospace = model.joint_obs_space();
  const std::int64_t SJ = sspace.total();
  const std::int64_t AJ = aspace.total();

  JointDpResult res;
  res.values.assign(static_cast<std::size_t>(N), 0.0);
  if (opts.want_state_visitation) {
    res.state_visitation.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
      res.state_visitation[static_cast<std::size_t>(i)].assign(
          static_cast<std::size_t>(H),
          std::vector<double>(static_cast<std::size_t>(model.state_sizes[static_cast<std::size_t>(i)]), 0.0));
  }
  if (opts.want_window_marginals) {
    res.window_marginals.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
      res.window_marginals[static_cast<std::size_t>(i)].assign(
          static_cast<std::size_t>(H),
          std::vector<double>(
              static_cast<std::size_t>(profile.players[static_cast<std::size_t>(i)].codec().total()), 0.0));
  }

  // Window block bounds per player per step; joint window space is the mixed
  // radix over block-local indices.
  auto window_space_at = [&](int h) {
    std::vector<int> counts(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
      const auto& codec = profile.players[static_cast<std::size_t>(i)].codec();
      counts[static_cast<std::size_t>(i)] =
          codec.count(WindowCodec::length_at_step(h, codec.max_len()));
    }
    return MixedRadix(counts);
  };

  MixedRadix wspace = window_space_at(0);
  if (SJ * wspace.total() > opts.budget)
    throw BudgetExceeded("joint_chain_dp: joint state-window space exceeds budget");

  // dist[w_joint * SJ + s_joint]
  std::vector<double> dist(static_cast<std::size_t>(wspace.total() * SJ), 0.0);
  {
    std::vector<int> s(static_cast<std::size_t>(N), 0);
    do {
      double p = 1.0;
      for (int i = 0; i < N; ++i) p *= model.init[static_cast<std::size_t>(i)][static_cast<std::size_t>(s[static_cast<std::size_t>(i)])];
      dist[static_cast<std::size_t>(sspace.encode(s))] = p;
    } while (sspace.advance(s));
  }

  std::vector<int> sdig(static_cast<std::size_t>(N)), adig(static_cast<std::size_t>(N)),
      odig(static_cast<std::size_t>(N)), wdig(static_cast<std::size_t>(N)), w2dig(static_cast<std::size_t>(N)),
      s2dig(static_cast<std::size_t>(N));

  for (int h = 0; h < H; ++h) {
    MixedRadix w2space = (h + 1 < H) ? window_space_at(h + 1) : MixedRadix(std::vector<int>(static_cast<std::size_t>(N), 1));
    if (h + 1 < H && SJ * w2space.total() > opts.budget)
      throw BudgetExceeded("joint_chain_dp: joint state-window space exceeds budget");
    std::vector<double> next;
    if (h + 1 < H) next.assign(static_cast<std::size_t>(w2space.total() * SJ), 0.0);

    std::vector<int> woff(static_cast<std::size_t>(N)), w2off(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
      const auto& codec = profile.players[static_cast<std::size_t>(i)].codec();
      woff[static_cast<std::size_t>(i)] = codec.offset(WindowCodec::length_at_step(h, codec.max_len()));
      w2off[static_cast<std::size_t>(i)] = codec.offset(WindowCodec::length_at_step(h + 1, codec.max_len()));
    }

    for (std::int64_t wj = 0; wj < wspace.total(); ++wj) {
      wspace.decode(wj, wdig);
      for (std::int64_t sj = 0; sj < SJ; ++sj) {
        const double mass = dist[static_cast<std::size_t>(wj * SJ + sj)];
        if (mass == 0.0) continue;
        sspace.decode(sj, sdig);
        if (opts.want_state_visitation || opts.want_window_marginals)
          for (int i = 0; i < N; ++i) {
            if (opts.want_state_visitation)
              res.state_visitation[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)]
                                  [static_cast<std::size_t>(sdig[static_cast<std::size_t>(i)])] += mass;
            if (opts.want_window_marginals)
              res.window_marginals[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)][static_cast<std::size_t>(
                  wdig[static_cast<std::size_t>(i)] + woff[static_cast<std::size_t>(i)])] += mass;
          }

        for (std::int64_t aj = 0; aj < AJ; ++aj) {
          aspace.decode(aj, adig);
          double pa = 1.0;
          for (int i = 0; i < N; ++i)
            pa *= profile.players[static_cast<std::size_t>(i)].prob(
                h, wdig[static_cast<std::size_t>(i)] + woff[static_cast<std::size_t>(i)], adig[static_cast<std::size_t>(i)]);
          if (pa == 0.0) continue;
          const double reach = mass * pa;
          for (int i = 0; i < N; ++i)
            res.values[static_cast<std::size_t>(i)] += reach * model.reward_at(i, h, sj, aj);
          if (opts.stage_tables)
            res.stage_value += reach * (*opts.stage_tables)[static_cast<std::size_t>(h)][static_cast<std::size_t>(
                                           sj * AJ + aj)];
          if (h + 1 >= H) continue;

          // observation branch, then per-player window extension and state move
          std::fill(odig.begin(), odig.end(), 0);
          do {
            double po = 1.0;
            for (int i = 0; i < N; ++i)
              po *= model.obs_prob(i, h, sdig[static_cast<std::size_t>(i)], odig[static_cast<std::size_t>(i)]);
            if (po == 0.0) continue;
            for (int i = 0; i < N; ++i) {
              const auto& codec = profile.players[static_cast<std::size_t>(i)].codec();
              w2dig[static_cast<std::size_t>(i)] =
                  codec.extend(wdig[static_cast<std::size_t>(i)] + woff[static_cast<std::size_t>(i)],
                               adig[static_cast<std::size_t>(i)], odig[static_cast<std::size_t>(i)]) -
                  w2off[static_cast<std::size_t>(i)];
            }
            const std::int64_t w2j = w2space.encode(w2dig);
            std::fill(s2dig.begin(), s2dig.end(), 0);
            do {
              double ps2 = 1.0;
              for (int i = 0; i < N; ++i)
                ps2 *= model.trans_prob(i, h, sdig[static_cast<std::size_t>(i)], adig[static_cast<std::size_t>(i)],
                                        s2dig[static_cast<std::size_t>(i)]);
              if (ps2 == 0.0) continue;
              next[static_cast<std::size_t>(w2j * SJ + sspace.encode(s2dig))] += reach * po * ps2;
            } while (sspace.advance(s2dig));
          } while (ospace.advance(odig));
        }
      }
    }
    if (h + 1 < H) {
      dist.swap(next);
      wspace = w2space;
    }
  }
  return res;
}

std::vector<double> exact_window_policy_value(const PomgModel& model, const PolicyProfile& profile,
                                              std::int64_t budget) {
  JointDpOptions opts;
  opts.budget = budget;
  return joint_chain_dp(model, profile, opts).values;
}

std::vector<std::vector<std::vector<double>>> state_visitation(const PomgModel& model,
                                                               const PolicyProfile& profile,
                                                               std::int64_t budget) {
  JointDpOptions opts;
  opts.budget = budget;
  opts.want_state_visitation = true;
  return joint_chain_dp(model, profile, opts).state_visitation;
}

double potential_value(const PomgModel& model, const PolicyProfile& profile,
                       const std::vector<std::vector<double>>& stage_tables, std::int64_t budget) {
  JointDpOptions opts;
  opts.budget = budget;
  opts.stage_tables = &stage_tables;
  return joint_chain_dp(model, profile, opts).stage_value;
}

}  // namespace pomg
