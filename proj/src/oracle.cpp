#include "pomg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

namespace pomg {

namespace {

double tv_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return 0.5 * s;
}

// Quantized key for belief deduplication.
std::vector<std::int64_t> belief_key(std::span<const double> probs) {
  std::vector<std::int64_t> key(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k)
    key[k] = static_cast<std::int64_t>(std::llround(probs[k] * 1e12));
  return key;
}

struct FilteredBelief {
  std::vector<double> probs;
  double mass = 0.0;
};

// One joint filter update at step t: weight by Π_i O_{i,t}(o_i | s_i), then
// propagate through the product transition with joint action a.
FilteredBelief joint_filter_step(const PomgModel& model, int t, std::span<const double> belief,
                                 std::span<const int> action, std::span<const int> obs) {
  const MixedRadix sspace = model.joint_state_space();
  const int N = model.num_players;
  const std::int64_t SJ = sspace.total();
  std::vector<double> weighted(static_cast<std::size_t>(SJ), 0.0);
  std::vector<int> sdig(static_cast<std::size_t>(N));
  for (std::int64_t sj = 0; sj < SJ; ++sj) {
    double w = belief[static_cast<std::size_t>(sj)];
    if (w == 0.0) continue;
    sspace.decode(sj, sdig);
    for (int i = 0; i < N; ++i)
      w *= model.obs_prob(i, t, sdig[static_cast<std::size_t>(i)], obs[static_cast<std::size_t>(i)]);
    weighted[static_cast<std::size_t>(sj)] = w;
  }
  FilteredBelief out;
  out.probs.assign(static_cast<std::size_t>(SJ), 0.0);
  std::vector<int> s2dig(static_cast<std::size_t>(N));
  for (std::int64_t sj = 0; sj < SJ; ++sj) {
    const double w = weighted[static_cast<std::size_t>(sj)];
    if (w == 0.0) continue;
    sspace.decode(sj, sdig);
    std::fill(s2dig.begin(), s2dig.end(), 0);
    do {
      double p = w;
      for (int i = 0; i < N; ++i)
        p *= model.trans_prob(i, t, sdig[static_cast<std::size_t>(i)], action[static_cast<std::size_t>(i)],
                              s2dig[static_cast<std::size_t>(i)]);
      if (p != 0.0) out.probs[static_cast<std::size_t>(sspace.encode(s2dig))] += p;
    } while (sspace.advance(s2dig));
  }
  for (double p : out.probs) out.mass += p;
  if (out.mass > 0.0)
    for (double& p : out.probs) p /= out.mass;
  return out;
}

// All reachable beliefs of one player at step t, from histories of every
// length 0..t (length < t are the window restarts). Deduplicated.
std::vector<std::vector<double>> player_belief_family(const PomgModel& model, int player, int t) {
  const int A = model.action_sizes[static_cast<std::size_t>(player)];
  const int O = model.obs_sizes[static_cast<std::size_t>(player)];
  const WindowCodec codec(A, O, t);
  std::map<std::vector<std::int64_t>, std::vector<double>> dedup;
  for (int len = 0; len <= t; ++len)
    for (int w = codec.offset(len); w < codec.offset(len + 1); ++w) {
      const WindowBelief b = window_belief(model, player, t, codec.decode(w));
      if (!b.reachable) continue;
      dedup.emplace(belief_key(b.probs), b.probs);
    }
  std::vector<std::vector<double>> out;
  out.reserve(dedup.size());
  for (auto& [key, probs] : dedup) out.push_back(std::move(probs));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Best responses
// ---------------------------------------------------------------------------

BestResponseResult best_response_superstate(const SuperstateMdp& ss, const PolicyProfile& profile,
                                            int player) {
  const PomgModel& model = ss.model();
  const int H = model.horizon;
  const int A = model.action_sizes[static_cast<std::size_t>(player)];
  const int O = model.obs_sizes[static_cast<std::size_t>(player)];
  const WindowCodec& codec = ss.codec(player);

  const auto r = marginal_reward(ss, profile, player);
  FiniteWindowPolicy greedy = FiniteWindowPolicy::uniform(H, A, O, ss.window_len());
  std::vector<std::vector<double>> vopt(static_cast<std::size_t>(H + 1),
                                        std::vector<double>(static_cast<std::size_t>(codec.total()), 0.0));
  std::vector<double> row(static_cast<std::size_t>(A));
  for (int h = H - 1; h >= 0; --h) {
    const int wb = ss.block_begin(player, h), we = ss.block_end(player, h);
    for (int w = wb; w < we; ++w) {
      double best = 0.0;
      int best_a = 0;
      for (int a = 0; a < A; ++a) {
        double q = r[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * A + a)];
        if (h + 1 < H)
          for (int o = 0; o < O; ++o) {
            const double po = ss.obs_margin(player, h, w, o);
            if (po == 0.0) continue;
            q += po * vopt[static_cast<std::size_t>(h + 1)][static_cast<std::size_t>(ss.successor(player, h, w, a, o))];
          }
        if (a == 0 || q > best) {
          best = q;
          best_a = a;
        }
      }
      vopt[static_cast<std::size_t>(h)][static_cast<std::size_t>(w)] = best;
      std::fill(row.begin(), row.end(), 0.0);
      row[static_cast<std::size_t>(best_a)] = 1.0;
      greedy.set_row(h, w, row);
    }
  }
  return {vopt[0][0], std::move(greedy)};
}

double best_response_full_history(const PomgModel& model, const PolicyProfile& profile, int player,
                                  std::int64_t budget) {
  const int N = model.num_players;
  const int H = model.horizon;
  const int A = model.action_sizes[static_cast<std::size_t>(player)];
  const int O = model.obs_sizes[static_cast<std::size_t>(player)];

  std::int64_t tree = 1;
  for (int h = 0; h < H; ++h) {
    tree *= static_cast<std::int64_t>(A) * O;
    if (tree > budget) throw BudgetExceeded("best_response_full_history: tree exceeds budget");
  }

  std::vector<int> opp;
  for (int j = 0; j < N; ++j)
    if (j != player) opp.push_back(j);

  std::int64_t belief_cells = model.joint_state_space().total();
  for (int j : opp) {
    const auto& c = profile.players[static_cast<std::size_t>(j)].codec();
    belief_cells *= c.count(c.max_len());
    if (belief_cells > budget)
      throw BudgetExceeded("best_response_full_history: belief table exceeds budget");
  }

  const MixedRadix sspace = model.joint_state_space();
  const MixedRadix aspace_full = model.joint_action_space();
  const std::int64_t SJ = sspace.total();

  auto opp_sizes = [&](auto&& pick) {
    std::vector<int> v;
    v.reserve(opp.size());
    for (int j : opp) v.push_back(pick(j));
    return v;
  };
  const MixedRadix oppA = MixedRadix(opp_sizes([&](int j) { return model.action_sizes[static_cast<std::size_t>(j)]; }));
  const MixedRadix oppO = MixedRadix(opp_sizes([&](int j) { return model.obs_sizes[static_cast<std::size_t>(j)]; }));

  auto opp_wspace = [&](int h) {
    return MixedRadix(opp_sizes([&](int j) {
      const auto& c = profile.players[static_cast<std::size_t>(j)].codec();
      return c.count(WindowCodec::length_at_step(h, c.max_len()));
    }));
  };
  auto opp_woff = [&](int h) {
    return opp_sizes([&](int j) {
      const auto& c = profile.players[static_cast<std::size_t>(j)].codec();
      return c.offset(WindowCodec::length_at_step(h, c.max_len()));
    });
  };

  std::vector<int> sdig(static_cast<std::size_t>(N)), s2dig(static_cast<std::size_t>(N)),
      adig(static_cast<std::size_t>(N)), wdig(static_cast<std::size_t>(opp.size())),
      w2dig(static_cast<std::size_t>(opp.size())), aodig(static_cast<std::size_t>(opp.size())),
      oodig(static_cast<std::size_t>(opp.size()));

  // Belief over (joint state, opponents' windows), normalized at each node.
  std::function<double(int, const std::vector<double>&)> solve =
      [&](int h, const std::vector<double>& belief) -> double {
    if (h >= H) return 0.0;
    const MixedRadix wsp = opp_wspace(h);
    const MixedRadix w2sp = opp_wspace(h + 1);
    const auto woff = opp_woff(h);
    const auto w2off = opp_woff(h + 1);
    const std::int64_t cells2 = SJ * w2sp.total();

    double best = 0.0;
    for (int ai = 0; ai < A; ++ai) {
      double imm = 0.0;
      std::vector<std::vector<double>> branch(
          static_cast<std::size_t>(O), std::vector<double>(static_cast<std::size_t>(cells2), 0.0));
      std::vector<double> branch_mass(static_cast<std::size_t>(O), 0.0);

      for (std::int64_t wj = 0; wj < wsp.total(); ++wj) {
        wsp.decode(wj, wdig);
        for (std::int64_t sj = 0; sj < SJ; ++sj) {
          const double mass = belief[static_cast<std::size_t>(wj * SJ + sj)];
          if (mass == 0.0) continue;
          sspace.decode(sj, sdig);

          std::fill(aodig.begin(), aodig.end(), 0);
          do {
            double pa = 1.0;
            for (std::size_t k = 0; k < opp.size(); ++k)
              pa *= profile.players[static_cast<std::size_t>(opp[k])].prob(
                  h, wdig[k] + woff[k], aodig[k]);
            if (pa == 0.0) continue;
            for (int i2 = 0; i2 < N; ++i2) adig[static_cast<std::size_t>(i2)] = 0;
            adig[static_cast<std::size_t>(player)] = ai;
            for (std::size_t k = 0; k < opp.size(); ++k) adig[static_cast<std::size_t>(opp[k])] = aodig[k];
            const std::int64_t aj = aspace_full.encode(adig);
            imm += mass * pa * model.reward_at(player, h, sj, aj);
            if (h + 1 >= H) continue;

            for (int oi = 0; oi < O; ++oi) {
              const double poi = model.obs_prob(player, h, sdig[static_cast<std::size_t>(player)], oi);
              if (poi == 0.0) continue;
              std::fill(oodig.begin(), oodig.end(), 0);
              do {
                double po = 1.0;
                for (std::size_t k = 0; k < opp.size(); ++k)
                  po *= model.obs_prob(opp[k], h, sdig[static_cast<std::size_t>(opp[k])], oodig[k]);
                if (po == 0.0) continue;
                for (std::size_t k = 0; k < opp.size(); ++k) {
                  const auto& c = profile.players[static_cast<std::size_t>(opp[k])].codec();
                  w2dig[k] = c.extend(wdig[k] + woff[k], aodig[k], oodig[k]) - w2off[k];
                }
                const std::int64_t w2j = w2sp.encode(w2dig);
                std::fill(s2dig.begin(), s2dig.end(), 0);
                do {
                  double ps2 = 1.0;
                  for (int i2 = 0; i2 < N; ++i2)
                    ps2 *= model.trans_prob(i2, h, sdig[static_cast<std::size_t>(i2)],
                                            adig[static_cast<std::size_t>(i2)], s2dig[static_cast<std::size_t>(i2)]);
                  if (ps2 == 0.0) continue;
                  branch[static_cast<std::size_t>(oi)][static_cast<std::size_t>(
                      w2j * SJ + sspace.encode(s2dig))] += mass * pa * poi * po * ps2;
                } while (sspace.advance(s2dig));
              } while (oodig.empty() ? false : oppO.advance(oodig));
            }
          } while (aodig.empty() ? false : oppA.advance(aodig));
        }
      }

      double val = imm;
      if (h + 1 < H) {
        for (int oi = 0; oi < O; ++oi) {
          double& bm = branch_mass[static_cast<std::size_t>(oi)];
          for (double p : branch[static_cast<std::size_t>(oi)]) bm += p;
          if (bm == 0.0) continue;
          for (double& p : branch[static_cast<std::size_t>(oi)]) p /= bm;
          val += bm * solve(h + 1, branch[static_cast<std::size_t>(oi)]);
        }
      }
      if (ai == 0 || val > best) best = val;
    }
    return best;
  };

  // Root belief: product of initial distributions; opponents' windows empty.
  std::vector<double> root(static_cast<std::size_t>(SJ), 0.0);
  {
    std::vector<int> s(static_cast<std::size_t>(N), 0);
    do {
      double p = 1.0;
      for (int i2 = 0; i2 < N; ++i2)
        p *= model.init[static_cast<std::size_t>(i2)][static_cast<std::size_t>(s[static_cast<std::size_t>(i2)])];
      root[static_cast<std::size_t>(sspace.encode(s))] = p;
    } while (sspace.advance(s));
  }
  return solve(0, root);
}

// ---------------------------------------------------------------------------
// Nash gap
// ---------------------------------------------------------------------------

NashGapReport nash_gap(const SuperstateMdp& ss, const PolicyProfile& profile, std::int64_t budget) {
  const PomgModel& model = ss.model();
  NashGapReport report;
  report.window_len = ss.window_len();
  const auto v_pomg = exact_window_policy_value(model, profile, budget);
  for (int i = 0; i < model.num_players; ++i) {
    PlayerGap g;
    g.value_pomg = v_pomg[static_cast<std::size_t>(i)];
    g.value_superstate = marginal_policy_value(ss, profile, i);
    g.br_window = best_response_superstate(ss, profile, i).value;
    g.br_history = best_response_full_history(model, profile, i, budget);
    g.gap_window = g.br_window - g.value_superstate;
    g.gap_history = g.br_history - g.value_pomg;
    report.max_gap_window = std::max(report.max_gap_window, g.gap_window);
    report.max_gap_history = std::max(report.max_gap_history, g.gap_history);
    report.players.push_back(g);
  }
  return report;
}

NashGapReport nash_gap(const PomgModel& model, const PolicyProfile& profile, std::int64_t budget) {
  SuperstateMdp ss(model, profile.window_len);
  return nash_gap(ss, profile, budget);
}

// ---------------------------------------------------------------------------
// Filter stability
// ---------------------------------------------------------------------------

double StabilityEstimate::eps_budget(int m) const {
  return 4.0 * horizon * horizon * std::pow(1.0 - rho_joint, m);
}

StabilityEstimate measure_filter_stability(const PomgModel& model, int depth, std::int64_t budget) {
  require_valid(model);
  const int N = model.num_players;
  const int H = model.horizon;
  if (depth < 0) depth = H;
  depth = std::min(depth, H);

  const MixedRadix sspace = model.joint_state_space();
  const MixedRadix aspace = model.joint_action_space();
  const MixedRadix ospace = model.joint_obs_space();
  const std::int64_t SJ = sspace.total();

  StabilityEstimate est;
  est.horizon = H;
  est.step_worst_ratio.assign(static_cast<std::size_t>(depth), 0.0);
  est.rho_per_player.assign(static_cast<std::size_t>(N), 1.0);

  std::vector<double> per_player_worst(static_cast<std::size_t>(N), 0.0);
  double joint_worst = 0.0;
  bool joint_any = false;
  std::vector<bool> player_any(static_cast<std::size_t>(N), false);
  std::int64_t work = 0;

  std::vector<int> adig(static_cast<std::size_t>(N)), odig(static_cast<std::size_t>(N));

  for (int t = 0; t < depth; ++t) {
    // Per-player families and their one-step updates.
    std::vector<std::vector<std::vector<double>>> fam(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) fam[static_cast<std::size_t>(i)] = player_belief_family(model, i, t);

    // Per-player contraction sweep.
    for (int i = 0; i < N; ++i) {
      const auto& beliefs = fam[static_cast<std::size_t>(i)];
      const int S = model.state_sizes[static_cast<std::size_t>(i)];
      const int A = model.action_sizes[static_cast<std::size_t>(i)];
      const int O = model.obs_sizes[static_cast<std::size_t>(i)];
      // updates[b][a*O+o]
      std::vector<std::vector<FilteredBelief>> updates(beliefs.size());
      for (std::size_t b = 0; b < beliefs.size(); ++b) {
        updates[b].resize(static_cast<std::size_t>(A * O));
        for (int a = 0; a < A; ++a)
          for (int o = 0; o < O; ++o) {
            FilteredBelief fb;
            fb.probs.assign(static_cast<std::size_t>(S), 0.0);
            for (int s = 0; s < S; ++s) {
              const double w = beliefs[b][static_cast<std::size_t>(s)] * model.obs_prob(i, t, s, o);
              if (w == 0.0) continue;
              const auto trow = model.trans_row(i, t, s, a);
              for (int s2 = 0; s2 < S; ++s2) fb.probs[static_cast<std::size_t>(s2)] += w * trow[static_cast<std::size_t>(s2)];
            }
            for (double p : fb.probs) fb.mass += p;
            if (fb.mass > 0.0)
              for (double& p : fb.probs) p /= fb.mass;
            updates[b][static_cast<std::size_t>(a * O + o)] = std::move(fb);
          }
      }
      for (std::size_t b1 = 0; b1 < beliefs.size(); ++b1)
        for (std::size_t b2 = b1 + 1; b2 < beliefs.size(); ++b2) {
          const double tv0 = tv_distance(beliefs[b1], beliefs[b2]);
          if (tv0 <= 1e-12) continue;
          for (int ao = 0; ao < A * O; ++ao) {
            const auto& u1 = updates[b1][static_cast<std::size_t>(ao)];
            const auto& u2 = updates[b2][static_cast<std::size_t>(ao)];
            if (u1.mass == 0.0 || u2.mass == 0.0) continue;
            const double ratio = tv_distance(u1.probs, u2.probs) / tv0;
            per_player_worst[static_cast<std::size_t>(i)] =
                std::max(per_player_worst[static_cast<std::size_t>(i)], ratio);
            player_any[static_cast<std::size_t>(i)] = true;
          }
          work += A * O;
          if (work > budget) throw BudgetExceeded("measure_filter_stability: budget exceeded");
        }
    }

    // Joint sweep over products of per-player family members.
    std::vector<std::vector<double>> joint;
    {
      std::map<std::vector<std::int64_t>, std::size_t> seen;
      std::vector<int> counts(static_cast<std::size_t>(N));
      for (int i = 0; i < N; ++i) counts[static_cast<std::size_t>(i)] = static_cast<int>(fam[static_cast<std::size_t>(i)].size());
      MixedRadix picks(counts);
      std::vector<int> pick(static_cast<std::size_t>(N), 0);
      std::vector<int> sdig(static_cast<std::size_t>(N));
      do {
        std::vector<double> prod(static_cast<std::size_t>(SJ), 0.0);
        for (std::int64_t sj = 0; sj < SJ; ++sj) {
          sspace.decode(sj, sdig);
          double p = 1.0;
          for (int i = 0; i < N; ++i)
            p *= fam[static_cast<std::size_t>(i)][static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])]
                    [static_cast<std::size_t>(sdig[static_cast<std::size_t>(i)])];
          prod[static_cast<std::size_t>(sj)] = p;
        }
        if (seen.emplace(belief_key(prod), joint.size()).second) joint.push_back(std::move(prod));
      } while (picks.advance(pick));
    }

    const std::int64_t ao_total = aspace.total() * ospace.total();
    work += static_cast<std::int64_t>(joint.size()) * static_cast<std::int64_t>(joint.size()) * ao_total;
    if (work > budget) throw BudgetExceeded("measure_filter_stability: budget exceeded");

    // Precompute joint one-step updates.
    std::vector<std::vector<FilteredBelief>> jupd(joint.size());
    for (std::size_t b = 0; b < joint.size(); ++b) {
      jupd[b].reserve(static_cast<std::size_t>(ao_total));
      std::fill(adig.begin(), adig.end(), 0);
      do {
        std::fill(odig.begin(), odig.end(), 0);
        do {
          jupd[b].push_back(joint_filter_step(model, t, joint[b], adig, odig));
        } while (ospace.advance(odig));
      } while (aspace.advance(adig));
    }

    double step_worst = 0.0;
    for (std::size_t b1 = 0; b1 < joint.size(); ++b1)
      for (std::size_t b2 = b1 + 1; b2 < joint.size(); ++b2) {
        const double tv0 = tv_distance(joint[b1], joint[b2]);
        if (tv0 <= 1e-12) continue;
        for (std::size_t ao = 0; ao < jupd[b1].size(); ++ao) {
          const auto& u1 = jupd[b1][ao];
          const auto& u2 = jupd[b2][ao];
          if (u1.mass == 0.0 || u2.mass == 0.0) continue;
          const double ratio = tv_distance(u1.probs, u2.probs) / tv0;
          step_worst = std::max(step_worst, ratio);
          joint_any = true;
        }
      }
    est.step_worst_ratio[static_cast<std::size_t>(t)] = step_worst;
    joint_worst = std::max(joint_worst, step_worst);
  }

  est.rho_joint = joint_any ? std::max(0.0, 1.0 - joint_worst) : 1.0;
  for (int i = 0; i < N; ++i)
    est.rho_per_player[static_cast<std::size_t>(i)] =
        player_any[static_cast<std::size_t>(i)]
            ? std::max(0.0, 1.0 - per_player_worst[static_cast<std::size_t>(i)])
            : 1.0;
  return est;
}

CheckResult belief_contraction_check(const PomgModel& model, int m, double rho, int depth) {
  const int N = model.num_players;
  const int H = model.horizon;
  if (depth < 0) depth = H - 1;
  depth = std::min(depth, H - 1);

  const MixedRadix sspace = model.joint_state_space();
  const std::int64_t SJ = sspace.total();
  double worst = 0.0;

  // Per player: suffix (last m pairs) -> beliefs of all consistent
  // histories, any step t in [m, depth] and any length m..t (the shorter
  // prefixes are exactly the window restarts). Pooling across steps covers
  // pairs of histories of different lengths sharing the m-suffix.
  std::vector<std::map<int, std::vector<std::vector<double>>>> groups(static_cast<std::size_t>(N));
  for (int t = m; t <= depth; ++t)
    for (int i = 0; i < N; ++i) {
      const int A = model.action_sizes[static_cast<std::size_t>(i)];
      const int O = model.obs_sizes[static_cast<std::size_t>(i)];
      const WindowCodec codec(A, O, t);
      const WindowCodec suffix_codec(A, O, m);
      for (int len = m; len <= t; ++len)
        for (int w = codec.offset(len); w < codec.offset(len + 1); ++w) {
          const auto pairs = codec.decode(w);
          const WindowBelief b = window_belief(model, i, t, pairs);
          if (!b.reachable) continue;
          const std::vector<WindowPair> suffix(pairs.end() - m, pairs.end());
          groups[static_cast<std::size_t>(i)][suffix_codec.encode(suffix)].push_back(b.probs);
        }
    }

  // Joint groups are products over per-player same-suffix groups.
  std::vector<std::vector<int>> suffix_keys(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    for (const auto& [key, list] : groups[static_cast<std::size_t>(i)])
      suffix_keys[static_cast<std::size_t>(i)].push_back(key);

  std::vector<int> counts(static_cast<std::size_t>(N));
  bool empty = false;
  for (int i = 0; i < N; ++i) {
    counts[static_cast<std::size_t>(i)] = static_cast<int>(suffix_keys[static_cast<std::size_t>(i)].size());
    empty = empty || counts[static_cast<std::size_t>(i)] == 0;
  }
  std::vector<int> sdig(static_cast<std::size_t>(N));
  if (!empty) {
    MixedRadix combos(counts);
    std::vector<int> combo(static_cast<std::size_t>(N), 0);
    do {
      std::vector<const std::vector<std::vector<double>>*> lists(static_cast<std::size_t>(N));
      std::vector<int> sizes(static_cast<std::size_t>(N));
      for (int i = 0; i < N; ++i) {
        lists[static_cast<std::size_t>(i)] = &groups[static_cast<std::size_t>(i)].at(
            suffix_keys[static_cast<std::size_t>(i)][static_cast<std::size_t>(combo[static_cast<std::size_t>(i)])]);
        sizes[static_cast<std::size_t>(i)] = static_cast<int>(lists[static_cast<std::size_t>(i)]->size());
      }
      MixedRadix members(sizes);
      std::vector<std::vector<double>> prods;
      prods.reserve(static_cast<std::size_t>(members.total()));
      std::vector<int> pick(static_cast<std::size_t>(N), 0);
      do {
        std::vector<double> prod(static_cast<std::size_t>(SJ));
        for (std::int64_t sj = 0; sj < SJ; ++sj) {
          sspace.decode(sj, sdig);
          double p = 1.0;
          for (int i = 0; i < N; ++i)
            p *= (*lists[static_cast<std::size_t>(i)])[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])]
                    [static_cast<std::size_t>(sdig[static_cast<std::size_t>(i)])];
          prod[static_cast<std::size_t>(sj)] = p;
        }
        prods.push_back(std::move(prod));
      } while (members.advance(pick));
      for (std::size_t b1 = 0; b1 < prods.size(); ++b1)
        for (std::size_t b2 = b1 + 1; b2 < prods.size(); ++b2)
          worst = std::max(worst, tv_distance(prods[b1], prods[b2]));
    } while (combos.advance(combo));
  }

  CheckResult res;
  res.name = "belief-contraction m=" + std::to_string(m);
  res.bound = std::pow(1.0 - rho, m);
  res.measured = worst;
  res.pass = res.measured <= res.bound + 1e-12;
  return res;
}

// ---------------------------------------------------------------------------
// Blended tables and bias checks
// ---------------------------------------------------------------------------

BlendedTables blended_kernel(const PomgModel& model, const PolicyProfile& behavior, int player) {
  require_valid(model);
  const int N = model.num_players;
  const int H = model.horizon;
  const int S = model.state_sizes[static_cast<std::size_t>(player)];
  const int A = model.action_sizes[static_cast<std::size_t>(player)];
  const int O = model.obs_sizes[static_cast<std::size_t>(player)];
  const int m = behavior.window_len;
  const auto& policy = behavior.players[static_cast<std::size_t>(player)];

  std::vector<PlayerChainResult> chains;
  chains.reserve(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j)
    chains.push_back(player_chain_dp(model, j, behavior.players[static_cast<std::size_t>(j)]));

  BlendedTables bl{{H, A, O}, WindowCodec(A, O, m), {}, {}, {}};
  const int W = bl.codec.total();
  bl.p.assign(static_cast<std::size_t>(H), std::vector<double>(static_cast<std::size_t>(W * A * O), 0.0));
  bl.r.assign(static_cast<std::size_t>(H), std::vector<double>(static_cast<std::size_t>(W * A), 0.0));
  bl.reach_wa.assign(static_cast<std::size_t>(H), std::vector<double>(static_cast<std::size_t>(W * A), 0.0));

  const MixedRadix sspace = model.joint_state_space();
  const MixedRadix aspace = model.joint_action_space();
  std::vector<int> s(static_cast<std::size_t>(N)), a(static_cast<std::size_t>(N));

  for (int h = 0; h < H; ++h) {
    // Opponent-side contraction of the reward under true occupancies.
    std::vector<double> g(static_cast<std::size_t>(S * A), 0.0);
    std::fill(s.begin(), s.end(), 0);
    do {
      std::fill(a.begin(), a.end(), 0);
      do {
        double weight = 1.0;
        for (int j = 0; j < N && weight != 0.0; ++j) {
          if (j == player) continue;
          weight *= chains[static_cast<std::size_t>(j)].occupancy[static_cast<std::size_t>(h)][static_cast<std::size_t>(
              s[static_cast<std::size_t>(j)] * model.action_sizes[static_cast<std::size_t>(j)] +
              a[static_cast<std::size_t>(j)])];
        }
        if (weight != 0.0)
          g[static_cast<std::size_t>(s[static_cast<std::size_t>(player)] * A + a[static_cast<std::size_t>(player)])] +=
              weight * model.reward_at(player, h, sspace.encode(s), aspace.encode(a));
      } while (aspace.advance(a));
    } while (sspace.advance(s));

    const auto& ws = chains[static_cast<std::size_t>(player)].window_state[static_cast<std::size_t>(h)];
    const int len = WindowCodec::length_at_step(h, m);
    for (int w = bl.codec.offset(len); w < bl.codec.offset(len + 1); ++w) {
      double reach = 0.0;
      for (int si = 0; si < S; ++si) reach += ws[static_cast<std::size_t>(w * S + si)];
      if (reach == 0.0) continue;
      for (int ai = 0; ai < A; ++ai) {
        double r = 0.0;
        for (int si = 0; si < S; ++si)
          r += ws[static_cast<std::size_t>(w * S + si)] * g[static_cast<std::size_t>(si * A + ai)];
        bl.r[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * A + ai)] = r / reach;
        bl.reach_wa[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * A + ai)] =
            reach * policy.prob(h, w, ai);
        for (int o = 0; o < O; ++o) {
          double po = 0.0;
          for (int si = 0; si < S; ++si)
            po += ws[static_cast<std::size_t>(w * S + si)] * model.obs_prob(player, h, si, o);
          bl.p[static_cast<std::size_t>(h)][static_cast<std::size_t>((w * A + ai) * O + o)] = po / reach;
        }
      }
    }
  }
  return bl;
}

std::vector<CheckResult> kernel_reward_bias_check(const SuperstateMdp& ss,
                                                  const PolicyProfile& profile, int player,
                                                  double rho) {
  const PomgModel& model = ss.model();
  const int H = model.horizon;
  const int A = model.action_sizes[static_cast<std::size_t>(player)];
  const int O = model.obs_sizes[static_cast<std::size_t>(player)];
  const int m = ss.window_len();

  const auto bl = blended_kernel(model, profile, player);
  const auto rm = marginal_reward(ss, profile, player);

  double worst_kernel = 0.0, worst_reward = 0.0;
  for (int h = 0; h < H; ++h) {
    const int wb = ss.block_begin(player, h), we = ss.block_end(player, h);
    for (int w = wb; w < we; ++w)
      for (int a = 0; a < A; ++a) {
        if (bl.reach_wa[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * A + a)] == 0.0) continue;
        double l1 = 0.0;
        for (int o = 0; o < O; ++o)
          l1 += std::abs(bl.p[static_cast<std::size_t>(h)][static_cast<std::size_t>((w * A + a) * O + o)] -
                         ss.obs_margin(player, h, w, o));
        worst_kernel = std::max(worst_kernel, l1);
        worst_reward = std::max(
            worst_reward,
            std::abs(bl.r[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * A + a)] -
                     rm[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * A + a)]));
      }
  }

  const double bound = 2.0 * std::pow(1.0 - rho, m);
  std::vector<CheckResult> out;
  out.push_back({"kernel-bias player=" + std::to_string(player) + " m=" + std::to_string(m), bound,
                 worst_kernel, worst_kernel <= bound + 1e-12});
  out.push_back({"reward-bias player=" + std::to_string(player) + " m=" + std::to_string(m), bound,
                 worst_reward, worst_reward <= bound + 1e-12});
  return out;
}

// ---------------------------------------------------------------------------
// Potential structure
// ---------------------------------------------------------------------------

PotentialViolation verify_statewise_potential(const PomgModel& model,
                                              const std::vector<std::vector<double>>& phi) {
  require_valid(model);
  const int N = model.num_players;
  const int H = model.horizon;
  if (static_cast<int>(phi.size()) != H)
    throw std::invalid_argument("verify_statewise_potential: phi must have one table per step");

  const MixedRadix sspace = model.joint_state_space();
  const MixedRadix aspace = model.joint_action_space();
  const std::int64_t SJ = sspace.total(), AJ = aspace.total();
  for (const auto& t : phi)
    if (static_cast<std::int64_t>(t.size()) != SJ * AJ)
      throw std::invalid_argument("verify_statewise_potential: phi table size mismatch");

  PotentialViolation out;
  std::vector<int> s(static_cast<std::size_t>(N)), a(static_cast<std::size_t>(N)),
      s2(static_cast<std::size_t>(N)), a2(static_cast<std::size_t>(N));
  for (int h = 0; h < H; ++h) {
    for (std::int64_t sj = 0; sj < SJ; ++sj) {
      sspace.decode(sj, s);
      for (std::int64_t aj = 0; aj < AJ; ++aj) {
        aspace.decode(aj, a);
        const double base_phi = phi[static_cast<std::size_t>(h)][static_cast<std::size_t>(sj * AJ + aj)];
        for (int i = 0; i < N; ++i) {
          const double base_r = model.reward_at(i, h, sj, aj);
          s2 = s;
          a2 = a;
          for (int si = 0; si < model.state_sizes[static_cast<std::size_t>(i)]; ++si) {
            s2[static_cast<std::size_t>(i)] = si;
            const std::int64_t sj2 = sspace.encode(s2);
            for (int ai = 0; ai < model.action_sizes[static_cast<std::size_t>(i)]; ++ai) {
              a2[static_cast<std::size_t>(i)] = ai;
              const std::int64_t aj2 = aspace.encode(a2);
              const double dr = model.reward_at(i, h, sj2, aj2) - base_r;
              const double dphi =
                  phi[static_cast<std::size_t>(h)][static_cast<std::size_t>(sj2 * AJ + aj2)] - base_phi;
              const double v = std::abs(dr - dphi);
              if (v > out.max_violation) {
                out.max_violation = v;
                out.where = "player=" + std::to_string(i) + " step=" + std::to_string(h) +
                            " s=" + std::to_string(sj) + " a=" + std::to_string(aj) +
                            " s_i'=" + std::to_string(si) + " a_i'=" + std::to_string(ai);
              }
            }
            a2[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)];
          }
          s2[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i)];
        }
      }
    }
  }
  return out;
}

NearPotentialReport near_potential_audit(const PomgModel& model, const SuperstateMdp& ss,
                                         const PotentialSpec& phi,
                                         std::span<const DeviationTriple> deviations, double rho,
                                         std::int64_t budget) {
  NearPotentialReport report;
  report.bound = 2.0 * 4.0 * model.horizon * model.horizon * std::pow(1.0 - rho, ss.window_len());
  for (const auto& dev : deviations) {
    PolicyProfile deviated = dev.profile;
    deviated.players[static_cast<std::size_t>(dev.player)] = dev.alternative;

    const double vm_base = joint_superstate_values(ss, dev.profile, budget)[static_cast<std::size_t>(dev.player)];
    const double vm_dev = joint_superstate_values(ss, deviated, budget)[static_cast<std::size_t>(dev.player)];
    const double phi_base = phi.evaluate(model, dev.profile, budget);
    const double phi_dev = phi.evaluate(model, deviated, budget);

    const double mismatch = std::abs((vm_base - vm_dev) - (phi_base - phi_dev));
    report.max_mismatch = std::max(report.max_mismatch, mismatch);
  }
  report.worst_utilization = report.bound > 0.0 ? report.max_mismatch / report.bound
                             : (report.max_mismatch > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  report.pass = report.max_mismatch <= report.bound + 1e-12;
  return report;
}

// ---------------------------------------------------------------------------
// Small oracles
// ---------------------------------------------------------------------------

std::pair<double, double> pairwise_identity(std::span<const double> p, std::span<const double> q,
                                            std::span<const double> x) {
  if (p.size() != q.size() || p.size() != x.size())
    throw std::invalid_argument("pairwise_identity: support mismatch");
  for (double v : x)
    if (std::isnan(v) || std::isinf(v)) throw std::invalid_argument("pairwise_identity: x not finite");
  double lhs = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) lhs += (p[k] - q[k]) * x[k];
  double rhs = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      rhs += (p[i] * q[j] - p[j] * q[i]) * (x[i] - x[j]);
  return {lhs, 0.5 * rhs};
}

std::vector<double> joint_superstate_values(const SuperstateMdp& ss, const PolicyProfile& profile,
                                            std::int64_t budget) {
  const PomgModel& model = ss.model();
  const int N = model.num_players;
  const int H = model.horizon;
  const MixedRadix sspace = model.joint_state_space();
  const MixedRadix aspace = model.joint_action_space();
  const std::int64_t SJ = sspace.total(), AJ = aspace.total();

  auto wspace_at = [&](int h) {
    std::vector<int> counts(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
      counts[static_cast<std::size_t>(i)] = ss.block_end(i, h) - ss.block_begin(i, h);
    return MixedRadix(counts);
  };

  std::vector<double> values(static_cast<std::size_t>(N), 0.0);
  MixedRadix wspace = wspace_at(0);
  std::vector<double> dist(static_cast<std::size_t>(wspace.total()), 0.0);
  dist[0] = 1.0;

  std::vector<int> wdig(static_cast<std::size_t>(N)), w2dig(static_cast<std::size_t>(N)),
      adig(static_cast<std::size_t>(N)), odig(static_cast<std::size_t>(N)), sdig(static_cast<std::size_t>(N));
  const MixedRadix ospace = model.joint_obs_space();

  for (int h = 0; h < H; ++h) {
    MixedRadix w2space = (h + 1 < H) ? wspace_at(h + 1) : MixedRadix(std::vector<int>(static_cast<std::size_t>(N), 1));
    if (wspace.total() * SJ > budget)
      throw BudgetExceeded("joint_superstate_values: joint window space exceeds budget");
    std::vector<double> next;
    if (h + 1 < H) next.assign(static_cast<std::size_t>(w2space.total()), 0.0);

    std::vector<int> woff(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) woff[static_cast<std::size_t>(i)] = ss.block_begin(i, h);

    for (std::int64_t wj = 0; wj < wspace.total(); ++wj) {
      const double mass = dist[static_cast<std::size_t>(wj)];
      if (mass == 0.0) continue;
      wspace.decode(wj, wdig);

      // product of window beliefs over joint states
      std::vector<double> bprod(static_cast<std::size_t>(SJ), 0.0);
      for (std::int64_t sj = 0; sj < SJ; ++sj) {
        sspace.decode(sj, sdig);
        double p = 1.0;
        for (int i = 0; i < N && p != 0.0; ++i) {
          const auto& b = ss.belief(i, h, wdig[static_cast<std::size_t>(i)] + woff[static_cast<std::size_t>(i)]);
          p = b.reachable ? p * b.probs[static_cast<std::size_t>(sdig[static_cast<std::size_t>(i)])] : 0.0;
        }
        bprod[static_cast<std::size_t>(sj)] = p;
      }

      for (std::int64_t aj = 0; aj < AJ; ++aj) {
        aspace.decode(aj, adig);
        double pa = 1.0;
        for (int i = 0; i < N; ++i)
          pa *= profile.players[static_cast<std::size_t>(i)].prob(
              h, wdig[static_cast<std::size_t>(i)] + woff[static_cast<std::size_t>(i)], adig[static_cast<std::size_t>(i)]);
        if (pa == 0.0) continue;
        for (std::int64_t sj = 0; sj < SJ; ++sj) {
          const double bp = bprod[static_cast<std::size_t>(sj)];
          if (bp == 0.0) continue;
          for (int i = 0; i < N; ++i)
            values[static_cast<std::size_t>(i)] += mass * pa * bp * model.reward_at(i, h, sj, aj);
        }
        if (h + 1 >= H) continue;
        std::fill(odig.begin(), odig.end(), 0);
        do {
          double po = 1.0;
          for (int i = 0; i < N; ++i)
            po *= ss.obs_margin(i, h, wdig[static_cast<std::size_t>(i)] + woff[static_cast<std::size_t>(i)],
                                odig[static_cast<std::size_t>(i)]);
          if (po == 0.0) continue;
          for (int i = 0; i < N; ++i)
            w2dig[static_cast<std::size_t>(i)] =
                ss.successor(i, h, wdig[static_cast<std::size_t>(i)] + woff[static_cast<std::size_t>(i)],
                             adig[static_cast<std::size_t>(i)], odig[static_cast<std::size_t>(i)]) -
                ss.block_begin(i, h + 1);
          next[static_cast<std::size_t>(w2space.encode(w2dig))] += mass * pa * po;
        } while (ospace.advance(odig));
      }
    }
    if (h + 1 < H) {
      dist.swap(next);
      wspace = w2space;
    }
  }
  return values;
}

}  // namespace pomg
