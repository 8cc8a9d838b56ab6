#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "pomg/exact_value.hpp"
#include "pomg/games.hpp"
#include "pomg/oracle.hpp"
#include "test_models.hpp"

using namespace pomg;
using namespace pomg::testing;

namespace {

GameSpec mixed_spec(GameKind kind, std::uint64_t seed, int horizon = 3) {
  GameSpec spec;
  spec.kind = kind;
  spec.horizon = horizon;
  spec.mixing_lambda = 0.5;
  spec.obs_noise_beta = 0.25;
  spec.seed = seed;
  return spec;
}

// Enumerates all deterministic window policies of a single player and
// evaluates each in the marginalized MDP; the max cross-checks the Bellman
// best response.
double brute_force_window_best_response(const SuperstateMdp& ss, const PolicyProfile& profile,
                                        int player) {
  const PomgModel& m = ss.model();
  const int H = m.horizon;
  const int A = m.action_sizes[static_cast<std::size_t>(player)];
  const int O = m.obs_sizes[static_cast<std::size_t>(player)];
  // choice cells: step-consistent (h, w) pairs
  std::vector<std::pair<int, int>> cells;
  for (int h = 0; h < H; ++h)
    for (int w = ss.block_begin(player, h); w < ss.block_end(player, h); ++w)
      cells.emplace_back(h, w);
  MixedRadix assignments(std::vector<int>(cells.size(), A));
  std::vector<int> choice(cells.size(), 0);
  double best = -1.0;
  do {
    PolicyProfile candidate = profile;
    FiniteWindowPolicy pol = FiniteWindowPolicy::uniform(H, A, O, ss.window_len());
    std::vector<double> row(static_cast<std::size_t>(A), 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::fill(row.begin(), row.end(), 0.0);
      row[static_cast<std::size_t>(choice[c])] = 1.0;
      pol.set_row(cells[c].first, cells[c].second, row);
    }
    candidate.players[static_cast<std::size_t>(player)] = pol;
    best = std::max(best, marginal_policy_value(ss, candidate, player));
  } while (assignments.advance(choice));
  return best;
}

// Exhaustive H = 2 POMG value when player `i` plays a deterministic
// full-history tree policy (root action, then one action per observation)
// and the opponents play their window policies.
double tree_policy_value_h2(const PomgModel& m, const PolicyProfile& profile, int player,
                            int root_action, const std::vector<int>& reply) {
  const MixedRadix sspace = m.joint_state_space();
  const MixedRadix aspace = m.joint_action_space();
  const MixedRadix ospace = m.joint_obs_space();
  const int N = m.num_players;
  double value = 0.0;
  std::vector<int> s1(static_cast<std::size_t>(N)), o1(static_cast<std::size_t>(N)),
      a1(static_cast<std::size_t>(N)), s2(static_cast<std::size_t>(N)), a2(static_cast<std::size_t>(N));
  for (std::int64_t s1j = 0; s1j < sspace.total(); ++s1j) {
    sspace.decode(s1j, s1);
    double p1 = 1.0;
    for (int i = 0; i < N; ++i) p1 *= m.init[static_cast<std::size_t>(i)][static_cast<std::size_t>(s1[static_cast<std::size_t>(i)])];
    if (p1 == 0.0) continue;
    for (std::int64_t o1j = 0; o1j < ospace.total(); ++o1j) {
      ospace.decode(o1j, o1);
      double po1 = p1;
      for (int i = 0; i < N; ++i) po1 *= m.obs_prob(i, 0, s1[static_cast<std::size_t>(i)], o1[static_cast<std::size_t>(i)]);
      if (po1 == 0.0) continue;
      for (std::int64_t a1j = 0; a1j < aspace.total(); ++a1j) {
        aspace.decode(a1j, a1);
        if (a1[static_cast<std::size_t>(player)] != root_action) continue;
        double pa1 = po1;
        for (int i = 0; i < N; ++i) {
          if (i == player) continue;
          pa1 *= profile.players[static_cast<std::size_t>(i)].prob(0, 0, a1[static_cast<std::size_t>(i)]);
        }
        if (pa1 == 0.0) continue;
        value += pa1 * m.reward_at(player, 0, s1j, a1j);
        for (std::int64_t s2j = 0; s2j < sspace.total(); ++s2j) {
          sspace.decode(s2j, s2);
          double ps2 = pa1;
          for (int i = 0; i < N; ++i)
            ps2 *= m.trans_prob(i, 0, s1[static_cast<std::size_t>(i)], a1[static_cast<std::size_t>(i)],
                                s2[static_cast<std::size_t>(i)]);
          if (ps2 == 0.0) continue;
          for (std::int64_t a2j = 0; a2j < aspace.total(); ++a2j) {
            aspace.decode(a2j, a2);
            if (a2[static_cast<std::size_t>(player)] !=
                reply[static_cast<std::size_t>(o1[static_cast<std::size_t>(player)])])
              continue;
            double pa2 = ps2;
            for (int i = 0; i < N; ++i) {
              if (i == player) continue;
              const auto& pol = profile.players[static_cast<std::size_t>(i)];
              const int w = pol.codec().extend(0, a1[static_cast<std::size_t>(i)], o1[static_cast<std::size_t>(i)]);
              pa2 *= pol.prob(1, w, a2[static_cast<std::size_t>(i)]);
            }
            if (pa2 == 0.0) continue;
            value += pa2 * m.reward_at(player, 1, s2j, a2j);
          }
        }
      }
    }
  }
  return value;
}

}  // namespace

TEST_CASE("single-player best response matches deterministic policy enumeration") {
  GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 61, 2);
  spec.num_players = 1;
  const PomgModel m = generate_game(spec).model;
  const SuperstateMdp ss(m, 1);
  const PolicyProfile profile = uniform_profile(m, 1);
  const auto br = best_response_superstate(ss, profile, 0);
  CHECK(br.value == doctest::Approx(brute_force_window_best_response(ss, profile, 0)).epsilon(1e-10));
  // the greedy policy attains its own value
  PolicyProfile greedy = profile;
  greedy.players[0] = br.policy;
  CHECK(marginal_policy_value(ss, greedy, 0) == doctest::Approx(br.value).epsilon(1e-10));
}

TEST_CASE("opponent-independent rewards reduce to the single-player optimum") {
  GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 67, 2);
  PomgModel m = generate_game(spec).model;
  // make player 0's reward depend on its own state-action only
  const MixedRadix sspace = m.joint_state_space();
  const MixedRadix aspace = m.joint_action_space();
  SeededRng rng(1, 0);
  std::vector<int> s(2), a(2);
  for (int h = 0; h < 2; ++h) {
    std::vector<double> own(4);
    for (auto& v : own) v = rng.next_double();
    for (std::int64_t sj = 0; sj < sspace.total(); ++sj) {
      sspace.decode(sj, s);
      for (std::int64_t aj = 0; aj < aspace.total(); ++aj) {
        aspace.decode(aj, a);
        m.reward[0][static_cast<std::size_t>(h)][static_cast<std::size_t>(sj * aspace.total() + aj)] =
            own[static_cast<std::size_t>(s[0] * 2 + a[0])];
      }
    }
  }
  // single-player restriction of player 0
  PomgModel solo;
  solo.num_players = 1;
  solo.horizon = 2;
  solo.state_sizes = {2};
  solo.action_sizes = {2};
  solo.obs_sizes = {2};
  solo.transition = {m.transition[0]};
  solo.observation = {m.observation[0]};
  solo.init = {m.init[0]};
  solo.reward = {{std::vector<double>(4), std::vector<double>(4)}};
  for (int h = 0; h < 2; ++h)
    for (int s0 = 0; s0 < 2; ++s0)
      for (int a0 = 0; a0 < 2; ++a0)
        solo.reward[0][static_cast<std::size_t>(h)][static_cast<std::size_t>(s0 * 2 + a0)] =
            m.reward_at(0, h, sspace.encode(std::vector<int>{s0, 0}),
                        aspace.encode(std::vector<int>{a0, 0}));

  SeededRng prng(2, 0);
  const PolicyProfile profile = random_profile(m, 1, prng);
  const SuperstateMdp ss(m, 1);
  const SuperstateMdp ss_solo(solo, 1);
  const PolicyProfile solo_profile{1, {profile.players[0]}};
  CHECK(best_response_superstate(ss, profile, 0).value ==
        doctest::Approx(best_response_superstate(ss_solo, solo_profile, 0).value).epsilon(1e-10));
}

TEST_CASE("full-history best response equals the superstate one at m = H") {
  const GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 71, 2);
  const PomgModel m = generate_game(spec).model;
  const SuperstateMdp ss(m, 2);
  SeededRng rng(3, 0);
  const PolicyProfile profile = random_profile(m, 2, rng);
  for (int i = 0; i < 2; ++i)
    CHECK(best_response_full_history(m, profile, i) ==
          doctest::Approx(best_response_superstate(ss, profile, i).value).epsilon(1e-10));
}

TEST_CASE("fully revealing observations make one window step sufficient") {
  // observation = state; mixed transitions; m = 1 already captures the belief
  GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 73, 3);
  PomgModel m = generate_game(spec).model;
  for (int i = 0; i < 2; ++i)
    for (int h = 0; h < 3; ++h) m.observation[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)] = {1.0, 0.0, 0.0, 1.0};
  const SuperstateMdp ss(m, 1);
  SeededRng rng(4, 0);
  const PolicyProfile profile = random_profile(m, 1, rng);
  for (int i = 0; i < 2; ++i)
    CHECK(best_response_full_history(m, profile, i) ==
          doctest::Approx(best_response_superstate(ss, profile, i).value).epsilon(1e-10));
}

TEST_CASE("H = 2 full-history best response matches deterministic tree enumeration") {
  const GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 79, 2);
  const PomgModel m = generate_game(spec).model;
  SeededRng rng(5, 0);
  const PolicyProfile profile = random_profile(m, 1, rng);
  for (int player = 0; player < 2; ++player) {
    double best = -1.0;
    for (int root = 0; root < 2; ++root)
      for (int r0 = 0; r0 < 2; ++r0)
        for (int r1 = 0; r1 < 2; ++r1)
          best = std::max(best, tree_policy_value_h2(m, profile, player, root, {r0, r1}));
    CHECK(best_response_full_history(m, profile, player) == doctest::Approx(best).epsilon(1e-10));
  }
}

TEST_CASE("single-action game has zero gaps everywhere") {
  GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 83, 2);
  spec.action_sizes = {1, 1};
  const PomgModel m = generate_game(spec).model;
  const PolicyProfile profile = uniform_profile(m, 1);
  const NashGapReport report = nash_gap(m, profile);
  for (const auto& g : report.players) {
    CHECK(std::abs(g.gap_window) <= 1e-10);
    CHECK(std::abs(g.gap_history) <= 1e-10);
  }
}

TEST_CASE("gaps are nonnegative and the classes coincide at m = H") {
  const GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 89, 2);
  const PomgModel m = generate_game(spec).model;
  SeededRng rng(6, 0);
  for (int rep = 0; rep < 3; ++rep) {
    const PolicyProfile profile = random_profile(m, 2, rng);
    const NashGapReport report = nash_gap(m, profile);
    for (const auto& g : report.players) {
      CHECK(g.gap_window >= -1e-9);
      CHECK(g.gap_history >= -1e-9);
      CHECK(g.gap_history >= g.gap_window - 1e-9);  // classes agree at full window
      CHECK(g.gap_history <= g.gap_window + 1e-9);
    }
  }
}

TEST_CASE("gap transfer bound holds for truncated windows") {
  const GameSpec spec = mixed_spec(GameKind::kStatewisePotential, 97, 3);
  const PomgModel m = generate_game(spec).model;
  const StabilityEstimate stab = measure_filter_stability(m);
  SeededRng rng(7, 0);
  for (int window : {1, 2}) {
    const SuperstateMdp ss(m, window);
    const double eps = stab.eps_budget(window);
    for (int rep = 0; rep < 3; ++rep) {
      const PolicyProfile profile = random_profile(m, window, rng);
      const NashGapReport report = nash_gap(ss, profile);
      CHECK(report.max_gap_history <= report.max_gap_window + 2.0 * eps + 1e-9);
    }
  }
}

TEST_CASE("fully mixing kernels collapse beliefs in one step: rho = 1") {
  const PomgModel m = uniform_model(2, 3, 2, 2, 2, 0.5);
  const StabilityEstimate stab = measure_filter_stability(m);
  CHECK(stab.rho_joint == doctest::Approx(1.0));
}

TEST_CASE("identity dynamics with frozen observations never contract: rho = 0") {
  // one informative first observation seeds distinct beliefs; afterwards the
  // state never moves and observations reveal nothing, so TV is preserved
  PomgModel m = deterministic_model(1, 3, 2);
  for (int h = 0; h < 3; ++h) {
    auto& t = m.transition[0][static_cast<std::size_t>(h)];
    std::fill(t.begin(), t.end(), 0.0);
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) t[static_cast<std::size_t>((s * 2 + a) * 2 + s)] = 1.0;  // stay put
    if (h > 0) m.observation[0][static_cast<std::size_t>(h)] = {1.0, 0.0, 1.0, 0.0};
  }
  m.init[0] = {0.5, 0.5};
  const StabilityEstimate stab = measure_filter_stability(m);
  CHECK(stab.rho_joint == doctest::Approx(0.0));
}

TEST_CASE("mixing floor: measured rho is positive and Dobrushin overlap >= lambda") {
  const GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 101, 3);
  const PomgModel m = generate_game(spec).model;
  const StabilityEstimate stab = measure_filter_stability(m);
  CHECK(stab.rho_joint > 0.05);
  CHECK(stab.eps_budget(2) < stab.eps_budget(1));  // monotone in m
  for (double r : stab.rho_per_player) CHECK(r >= stab.rho_joint - 1e-12);

  // Dobrushin-style cross-check: with a lambda-mixed kernel, point-mass
  // priors pushed through one transition keep overlap at least lambda.
  for (int i = 0; i < 2; ++i)
    for (int h = 0; h < 3; ++h)
      for (int a = 0; a < 2; ++a)
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s2 = s1 + 1; s2 < 2; ++s2) {
            double overlap = 0.0;
            for (int s = 0; s < 2; ++s)
              overlap += std::min(m.trans_prob(i, h, s1, a, s), m.trans_prob(i, h, s2, a, s));
            CHECK(overlap >= 0.5 - 1e-12);
          }
}

TEST_CASE("belief contraction check passes at the measured rate") {
  const GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 103, 3);
  const PomgModel m = generate_game(spec).model;
  const StabilityEstimate stab = measure_filter_stability(m);
  for (int window : {1, 2}) {
    const auto check = belief_contraction_check(m, window, stab.rho_joint);
    CHECK(check.pass);
  }
}

namespace {

// Independent blended-kernel oracle: enumerate player i's histories with a
// (history, state) table instead of the (window, state) chain.
std::vector<std::vector<double>> history_enumeration_blended_p(const PomgModel& m, int player,
                                                               const FiniteWindowPolicy& pol,
                                                               int window) {
  const int H = m.horizon;
  const int S = m.state_sizes[static_cast<std::size_t>(player)];
  const int A = m.action_sizes[static_cast<std::size_t>(player)];
  const int O = m.obs_sizes[static_cast<std::size_t>(player)];
  const WindowCodec full(A, O, H);  // histories as max-length windows
  const WindowCodec codec(A, O, window);
  std::vector<std::vector<double>> p(static_cast<std::size_t>(H),
                                     std::vector<double>(static_cast<std::size_t>(codec.total() * A * O), 0.0));
  std::vector<std::vector<double>> reach(static_cast<std::size_t>(H),
                                         std::vector<double>(static_cast<std::size_t>(codec.total()), 0.0));
  // hist_state[tau * S + s] over histories tau of length h
  std::vector<double> hist_state(static_cast<std::size_t>(S), 0.0);
  for (int s = 0; s < S; ++s) hist_state[static_cast<std::size_t>(s)] = m.init[static_cast<std::size_t>(player)][static_cast<std::size_t>(s)];
  std::vector<double> cur = hist_state;  // indexed by (tau - offset(h)) * S + s

  for (int h = 0; h < H; ++h) {
    const int tb = full.offset(h), te = full.offset(h + 1);
    std::vector<double> next;
    if (h + 1 < H) next.assign(static_cast<std::size_t>((full.offset(h + 2) - te) * S), 0.0);
    for (int tau = tb; tau < te; ++tau) {
      // window of this history = last min(h, window) pairs
      const auto pairs = full.decode(tau);
      std::vector<WindowPair> wpairs(pairs.end() - std::min<std::size_t>(pairs.size(), static_cast<std::size_t>(window)),
                                     pairs.end());
      const int w = codec.encode(wpairs);
      for (int s = 0; s < S; ++s) {
        const double mass = cur[static_cast<std::size_t>((tau - tb) * S + s)];
        if (mass == 0.0) continue;
        reach[static_cast<std::size_t>(h)][static_cast<std::size_t>(w)] += mass;
        for (int a = 0; a < A; ++a) {
          const double pa = pol.prob(h, w, a);
          if (pa == 0.0) continue;
          for (int o = 0; o < O; ++o) {
            const double po = m.obs_prob(player, h, s, o);
            if (po == 0.0) continue;
            p[static_cast<std::size_t>(h)][static_cast<std::size_t>((w * A + a) * O + o)] += mass * po;
            if (h + 1 >= H) continue;
            const int tau2 = full.extend(tau, a, o);
            const auto trow = m.trans_row(player, h, s, a);
            for (int s2 = 0; s2 < S; ++s2)
              next[static_cast<std::size_t>((tau2 - te) * S + s2)] += mass * pa * po * trow[static_cast<std::size_t>(s2)];
          }
        }
      }
    }
    // normalize into conditional probabilities
    for (int w = 0; w < codec.total(); ++w) {
      const double z = reach[static_cast<std::size_t>(h)][static_cast<std::size_t>(w)];
      if (z == 0.0) continue;
      for (int a = 0; a < A; ++a)
        for (int o = 0; o < O; ++o)
          p[static_cast<std::size_t>(h)][static_cast<std::size_t>((w * A + a) * O + o)] /= z;
    }
    if (h + 1 < H) cur.swap(next);
  }
  return p;
}

}  // namespace

TEST_CASE("blended kernel agrees with exhaustive history enumeration") {
  const GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 107, 3);
  const PomgModel m = generate_game(spec).model;
  SeededRng rng(8, 0);
  const PolicyProfile profile = random_profile(m, 1, rng);
  const auto bl = blended_kernel(m, profile, 0);
  const auto oracle = history_enumeration_blended_p(m, 0, profile.players[0], 1);
  for (int h = 0; h < 3; ++h)
    for (std::size_t k = 0; k < oracle[static_cast<std::size_t>(h)].size(); ++k)
      CHECK(bl.p[static_cast<std::size_t>(h)][k] ==
            doctest::Approx(oracle[static_cast<std::size_t>(h)][k]).epsilon(1e-12));
}

TEST_CASE("blended kernel bias vanishes at m = H and with revealing observations") {
  const GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 109, 3);
  PomgModel m = generate_game(spec).model;
  SeededRng rng(9, 0);
  {
    const SuperstateMdp ss(m, 3);
    const PolicyProfile profile = random_profile(m, 3, rng);
    for (const auto& check : kernel_reward_bias_check(ss, profile, 0, 1.0))
      CHECK(check.measured <= 1e-10);
  }
  for (int i = 0; i < 2; ++i)
    for (int h = 0; h < 3; ++h)
      m.observation[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)] = {1.0, 0.0, 0.0, 1.0};
  {
    const SuperstateMdp ss(m, 1);
    const PolicyProfile profile = random_profile(m, 1, rng);
    for (const auto& check : kernel_reward_bias_check(ss, profile, 1, 1.0))
      CHECK(check.measured <= 1e-10);
  }
}

TEST_CASE("bias bounds hold at the measured rate; a wrong rate fails loudly") {
  const GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 113, 3);
  const PomgModel m = generate_game(spec).model;
  const StabilityEstimate stab = measure_filter_stability(m);
  const SuperstateMdp ss(m, 1);
  SeededRng rng(10, 0);
  const PolicyProfile profile = random_profile(m, 1, rng);
  bool nonzero_bias = false;
  for (int i = 0; i < 2; ++i)
    for (const auto& check : kernel_reward_bias_check(ss, profile, i, stab.rho_joint)) {
      CHECK(check.pass);
      nonzero_bias = nonzero_bias || check.measured > 1e-6;
    }
  REQUIRE(nonzero_bias);  // the negative control below depends on it
  bool failed_somewhere = false;
  for (const auto& check : kernel_reward_bias_check(ss, profile, 0, 1.0))
    failed_somewhere = failed_somewhere || !check.pass;
  CHECK(failed_somewhere);  // rho = 1 forces a zero bound the bias must violate
}

TEST_CASE("identical-interest games are statewise potential with phi = r1") {
  const GameSpec spec = mixed_spec(GameKind::kIdenticalInterest, 127, 2);
  const GeneratedGame game = generate_game(spec);
  CHECK(verify_statewise_potential(game.model, game.model.reward[0]).max_violation == 0.0);
}

TEST_CASE("matching pennies is loudly non-potential") {
  PomgModel m = uniform_model(2, 1, 1, 2, 1, 0.0);
  // r1 = win on match, r2 = 1 - r1; phi = r1 is badly wrong
  m.reward[0][0] = {1.0, 0.0, 0.0, 1.0};
  m.reward[1][0] = {0.0, 1.0, 1.0, 0.0};
  const auto violation = verify_statewise_potential(m, m.reward[0]);
  CHECK(violation.max_violation >= 1.0);
  CHECK(!violation.where.empty());
}

TEST_CASE("near-potential audit: exact at m = H, null deviations are free") {
  const GameSpec spec = mixed_spec(GameKind::kIdenticalInterest, 131, 2);
  const GeneratedGame game = generate_game(spec);
  const SuperstateMdp ss(game.model, 2);
  SeededRng rng(11, 0);

  std::vector<DeviationTriple> devs;
  for (int rep = 0; rep < 4; ++rep) {
    DeviationTriple dev;
    dev.profile = random_profile(game.model, 2, rng);
    dev.player = rep % 2;
    dev.alternative = random_policy(2, 2, 2, 2, rng);
    devs.push_back(dev);
  }
  // m = H: the potential is exact, mismatch must vanish
  const auto exact = near_potential_audit(game.model, ss, game.potential, devs, 0.0);
  CHECK(exact.max_mismatch <= 1e-10);

  // null deviation: both sides zero
  DeviationTriple null_dev;
  null_dev.profile = random_profile(game.model, 2, rng);
  null_dev.player = 0;
  null_dev.alternative = null_dev.profile.players[0];
  const auto null_audit = near_potential_audit(game.model, ss, game.potential,
                                               std::vector<DeviationTriple>{null_dev}, 0.5);
  CHECK(null_audit.max_mismatch <= 1e-12);
}

TEST_CASE("near-potential audit holds at truncated windows") {
  const GameSpec spec = mixed_spec(GameKind::kStatewisePotential, 137, 3);
  const GeneratedGame game = generate_game(spec);
  const StabilityEstimate stab = measure_filter_stability(game.model);
  SeededRng rng(12, 0);
  for (int window : {1, 2}) {
    const SuperstateMdp ss(game.model, window);
    std::vector<DeviationTriple> devs;
    for (int rep = 0; rep < 6; ++rep) {
      DeviationTriple dev;
      dev.profile = random_profile(game.model, window, rng);
      dev.player = rep % 2;
      dev.alternative = random_policy(3, 2, 2, window, rng);
      devs.push_back(dev);
    }
    const auto audit = near_potential_audit(game.model, ss, game.potential, devs, stab.rho_joint);
    CHECK(audit.pass);
  }
}

TEST_CASE("joint-chain stage values match the occupancy-product route") {
  // Decoupled dynamics make per-player (state, action) processes independent,
  // so E[g_h(s, a)] must equal the contraction of g against the product of
  // per-player occupancies. The joint DP never assumes this; the per-player
  // chain route provides the independent cross-check.
  const GameSpec spec = mixed_spec(GameKind::kRandomDecoupled, 139, 3);
  const PomgModel m = generate_game(spec).model;
  SeededRng rng(13, 0);
  const PolicyProfile profile = random_profile(m, 2, rng);

  std::vector<std::vector<double>> stage(3);
  const MixedRadix sspace = m.joint_state_space();
  const MixedRadix aspace = m.joint_action_space();
  for (auto& t : stage) {
    t.resize(static_cast<std::size_t>(sspace.total() * aspace.total()));
    for (auto& v : t) v = rng.next_double();
  }
  const double via_joint = potential_value(m, profile, stage);

  std::vector<PlayerChainResult> chains;
  for (int i = 0; i < 2; ++i) chains.push_back(player_chain_dp(m, i, profile.players[static_cast<std::size_t>(i)]));
  double via_occupancy = 0.0;
  std::vector<int> s(2), a(2);
  for (int h = 0; h < 3; ++h)
    for (std::int64_t sj = 0; sj < sspace.total(); ++sj) {
      sspace.decode(sj, s);
      for (std::int64_t aj = 0; aj < aspace.total(); ++aj) {
        aspace.decode(aj, a);
        double weight = 1.0;
        for (int i = 0; i < 2; ++i)
          weight *= chains[static_cast<std::size_t>(i)].occupancy[static_cast<std::size_t>(h)]
                        [static_cast<std::size_t>(s[static_cast<std::size_t>(i)] * 2 + a[static_cast<std::size_t>(i)])];
        via_occupancy += weight * stage[static_cast<std::size_t>(h)][static_cast<std::size_t>(sj * aspace.total() + aj)];
      }
    }
  CHECK(via_joint == doctest::Approx(via_occupancy).epsilon(1e-12));

  // marginals agree between the two engines as well
  JointDpOptions opts;
  opts.want_state_visitation = true;
  opts.want_window_marginals = true;
  const auto joint = joint_chain_dp(m, profile, opts);
  for (int i = 0; i < 2; ++i)
    for (int h = 0; h < 3; ++h) {
      for (int st = 0; st < 2; ++st)
        CHECK(joint.state_visitation[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)][static_cast<std::size_t>(st)] ==
              doctest::Approx(chains[static_cast<std::size_t>(i)].state_marginal[static_cast<std::size_t>(h)][static_cast<std::size_t>(st)])
                  .epsilon(1e-12));
      for (std::size_t w = 0; w < joint.window_marginals[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)].size(); ++w)
        CHECK(joint.window_marginals[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)][w] ==
              doctest::Approx(chains[static_cast<std::size_t>(i)].window_marginal[static_cast<std::size_t>(h)][w])
                  .epsilon(1e-12));
    }
}

TEST_CASE("three-player instance: marginalization, collapse and gap classes") {
  GameSpec spec;
  spec.kind = GameKind::kStatewisePotential;
  spec.num_players = 3;
  spec.horizon = 2;
  spec.mixing_lambda = 0.5;
  spec.obs_noise_beta = 0.25;
  spec.seed = 149;
  const GeneratedGame game = generate_game(spec);
  const PomgModel& m = game.model;
  SeededRng rng(14, 0);
  const PolicyProfile profile = random_profile(m, 1, rng);
  const SuperstateMdp ss(m, 1);

  // marginal reward vs exhaustive enumeration over both opponents
  const int player = 1;
  const auto r = marginal_reward(ss, profile, player);
  std::vector<std::vector<std::vector<double>>> d(3);
  for (int j = 0; j < 3; ++j)
    d[static_cast<std::size_t>(j)] = window_visitation(ss, profile.players[static_cast<std::size_t>(j)], j);
  for (int h = 0; h < 2; ++h)
    for (int w = ss.block_begin(player, h); w < ss.block_end(player, h); ++w)
      for (int a = 0; a < 2; ++a) {
        double expect = 0.0;
        for (int w0 = ss.block_begin(0, h); w0 < ss.block_end(0, h); ++w0)
          for (int w2 = ss.block_begin(2, h); w2 < ss.block_end(2, h); ++w2) {
            const double dw = d[0][static_cast<std::size_t>(h)][static_cast<std::size_t>(w0)] *
                              d[2][static_cast<std::size_t>(h)][static_cast<std::size_t>(w2)];
            if (dw == 0.0) continue;
            for (int a0 = 0; a0 < 2; ++a0)
              for (int a2 = 0; a2 < 2; ++a2) {
                const double pa = profile.players[0].prob(h, w0, a0) * profile.players[2].prob(h, w2, a2);
                if (pa == 0.0) continue;
                expect += dw * pa *
                          superstate_reward(ss, h, std::vector<int>{w0, w, w2},
                                            std::vector<int>{a0, a, a2}, player);
              }
          }
        CHECK(r[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * 2 + a)] ==
              doctest::Approx(expect).epsilon(1e-12));
      }

  // m = H collapse of values and of the two gap classes
  const SuperstateMdp full(m, 2);
  const PolicyProfile wide = random_profile(m, 2, rng);
  const auto v_true = exact_window_policy_value(m, wide);
  for (int i = 0; i < 3; ++i)
    CHECK(marginal_policy_value(full, wide, i) ==
          doctest::Approx(v_true[static_cast<std::size_t>(i)]).epsilon(1e-10));
  const NashGapReport report = nash_gap(full, wide);
  for (const auto& g : report.players) {
    CHECK(g.gap_window >= -1e-9);
    CHECK(g.gap_history == doctest::Approx(g.gap_window).epsilon(1e-9));
  }

  // exact potential at full window: mismatch must vanish
  std::vector<DeviationTriple> devs;
  for (int rep = 0; rep < 3; ++rep) {
    DeviationTriple dev;
    dev.profile = random_profile(m, 2, rng);
    dev.player = rep;
    dev.alternative = random_policy(2, 2, 2, 2, rng);
    devs.push_back(std::move(dev));
  }
  CHECK(near_potential_audit(m, full, game.potential, devs, 0.0).max_mismatch <= 1e-10);
}

TEST_CASE("pairwise identity: special cases and the worked example") {
  const std::vector<double> p{1.0, 0.0}, q{0.0, 1.0}, x{3.0, 1.0};
  const auto [lhs, rhs] = pairwise_identity(p, q, x);
  CHECK(lhs == doctest::Approx(2.0));
  CHECK(rhs == doctest::Approx(2.0));

  const std::vector<double> same{0.4, 0.6};
  const auto [l2, r2] = pairwise_identity(same, same, x);
  CHECK(l2 == doctest::Approx(0.0));
  CHECK(r2 == doctest::Approx(0.0));

  const std::vector<double> constant{5.0, 5.0};
  const auto [l3, r3] = pairwise_identity(p, q, constant);
  CHECK(l3 == doctest::Approx(0.0));
  CHECK(r3 == doctest::Approx(0.0));

  CHECK_THROWS_AS((void)pairwise_identity(p, std::vector<double>{1.0}, x), std::invalid_argument);
  CHECK_THROWS_AS((void)pairwise_identity(p, q, std::vector<double>{std::nan(""), 0.0}),
                  std::invalid_argument);
}
