#include "pomg/learner.hpp"

#include <cmath>
#include <stdexcept>

namespace pomg {

void LearnerConfig::validate() const {
  if (iterations < 1 || episodes_per_iter < 1 || window_len < 1)
    throw std::invalid_argument("LearnerConfig: K, T, m must be >= 1");
  if (!(exploration_eps > 0.0 && exploration_eps <= 1.0))
    throw std::invalid_argument("LearnerConfig: exploration_eps outside (0,1]");
  if (!(stepsize_scale > 0.0)) throw std::invalid_argument("LearnerConfig: stepsize_scale <= 0");
  if (num_threads < 1) throw std::invalid_argument("LearnerConfig: num_threads < 1");
}

double stepsize_schedule(int k, int num_players, int horizon, double scale) {
  if (k < 1) throw std::invalid_argument("stepsize_schedule: k < 1");
  const double n = static_cast<double>(num_players);
  const double h = static_cast<double>(horizon);
  const double eta = scale / std::sqrt(4.0 * n * n * h * h * h * static_cast<double>(k));
  return std::min(eta, 0.5);
}

WindowModelTables tables_from_estimates(const TransitionEstimate& transitions,
                                        const RewardEstimate& rewards) {
  WindowModelTables t{transitions.dims, transitions.codec, {}, {}};
  const int A = t.dims.num_actions, O = t.dims.num_obs, W = t.codec.total();
  t.p.assign(static_cast<std::size_t>(t.dims.horizon),
             std::vector<double>(static_cast<std::size_t>(W * A * O), 0.0));
  t.r.assign(static_cast<std::size_t>(t.dims.horizon),
             std::vector<double>(static_cast<std::size_t>(W * A), 0.0));
  for (int h = 0; h < t.dims.horizon; ++h)
    for (int w = 0; w < W; ++w)
      for (int a = 0; a < A; ++a) {
        t.r[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * A + a)] = rewards.r_hat(h, w, a);
        for (int o = 0; o < O; ++o)
          t.p[static_cast<std::size_t>(h)][static_cast<std::size_t>((w * A + a) * O + o)] =
              transitions.p_hat(h, w, a, o);
      }
  return t;
}

WindowModelTables exact_window_tables(const SuperstateMdp& ss, const PolicyProfile& profile,
                                      int player) {
  const PomgModel& model = ss.model();
  WindowModelTables t{
      {model.horizon, model.action_sizes[static_cast<std::size_t>(player)],
       model.obs_sizes[static_cast<std::size_t>(player)]},
      ss.codec(player),
      {},
      {}};
  const int A = t.dims.num_actions, O = t.dims.num_obs, W = t.codec.total();
  t.p.assign(static_cast<std::size_t>(t.dims.horizon),
             std::vector<double>(static_cast<std::size_t>(W * A * O), 0.0));
  t.r = marginal_reward(ss, profile, player);
  for (int h = 0; h < t.dims.horizon; ++h) {
    const int wb = ss.block_begin(player, h), we = ss.block_end(player, h);
    for (int w = wb; w < we; ++w)
      for (int a = 0; a < A; ++a)
        for (int o = 0; o < O; ++o)
          t.p[static_cast<std::size_t>(h)][static_cast<std::size_t>((w * A + a) * O + o)] =
              ss.obs_margin(player, h, w, o);
  }
  return t;
}

std::vector<std::vector<double>> backward_q(const WindowModelTables& tables,
                                            const FiniteWindowPolicy& policy) {
  const int H = tables.dims.horizon;
  const int A = tables.dims.num_actions;
  const int O = tables.dims.num_obs;
  const int W = tables.codec.total();
  if (policy.horizon() != H || policy.num_actions() != A || policy.codec().total() != W)
    throw std::invalid_argument("backward_q: policy/tables dimension mismatch");

  std::vector<std::vector<double>> q(static_cast<std::size_t>(H),
                                     std::vector<double>(static_cast<std::size_t>(W * A), 0.0));
  for (int h = H - 1; h >= 0; --h) {
    for (int w = 0; w < W; ++w) {
      for (int a = 0; a < A; ++a) {
        double val = tables.r[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * A + a)];
        if (h + 1 < H) {
          for (int o = 0; o < O; ++o) {
            const double p = tables.p[static_cast<std::size_t>(h)][static_cast<std::size_t>((w * A + a) * O + o)];
            if (p == 0.0) continue;
            const int w2 = tables.codec.extend(w, a, o);
            double cont = 0.0;
            for (int a2 = 0; a2 < A; ++a2)
              cont += policy.prob(h + 1, w2, a2) *
                      q[static_cast<std::size_t>(h + 1)][static_cast<std::size_t>(w2 * A + a2)];
            val += p * cont;
          }
        }
        if (std::isnan(val)) throw std::runtime_error("backward_q: NaN in Q recursion");
        q[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * A + a)] = val;
      }
    }
  }
  return q;
}

std::vector<IterationRecord> run_learning(const PomgModel& model, const LearnerConfig& config,
                                          const GapEvaluator& gap_eval) {
  require_valid(model);
  config.validate();
  const int N = model.num_players;
  const int H = model.horizon;
  const int T = config.episodes_per_iter;

  PolicyProfile profile{config.window_len, {}};
  for (int i = 0; i < N; ++i)
    profile.players.push_back(FiniteWindowPolicy::uniform(
        H, model.action_sizes[static_cast<std::size_t>(i)], model.obs_sizes[static_cast<std::size_t>(i)],
        config.window_len));

  std::vector<IterationRecord> records;
  records.reserve(static_cast<std::size_t>(config.iterations));
  std::int64_t consumed = 0;

  for (int k = 1; k <= config.iterations; ++k) {
    const double eta = stepsize_schedule(k, N, H, config.stepsize_scale);
    const PolicyProfile behavior = mix_exploration(profile, config.exploration_eps);
    auto episodes = sample_episodes(model, behavior, config.seed,
                                    static_cast<std::uint64_t>(consumed), T, config.num_threads);
    consumed += T;

    IterationRecord rec;
    rec.k = k;
    rec.eta = eta;
    rec.episodes_consumed = consumed;
    rec.value_estimates.assign(static_cast<std::size_t>(N), 0.0);
    rec.q_tables.resize(static_cast<std::size_t>(N));
    rec.min_visit = -1;

    // Split the batch into per-player views; estimators never see more.
    std::vector<std::vector<PlayerView>> views(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) views[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(T));
    for (auto& ep : episodes) {
      for (int i = 0; i < N; ++i) {
        double ret = 0.0;
        for (double r : ep.players[static_cast<std::size_t>(i)].rewards) ret += r;
        rec.value_estimates[static_cast<std::size_t>(i)] += ret;
        views[static_cast<std::size_t>(i)].push_back(std::move(ep.players[static_cast<std::size_t>(i)]));
      }
    }
    episodes.clear();  // on-policy: batch is never reused
    for (double& v : rec.value_estimates) v /= static_cast<double>(T);

    PolicyProfile updated = profile;
    for (int i = 0; i < N; ++i) {
      const PlayerDims dims{H, model.action_sizes[static_cast<std::size_t>(i)],
                            model.obs_sizes[static_cast<std::size_t>(i)]};
      const auto p_est = estimate_transitions(views[static_cast<std::size_t>(i)], dims, config.window_len);
      const auto r_est = estimate_rewards(views[static_cast<std::size_t>(i)], dims, config.window_len);
      const std::int64_t mv = min_visit_count(p_est, config.window_len);
      rec.min_visit = rec.min_visit < 0 ? mv : std::min(rec.min_visit, mv);

      const auto tables = tables_from_estimates(p_est, r_est);
      auto q = backward_q(tables, profile.players[static_cast<std::size_t>(i)]);

      auto& pol = updated.players[static_cast<std::size_t>(i)];
      const int A = dims.num_actions;
      for (int h = 0; h < H; ++h)
        for (int w = 0; w < pol.codec().total(); ++w) {
          const auto next_row = soft_update(
              profile.players[static_cast<std::size_t>(i)].row(h, w),
              std::span<const double>(q[static_cast<std::size_t>(h)].data() + static_cast<std::size_t>(w * A),
                                      static_cast<std::size_t>(A)),
              eta);
          pol.set_row(h, w, next_row);
        }
      rec.q_tables[static_cast<std::size_t>(i)] = std::move(q);
    }
    profile = updated;
    rec.policies = profile;
    if (gap_eval && config.eval_cadence > 0 && k % config.eval_cadence == 0)
      rec.gap = gap_eval(profile, k);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace pomg
