#include "pomg/superstate.hpp"

#include <stdexcept>
#include <string>

namespace pomg {

WindowBelief window_belief(const PomgModel& model, int player, int h,
                           const std::vector<WindowPair>& pairs, std::span<const double> prior) {
  const int S = model.state_sizes[static_cast<std::size_t>(player)];
  const int len = static_cast<int>(pairs.size());
  if (len > h) throw std::invalid_argument("window_belief: window longer than history at step");
  for (const auto& pair : pairs)
    if (pair.action < 0 || pair.action >= model.action_sizes[static_cast<std::size_t>(player)] ||
        pair.obs < 0 || pair.obs >= model.obs_sizes[static_cast<std::size_t>(player)])
      throw std::invalid_argument("window_belief: pair component out of range");
  const int start = h - len;  // global step of the oldest pair

  WindowBelief b;
  b.probs.assign(static_cast<std::size_t>(S), 0.0);
  std::vector<double> cur(static_cast<std::size_t>(S));
  if (prior.empty()) {
    for (int s = 0; s < S; ++s) cur[static_cast<std::size_t>(s)] = model.init[static_cast<std::size_t>(player)][static_cast<std::size_t>(s)];
  } else {
    if (static_cast<int>(prior.size()) != S) throw std::invalid_argument("window_belief: prior arity mismatch");
    for (int s = 0; s < S; ++s) cur[static_cast<std::size_t>(s)] = prior[static_cast<std::size_t>(s)];
  }

  std::vector<double> nxt(static_cast<std::size_t>(S));
  for (int k = 0; k < len; ++k) {
    const int g = start + k;
    const auto& pair = pairs[static_cast<std::size_t>(k)];
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      const double weighted = cur[static_cast<std::size_t>(s)] * model.obs_prob(player, g, s, pair.obs);
      if (weighted == 0.0) continue;
      const auto trow = model.trans_row(player, g, s, pair.action);
      for (int s2 = 0; s2 < S; ++s2) nxt[static_cast<std::size_t>(s2)] += weighted * trow[static_cast<std::size_t>(s2)];
    }
    cur.swap(nxt);
  }

  double mass = 0.0;
  for (double p : cur) mass += p;
  b.mass = mass;
  b.reachable = mass > 0.0;
  if (b.reachable)
    for (int s = 0; s < S; ++s) b.probs[static_cast<std::size_t>(s)] = cur[static_cast<std::size_t>(s)] / mass;
  return b;
}

WindowBelief window_belief(const PomgModel& model, const HistoryWindow& window, int window_len,
                           std::span<const double> prior) {
  if (window.player < 0 || window.player >= model.num_players)
    throw std::invalid_argument("window_belief: player out of range");
  const int expected = WindowCodec::length_at_step(window.step, window_len);
  if (static_cast<int>(window.pairs.size()) != expected)
    throw std::invalid_argument("window_belief: window length must be min(step, m)");
  return window_belief(model, window.player, window.step, window.pairs, prior);
}

SuperstateMdp::SuperstateMdp(PomgModel model, int window_len, SuperstateOptions opts)
    : model_(std::move(model)), m_(window_len), opts_(std::move(opts)) {
  require_valid(model_);
  if (m_ < 0) throw std::invalid_argument("SuperstateMdp: negative window length");
  if (!opts_.prior_override.empty() &&
      static_cast<int>(opts_.prior_override.size()) != model_.num_players)
    throw std::invalid_argument("SuperstateMdp: prior override must cover all players");

  const int N = model_.num_players;
  const int H = model_.horizon;
  codecs_.reserve(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    codecs_.emplace_back(model_.action_sizes[static_cast<std::size_t>(i)],
                         model_.obs_sizes[static_cast<std::size_t>(i)], m_);

  beliefs_.resize(static_cast<std::size_t>(N));
  obs_margin_.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const int S = model_.state_sizes[static_cast<std::size_t>(i)];
    const int O = model_.obs_sizes[static_cast<std::size_t>(i)];
    beliefs_[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(H));
    obs_margin_[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(H));
    for (int h = 0; h < H; ++h) {
      // The override only reseeds mid-stream restarts (h > m); full-history
      // windows always filter from μ so they stay exact posteriors.
      std::span<const double> prior;
      if (!opts_.prior_override.empty() && h > m_)
        prior = opts_.prior_override[static_cast<std::size_t>(i)];
      const int wb = block_begin(i, h), we = block_end(i, h);
      auto& row = beliefs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
      auto& om = obs_margin_[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
      row.reserve(static_cast<std::size_t>(we - wb));
      om.assign(static_cast<std::size_t>((we - wb) * O), 0.0);
      for (int w = wb; w < we; ++w) {
        row.push_back(window_belief(model_, i, h, codecs_[static_cast<std::size_t>(i)].decode(w), prior));
        const WindowBelief& b = row.back();
        double* margin = om.data() + static_cast<std::size_t>((w - wb) * O);
        if (b.reachable) {
          for (int s = 0; s < S; ++s) {
            const double bs = b.probs[static_cast<std::size_t>(s)];
            if (bs == 0.0) continue;
            const auto orow = model_.obs_row(i, h, s);
            for (int o = 0; o < O; ++o) margin[o] += bs * orow[static_cast<std::size_t>(o)];
          }
        } else {
          for (int o = 0; o < O; ++o) margin[o] = 1.0 / O;  // uniform fallback row
        }
      }
    }
  }
}

int SuperstateMdp::block_begin(int i, int h) const {
  const auto& c = codecs_[static_cast<std::size_t>(i)];
  return c.offset(WindowCodec::length_at_step(h, m_));
}

int SuperstateMdp::block_end(int i, int h) const {
  const auto& c = codecs_[static_cast<std::size_t>(i)];
  return c.offset(WindowCodec::length_at_step(h, m_) + 1);
}

const WindowBelief& SuperstateMdp::belief(int i, int h, int w) const {
  const int wb = block_begin(i, h);
  if (w < wb || w >= block_end(i, h))
    throw std::invalid_argument("SuperstateMdp::belief: window inconsistent with step " + std::to_string(h));
  return beliefs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)][static_cast<std::size_t>(w - wb)];
}

double SuperstateMdp::obs_margin(int i, int h, int w, int o) const {
  const int wb = block_begin(i, h);
  const int O = model_.obs_sizes[static_cast<std::size_t>(i)];
  return obs_margin_[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)]
                    [static_cast<std::size_t>((w - wb) * O + o)];
}

double SuperstateMdp::kernel_prob(int i, int h, int w, int a, int w_next) const {
  const auto& c = codecs_[static_cast<std::size_t>(i)];
  const int len_next = c.length_of(w_next);
  if (len_next == 0) return 0.0;  // an extension always carries at least one pair
  const auto pairs = c.decode(w_next);
  const WindowPair last = pairs.back();
  if (last.action != a) return 0.0;
  if (c.extend(w, a, last.obs) != w_next) return 0.0;
  return obs_margin(i, h, w, last.obs);
}

double superstate_reward(const SuperstateMdp& ss, int h, std::span<const int> windows,
                         std::span<const int> actions, int player) {
  const PomgModel& model = ss.model();
  const int N = model.num_players;
  if (static_cast<int>(windows.size()) != N || static_cast<int>(actions.size()) != N)
    throw std::invalid_argument("superstate_reward: joint arity mismatch");
  std::vector<const WindowBelief*> b(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    b[static_cast<std::size_t>(i)] = &ss.belief(i, h, windows[static_cast<std::size_t>(i)]);
    if (!b[static_cast<std::size_t>(i)]->reachable)
      throw std::invalid_argument("superstate_reward: unreachable window component at player " +
                                  std::to_string(i));
  }
  const MixedRadix sspace = model.joint_state_space();
  const std::int64_t aj = model.joint_action_space().encode(actions);
  std::vector<int> s(static_cast<std::size_t>(N), 0);
  double total = 0.0;
  do {
    double weight = 1.0;
    for (int i = 0; i < N; ++i)
      weight *= b[static_cast<std::size_t>(i)]->probs[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])];
    if (weight != 0.0) total += weight * model.reward_at(player, h, sspace.encode(s), aj);
  } while (sspace.advance(s));
  return total;
}

std::vector<std::vector<double>> window_visitation(const SuperstateMdp& ss,
                                                   const FiniteWindowPolicy& policy, int player) {
  const PomgModel& model = ss.model();
  const int H = model.horizon;
  const int A = model.action_sizes[static_cast<std::size_t>(player)];
  const int O = model.obs_sizes[static_cast<std::size_t>(player)];
  const WindowCodec& codec = ss.codec(player);

  std::vector<std::vector<double>> d(static_cast<std::size_t>(H),
                                     std::vector<double>(static_cast<std::size_t>(codec.total()), 0.0));
  d[0][0] = 1.0;  // empty window
  for (int h = 0; h + 1 < H; ++h) {
    const int wb = ss.block_begin(player, h), we = ss.block_end(player, h);
    for (int w = wb; w < we; ++w) {
      const double mass = d[static_cast<std::size_t>(h)][static_cast<std::size_t>(w)];
      if (mass == 0.0) continue;
      for (int a = 0; a < A; ++a) {
        const double pa = policy.prob(h, w, a);
        if (pa == 0.0) continue;
        for (int o = 0; o < O; ++o) {
          const double po = ss.obs_margin(player, h, w, o);
          if (po == 0.0) continue;
          d[static_cast<std::size_t>(h + 1)][static_cast<std::size_t>(ss.successor(player, h, w, a, o))] +=
              mass * pa * po;
        }
      }
    }
  }
  return d;
}

namespace {

// Surrogate state-action weights Σ_w d_j(w) π_j(a|w) b_j(s|w) for one
// opponent; the product over opponents contracts the joint reward table.
std::vector<std::vector<double>> surrogate_state_action(const SuperstateMdp& ss,
                                                        const FiniteWindowPolicy& policy, int j) {
  const PomgModel& model = ss.model();
  const int H = model.horizon;
  const int S = model.state_sizes[static_cast<std::size_t>(j)];
  const int A = model.action_sizes[static_cast<std::size_t>(j)];
  const auto d = window_visitation(ss, policy, j);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(H),
                                       std::vector<double>(static_cast<std::size_t>(S * A), 0.0));
  for (int h = 0; h < H; ++h) {
    const int wb = ss.block_begin(j, h), we = ss.block_end(j, h);
    for (int w = wb; w < we; ++w) {
      const double mass = d[static_cast<std::size_t>(h)][static_cast<std::size_t>(w)];
      if (mass == 0.0) continue;
      const WindowBelief& b = ss.belief(j, h, w);
      for (int s = 0; s < S; ++s) {
        const double bs = b.probs[static_cast<std::size_t>(s)];
        if (bs == 0.0) continue;
        for (int a = 0; a < A; ++a)
          out[static_cast<std::size_t>(h)][static_cast<std::size_t>(s * A + a)] +=
              mass * bs * policy.prob(h, w, a);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> marginal_reward(const SuperstateMdp& ss,
                                                 const PolicyProfile& profile, int player) {
  const PomgModel& model = ss.model();
  const int N = model.num_players;
  const int H = model.horizon;
  const int S = model.state_sizes[static_cast<std::size_t>(player)];
  const int A = model.action_sizes[static_cast<std::size_t>(player)];
  const WindowCodec& codec = ss.codec(player);

  std::vector<std::vector<std::vector<double>>> opp;  // per opponent: [h][s*A+a]
  std::vector<int> opp_ids;
  for (int j = 0; j < N; ++j)
    if (j != player) {
      opp_ids.push_back(j);
      opp.push_back(surrogate_state_action(ss, profile.players[static_cast<std::size_t>(j)], j));
    }

  const MixedRadix sspace = model.joint_state_space();
  const MixedRadix aspace = model.joint_action_space();
  std::vector<int> s(static_cast<std::size_t>(N)), a(static_cast<std::size_t>(N));

  std::vector<std::vector<double>> out(
      static_cast<std::size_t>(H),
      std::vector<double>(static_cast<std::size_t>(codec.total() * A), 0.0));

  for (int h = 0; h < H; ++h) {
    // G(s_i, a_i) = E over opponents' surrogate state-action weights
    std::vector<double> g(static_cast<std::size_t>(S * A), 0.0);
    std::fill(s.begin(), s.end(), 0);
    do {
      std::fill(a.begin(), a.end(), 0);
      do {
        double weight = 1.0;
        for (std::size_t k = 0; k < opp_ids.size(); ++k) {
          const int j = opp_ids[k];
          weight *= opp[k][static_cast<std::size_t>(h)][static_cast<std::size_t>(
              s[static_cast<std::size_t>(j)] * model.action_sizes[static_cast<std::size_t>(j)] +
              a[static_cast<std::size_t>(j)])];
          if (weight == 0.0) break;
        }
        if (weight != 0.0)
          g[static_cast<std::size_t>(s[static_cast<std::size_t>(player)] * A +
                                     a[static_cast<std::size_t>(player)])] +=
              weight * model.reward_at(player, h, sspace.encode(s), aspace.encode(a));
      } while (aspace.advance(a));
    } while (sspace.advance(s));

    const int wb = ss.block_begin(player, h), we = ss.block_end(player, h);
    for (int w = wb; w < we; ++w) {
      const WindowBelief& b = ss.belief(player, h, w);
      if (!b.reachable) continue;
      for (int ai = 0; ai < A; ++ai) {
        double r = 0.0;
        for (int si = 0; si < S; ++si)
          r += b.probs[static_cast<std::size_t>(si)] * g[static_cast<std::size_t>(si * A + ai)];
        out[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * A + ai)] = r;
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> exact_marginal_q(const SuperstateMdp& ss,
                                                  const PolicyProfile& profile, int player) {
  const PomgModel& model = ss.model();
  const int H = model.horizon;
  const int A = model.action_sizes[static_cast<std::size_t>(player)];
  const int O = model.obs_sizes[static_cast<std::size_t>(player)];
  const WindowCodec& codec = ss.codec(player);
  const auto& policy = profile.players[static_cast<std::size_t>(player)];

  auto r = marginal_reward(ss, profile, player);
  std::vector<std::vector<double>> q(
      static_cast<std::size_t>(H),
      std::vector<double>(static_cast<std::size_t>(codec.total() * A), 0.0));

  for (int h = H - 1; h >= 0; --h) {
    const int wb = ss.block_begin(player, h), we = ss.block_end(player, h);
    for (int w = wb; w < we; ++w) {
      for (int a = 0; a < A; ++a) {
        double val = r[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * A + a)];
        if (h + 1 < H) {
          for (int o = 0; o < O; ++o) {
            const double po = ss.obs_margin(player, h, w, o);
            if (po == 0.0) continue;
            const int w2 = ss.successor(player, h, w, a, o);
            double cont = 0.0;
            for (int a2 = 0; a2 < A; ++a2)
              cont += policy.prob(h + 1, w2, a2) *
                      q[static_cast<std::size_t>(h + 1)][static_cast<std::size_t>(w2 * A + a2)];
            val += po * cont;
          }
        }
        q[static_cast<std::size_t>(h)][static_cast<std::size_t>(w * A + a)] = val;
      }
    }
  }
  return q;
}

double marginal_policy_value(const SuperstateMdp& ss, const PolicyProfile& profile, int player) {
  const auto q = exact_marginal_q(ss, profile, player);
  const int A = ss.model().action_sizes[static_cast<std::size_t>(player)];
  const auto& policy = profile.players[static_cast<std::size_t>(player)];
  double v = 0.0;
  for (int a = 0; a < A; ++a) v += policy.prob(0, 0, a) * q[0][static_cast<std::size_t>(a)];
  return v;
}

}  // namespace pomg
