#include "pomg/sampler.hpp"

#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace pomg {

namespace {

void check_compatible(const PomgModel& model, const PolicyProfile& profile) {
  if (static_cast<int>(profile.players.size()) != model.num_players)
    throw std::invalid_argument("profile/model player count mismatch");
  for (int i = 0; i < model.num_players; ++i) {
    const auto& p = profile.players[static_cast<std::size_t>(i)];
    if (p.horizon() != model.horizon || p.num_actions() != model.action_sizes[static_cast<std::size_t>(i)] ||
        p.codec().num_obs() != model.obs_sizes[static_cast<std::size_t>(i)] ||
        p.window_len() != profile.window_len)
      throw std::invalid_argument("profile/model dimension mismatch at player " + std::to_string(i));
  }
}

}  // namespace

Episode sample_episode(const PomgModel& model, const PolicyProfile& profile, SeededRng& rng) {
  check_compatible(model, profile);
  const int N = model.num_players;
  const int H = model.horizon;

  Episode ep;
  ep.players.resize(static_cast<std::size_t>(N));
  for (auto& v : ep.players) {
    v.actions.reserve(static_cast<std::size_t>(H));
    v.observations.reserve(static_cast<std::size_t>(H));
    v.rewards.reserve(static_cast<std::size_t>(H));
  }

  std::vector<int> state(static_cast<std::size_t>(N));
  std::vector<int> window(static_cast<std::size_t>(N), 0);  // codec index, starts empty
  std::vector<int> obs(static_cast<std::size_t>(N)), act(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) state[static_cast<std::size_t>(i)] = rng.sample(model.init[static_cast<std::size_t>(i)]);

  const MixedRadix sspace = model.joint_state_space();
  const MixedRadix aspace = model.joint_action_space();

  for (int h = 0; h < H; ++h) {
    for (int i = 0; i < N; ++i)
      obs[static_cast<std::size_t>(i)] = rng.sample(model.obs_row(i, h, state[static_cast<std::size_t>(i)]));
    for (int i = 0; i < N; ++i)
      act[static_cast<std::size_t>(i)] =
          rng.sample(profile.players[static_cast<std::size_t>(i)].row(h, window[static_cast<std::size_t>(i)]));
    const std::int64_t sj = sspace.encode(state);
    const std::int64_t aj = aspace.encode(act);
    for (int i = 0; i < N; ++i) {
      auto& v = ep.players[static_cast<std::size_t>(i)];
      v.actions.push_back(act[static_cast<std::size_t>(i)]);
      v.observations.push_back(obs[static_cast<std::size_t>(i)]);
      v.rewards.push_back(model.reward_at(i, h, sj, aj));
    }
    for (int i = 0; i < N; ++i)
      window[static_cast<std::size_t>(i)] = profile.players[static_cast<std::size_t>(i)].codec().extend(
          window[static_cast<std::size_t>(i)], act[static_cast<std::size_t>(i)], obs[static_cast<std::size_t>(i)]);
    if (h + 1 < H)
      for (int i = 0; i < N; ++i)
        state[static_cast<std::size_t>(i)] =
            rng.sample(model.trans_row(i, h, state[static_cast<std::size_t>(i)], act[static_cast<std::size_t>(i)]));
  }
  return ep;
}

std::vector<Episode> sample_episodes(const PomgModel& model, const PolicyProfile& profile,
                                     std::uint64_t master_seed, std::uint64_t first_stream,
                                     int count, int num_threads) {
  check_compatible(model, profile);
  std::vector<Episode> episodes(static_cast<std::size_t>(count));
  auto worker = [&](int begin, int end) {
    for (int t = begin; t < end; ++t) {
      SeededRng rng(master_seed, first_stream + static_cast<std::uint64_t>(t));
      episodes[static_cast<std::size_t>(t)] = sample_episode(model, profile, rng);
      episodes[static_cast<std::size_t>(t)].master_seed = master_seed;
      episodes[static_cast<std::size_t>(t)].index = first_stream + static_cast<std::uint64_t>(t);
    }
  };
  if (num_threads <= 1 || count < 2 * num_threads) {
    worker(0, count);
    return episodes;
  }
  std::vector<std::thread> pool;
  const int chunk = (count + num_threads - 1) / num_threads;
  for (int w = 0; w < num_threads; ++w) {
    const int begin = w * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(worker, begin, end);
  }
  for (auto& th : pool) th.join();
  return episodes;
}

int default_thread_count() {
  if (const char* env = std::getenv("POMG_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

}  // namespace pomg
