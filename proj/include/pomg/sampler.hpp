#pragma once

#include <cstdint>
#include <vector>

#include "pomg/model.hpp"
#include "pomg/policy.hpp"
#include "pomg/rng.hpp"

namespace pomg {

/// What a single player gets to see of one episode: its own actions,
/// observations and rewards, nothing else. Estimators only ever receive
/// these views, which is what enforces the independent-learning barrier.
struct PlayerView {
  std::vector<int> actions;
  std::vector<int> observations;
  std::vector<double> rewards;
};

struct Episode {
  std::vector<PlayerView> players;
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;
};

/// Rolls out one episode of the POMG under a finite-window product policy.
/// Draw order is fixed (init states, then per step: observations, actions,
/// next states, each in player order) so a given stream yields one episode.
Episode sample_episode(const PomgModel& model, const PolicyProfile& profile, SeededRng& rng);

/// Batch sampling with one stream per episode (stream = first_stream + t).
/// Results are byte-identical for any num_threads.
std::vector<Episode> sample_episodes(const PomgModel& model, const PolicyProfile& profile,
                                     std::uint64_t master_seed, std::uint64_t first_stream,
                                     int count, int num_threads = 1);

/// POMG_THREADS environment variable, else 1.
int default_thread_count();

}  // namespace pomg
