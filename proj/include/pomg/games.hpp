#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pomg/model.hpp"
#include "pomg/oracle.hpp"

namespace pomg {

enum class GameKind { kIdenticalInterest, kStatewisePotential, kRandomDecoupled };

std::string to_string(GameKind kind);
GameKind game_kind_from_string(const std::string& name);

struct GameSpec {
  GameKind kind = GameKind::kIdenticalInterest;
  int num_players = 2;
  int horizon = 3;
  std::vector<int> state_sizes;   // empty means all 2
  std::vector<int> action_sizes;  // empty means all 2
  std::vector<int> obs_sizes;     // empty means all 2
  double mixing_lambda = 0.5;     // uniform weight mixed into transitions and init
  double obs_noise_beta = 0.1;    // observation probability floor
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> phi;  // optional supplied stage potential

  void resolve_sizes();  // fills empty size vectors with 2s
};

struct GeneratedGame {
  PomgModel model;
  GameKind kind = GameKind::kIdenticalInterest;
  bool has_potential = false;
  PotentialSpec potential;  // valid when has_potential
  // Certified floors: λ as configured, β and α as measured minima of the
  // emitted tables (observation entries; init and transition entries).
  double floor_lambda = 0.0;
  double floor_beta = 0.0;
  double floor_alpha = 0.0;
};

/**
 * Seed-deterministic generator for instances satisfying the structural
 * assumptions by construction: transitions and init mixed with uniform at
 * weight λ (mixing for filter stability and the visitation floor), rows of
 * the observation kernel mixed at weight β·|O_i| (observation floor β).
 * Identical-interest and statewise-potential kinds come with stage tables
 * φ_h certifying the potential structure.
 */
GeneratedGame generate_game(const GameSpec& spec);

}  // namespace pomg
