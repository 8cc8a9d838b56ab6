#include "pomg/games.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pomg/rng.hpp"

namespace pomg {

std::string to_string(GameKind kind) {
  switch (kind) {
    case GameKind::kIdenticalInterest: return "identical-interest";
    case GameKind::kStatewisePotential: return "statewise-potential";
    case GameKind::kRandomDecoupled: return "random-decoupled";
  }
  return "unknown";
}

GameKind game_kind_from_string(const std::string& name) {
  if (name == "identical-interest") return GameKind::kIdenticalInterest;
  if (name == "statewise-potential") return GameKind::kStatewisePotential;
  if (name == "random-decoupled") return GameKind::kRandomDecoupled;
  throw std::invalid_argument("unknown game kind: " + name);
}

void GameSpec::resolve_sizes() {
  if (state_sizes.empty()) state_sizes.assign(static_cast<std::size_t>(num_players), 2);
  if (action_sizes.empty()) action_sizes.assign(static_cast<std::size_t>(num_players), 2);
  if (obs_sizes.empty()) obs_sizes.assign(static_cast<std::size_t>(num_players), 2);
}

namespace {

// Random stochastic row mixed with uniform at `mix`, exactly renormalized.
std::vector<double> mixed_row(int n, double mix, SeededRng& rng) {
  std::vector<double> row(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (auto& p : row) {
    p = rng.next_double() + 1e-6;
    sum += p;
  }
  const double uniform = mix / n;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < row.size(); ++k) {
    row[k] = uniform + (1.0 - mix) * row[k] / sum;
    acc += row[k];
  }
  row.back() = 1.0 - acc;
  return row;
}

}  // namespace

GeneratedGame generate_game(const GameSpec& spec_in) {
  GameSpec spec = spec_in;
  spec.resolve_sizes();
  if (spec.num_players < 1 || spec.horizon < 1)
    throw std::invalid_argument("generate_game: players and horizon must be >= 1");
  if (!(spec.mixing_lambda >= 0.0 && spec.mixing_lambda <= 1.0))
    throw std::invalid_argument("generate_game: mixing_lambda outside [0,1]");
  if (!(spec.obs_noise_beta > 0.0))
    throw std::invalid_argument("generate_game: obs_noise_beta must be positive");
  for (int o : spec.obs_sizes)
    if (spec.obs_noise_beta * o > 1.0 + 1e-12)
      throw std::invalid_argument("generate_game: infeasible observation floor (beta*|O| > 1)");

  const int N = spec.num_players;
  const int H = spec.horizon;
  SeededRng rng(spec.seed, 0);

  PomgModel model;
  model.num_players = N;
  model.horizon = H;
  model.state_sizes = spec.state_sizes;
  model.action_sizes = spec.action_sizes;
  model.obs_sizes = spec.obs_sizes;
  model.transition.resize(static_cast<std::size_t>(N));
  model.observation.resize(static_cast<std::size_t>(N));
  model.reward.resize(static_cast<std::size_t>(N));
  model.init.resize(static_cast<std::size_t>(N));

  GeneratedGame out;
  out.kind = spec.kind;
  out.floor_lambda = spec.mixing_lambda;
  out.floor_beta = 1.0;
  out.floor_alpha = 1.0;

  for (int i = 0; i < N; ++i) {
    const int S = spec.state_sizes[static_cast<std::size_t>(i)];
    const int A = spec.action_sizes[static_cast<std::size_t>(i)];
    const int O = spec.obs_sizes[static_cast<std::size_t>(i)];
    auto& trans = model.transition[static_cast<std::size_t>(i)];
    auto& obs = model.observation[static_cast<std::size_t>(i)];
    trans.resize(static_cast<std::size_t>(H));
    obs.resize(static_cast<std::size_t>(H));
    for (int h = 0; h < H; ++h) {
      trans[static_cast<std::size_t>(h)].reserve(static_cast<std::size_t>(S * A * S));
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          const auto row = mixed_row(S, spec.mixing_lambda, rng);
          for (double p : row) {
            trans[static_cast<std::size_t>(h)].push_back(p);
            out.floor_alpha = std::min(out.floor_alpha, p);
          }
        }
      obs[static_cast<std::size_t>(h)].reserve(static_cast<std::size_t>(S * O));
      for (int s = 0; s < S; ++s) {
        const auto row = mixed_row(O, spec.obs_noise_beta * O, rng);
        for (double p : row) {
          obs[static_cast<std::size_t>(h)].push_back(p);
          out.floor_beta = std::min(out.floor_beta, p);
        }
      }
    }
    const auto mu = mixed_row(S, spec.mixing_lambda, rng);
    for (double p : mu) out.floor_alpha = std::min(out.floor_alpha, p);
    model.init[static_cast<std::size_t>(i)] = mu;
  }

  const MixedRadix sspace = model.joint_state_space();
  const MixedRadix aspace = model.joint_action_space();
  const std::int64_t SJ = sspace.total(), AJ = aspace.total();
  const std::size_t cells = static_cast<std::size_t>(SJ * AJ);

  auto draw_table = [&]() {
    std::vector<double> t(cells);
    for (auto& v : t) v = rng.next_double();
    return t;
  };

  switch (spec.kind) {
    case GameKind::kIdenticalInterest: {
      std::vector<std::vector<double>> shared(static_cast<std::size_t>(H));
      for (auto& t : shared) t = draw_table();
      for (int i = 0; i < N; ++i) model.reward[static_cast<std::size_t>(i)] = shared;
      out.has_potential = true;
      out.potential.phi = shared;
      break;
    }
    case GameKind::kStatewisePotential: {
      // r_i = φ + u_i with u_i free of player i's own (s_i, a_i); a common
      // per-step scale keeps one φ valid for every player after the [0,1]
      // renormalization.
      std::vector<std::vector<double>> phi(static_cast<std::size_t>(H));
      if (!spec.phi.empty()) {
        if (static_cast<int>(spec.phi.size()) != H)
          throw std::invalid_argument("generate_game: supplied phi has wrong step count");
        phi = spec.phi;
      } else {
        for (auto& t : phi) t = draw_table();
      }
      std::vector<std::vector<std::vector<double>>> raw(static_cast<std::size_t>(N));
      std::vector<int> sdig(static_cast<std::size_t>(N)), adig(static_cast<std::size_t>(N));
      for (int i = 0; i < N; ++i) {
        raw[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(H));
        for (int h = 0; h < H; ++h) {
          // dummy term indexed by opponents' states and actions only
          std::vector<int> opp_sizes;
          for (int j = 0; j < N; ++j)
            if (j != i) {
              opp_sizes.push_back(model.state_sizes[static_cast<std::size_t>(j)]);
              opp_sizes.push_back(model.action_sizes[static_cast<std::size_t>(j)]);
            }
          MixedRadix uspace(opp_sizes.empty() ? std::vector<int>{1} : opp_sizes);
          std::vector<double> u(static_cast<std::size_t>(uspace.total()));
          for (auto& v : u) v = rng.next_double();

          auto& table = raw[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
          table.resize(cells);
          std::vector<int> udig(opp_sizes.empty() ? std::size_t{1} : opp_sizes.size());
          for (std::int64_t sj = 0; sj < SJ; ++sj) {
            sspace.decode(sj, sdig);
            for (std::int64_t aj = 0; aj < AJ; ++aj) {
              aspace.decode(aj, adig);
              std::size_t d = 0;
              for (int j = 0; j < N; ++j)
                if (j != i) {
                  udig[d++] = sdig[static_cast<std::size_t>(j)];
                  udig[d++] = adig[static_cast<std::size_t>(j)];
                }
              const std::int64_t uj = opp_sizes.empty() ? 0 : uspace.encode(udig);
              table[static_cast<std::size_t>(sj * AJ + aj)] =
                  phi[static_cast<std::size_t>(h)][static_cast<std::size_t>(sj * AJ + aj)] +
                  u[static_cast<std::size_t>(uj)];
            }
          }
        }
      }
      // Per-step affine renormalization into [0,1]: common scale, per-player
      // offsets; φ is rescaled with the same factor.
      for (int h = 0; h < H; ++h) {
        double widest = 0.0;
        for (int i = 0; i < N; ++i) {
          const auto& t = raw[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
          const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
          widest = std::max(widest, *hi - *lo);
        }
        const double scale = widest > 0.0 ? 1.0 / widest : 1.0;
        for (int i = 0; i < N; ++i) {
          auto& t = raw[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
          const double lo = *std::min_element(t.begin(), t.end());
          for (auto& v : t) v = (v - lo) * scale;
        }
        for (auto& v : phi[static_cast<std::size_t>(h)]) v *= scale;
      }
      for (int i = 0; i < N; ++i) model.reward[static_cast<std::size_t>(i)] = raw[static_cast<std::size_t>(i)];
      out.has_potential = true;
      out.potential.phi = std::move(phi);
      break;
    }
    case GameKind::kRandomDecoupled: {
      for (int i = 0; i < N; ++i) {
        model.reward[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(H));
        for (int h = 0; h < H; ++h)
          model.reward[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)] = draw_table();
      }
      out.has_potential = false;
      break;
    }
  }

  require_valid(model);
  out.model = std::move(model);
  return out;
}

}  // namespace pomg
