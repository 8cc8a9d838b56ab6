#include "pomg/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pomg {

using nlohmann::json;

namespace {

json table_3d(const std::vector<double>& flat, int d0, int d1, int d2) {
  json out = json::array();
  std::size_t k = 0;
  for (int a = 0; a < d0; ++a) {
    json mid = json::array();
    for (int b = 0; b < d1; ++b) {
      json row = json::array();
      for (int c = 0; c < d2; ++c) row.push_back(flat[k++]);
      mid.push_back(std::move(row));
    }
    out.push_back(std::move(mid));
  }
  return out;
}

std::vector<double> flatten_3d(const json& j, int d0, int d1, int d2, const std::string& what) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(d0 * d1 * d2));
  if (static_cast<int>(j.size()) != d0) throw std::invalid_argument(what + ": wrong outer size");
  for (const auto& mid : j) {
    if (static_cast<int>(mid.size()) != d1) throw std::invalid_argument(what + ": wrong middle size");
    for (const auto& row : mid) {
      if (static_cast<int>(row.size()) != d2) throw std::invalid_argument(what + ": wrong row size");
      for (const auto& v : row) flat.push_back(v.get<double>());
    }
  }
  return flat;
}

json table_2d(const std::vector<double>& flat, int d0, int d1) {
  json out = json::array();
  std::size_t k = 0;
  for (int a = 0; a < d0; ++a) {
    json row = json::array();
    for (int b = 0; b < d1; ++b) row.push_back(flat[k++]);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> flatten_2d(const json& j, int d0, int d1, const std::string& what) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(d0 * d1));
  if (static_cast<int>(j.size()) != d0) throw std::invalid_argument(what + ": wrong outer size");
  for (const auto& row : j) {
    if (static_cast<int>(row.size()) != d1) throw std::invalid_argument(what + ": wrong row size");
    for (const auto& v : row) flat.push_back(v.get<double>());
  }
  return flat;
}

}  // namespace

json model_to_json(const PomgModel& m) {
  json j;
  j["players"] = m.num_players;
  j["horizon"] = m.horizon;
  j["spaces"] = {{"state", m.state_sizes}, {"action", m.action_sizes}, {"obs", m.obs_sizes}};
  const std::int64_t SJ = m.joint_state_space().total();
  const std::int64_t AJ = m.joint_action_space().total();
  json trans = json::array(), obs = json::array(), rew = json::array(), init = json::array();
  for (int i = 0; i < m.num_players; ++i) {
    const int S = m.state_sizes[static_cast<std::size_t>(i)];
    const int A = m.action_sizes[static_cast<std::size_t>(i)];
    const int O = m.obs_sizes[static_cast<std::size_t>(i)];
    json ti = json::array(), oi = json::array(), ri = json::array();
    for (int h = 0; h < m.horizon; ++h) {
      ti.push_back(table_3d(m.transition[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)], S, A, S));
      oi.push_back(table_2d(m.observation[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)], S, O));
      ri.push_back(table_2d(m.reward[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)],
                            static_cast<int>(SJ), static_cast<int>(AJ)));
    }
    trans.push_back(std::move(ti));
    obs.push_back(std::move(oi));
    rew.push_back(std::move(ri));
    init.push_back(m.init[static_cast<std::size_t>(i)]);
  }
  j["transition"] = std::move(trans);
  j["observation"] = std::move(obs);
  j["reward"] = std::move(rew);
  j["init"] = std::move(init);
  return j;
}

PomgModel model_from_json(const json& j) {
  PomgModel m;
  m.num_players = j.at("players").get<int>();
  m.horizon = j.at("horizon").get<int>();
  m.state_sizes = j.at("spaces").at("state").get<std::vector<int>>();
  m.action_sizes = j.at("spaces").at("action").get<std::vector<int>>();
  m.obs_sizes = j.at("spaces").at("obs").get<std::vector<int>>();
  const std::int64_t SJ = m.joint_state_space().total();
  const std::int64_t AJ = m.joint_action_space().total();
  m.transition.resize(static_cast<std::size_t>(m.num_players));
  m.observation.resize(static_cast<std::size_t>(m.num_players));
  m.reward.resize(static_cast<std::size_t>(m.num_players));
  m.init.resize(static_cast<std::size_t>(m.num_players));
  for (int i = 0; i < m.num_players; ++i) {
    const int S = m.state_sizes[static_cast<std::size_t>(i)];
    const int A = m.action_sizes[static_cast<std::size_t>(i)];
    const int O = m.obs_sizes[static_cast<std::size_t>(i)];
    for (int h = 0; h < m.horizon; ++h) {
      m.transition[static_cast<std::size_t>(i)].push_back(
          flatten_3d(j.at("transition").at(i).at(h), S, A, S, "transition"));
      m.observation[static_cast<std::size_t>(i)].push_back(
          flatten_2d(j.at("observation").at(i).at(h), S, O, "observation"));
      m.reward[static_cast<std::size_t>(i)].push_back(flatten_2d(
          j.at("reward").at(i).at(h), static_cast<int>(SJ), static_cast<int>(AJ), "reward"));
    }
    m.init[static_cast<std::size_t>(i)] = j.at("init").at(i).get<std::vector<double>>();
  }
  return m;
}

json profile_to_json(const PolicyProfile& profile) {
  json j;
  j["window"] = profile.window_len;
  json players = json::array();
  for (const auto& p : profile.players) {
    json steps = json::array();
    for (int h = 0; h < p.horizon(); ++h) {
      json rows = json::array();
      for (int w = 0; w < p.codec().total(); ++w) {
        json row = json::array();
        for (int a = 0; a < p.num_actions(); ++a) row.push_back(p.prob(h, w, a));
        rows.push_back(std::move(row));
      }
      steps.push_back(std::move(rows));
    }
    players.push_back({{"actions", p.num_actions()}, {"obs", p.codec().num_obs()}, {"steps", steps}});
  }
  j["players"] = std::move(players);
  return j;
}

PolicyProfile profile_from_json(const json& j, int horizon) {
  PolicyProfile profile;
  profile.window_len = j.at("window").get<int>();
  for (const auto& jp : j.at("players")) {
    FiniteWindowPolicy p(horizon, jp.at("actions").get<int>(), jp.at("obs").get<int>(),
                         profile.window_len);
    const auto& steps = jp.at("steps");
    if (static_cast<int>(steps.size()) != horizon)
      throw std::invalid_argument("policy file: wrong step count");
    for (int h = 0; h < horizon; ++h) {
      const auto& rows = steps.at(h);
      if (static_cast<int>(rows.size()) != p.codec().total())
        throw std::invalid_argument("policy file: wrong window count");
      for (int w = 0; w < p.codec().total(); ++w)
        p.set_row(h, w, rows.at(w).get<std::vector<double>>());
    }
    profile.players.push_back(std::move(p));
  }
  return profile;
}

json game_spec_to_json(const GameSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["players"] = spec.num_players;
  j["horizon"] = spec.horizon;
  if (!spec.state_sizes.empty()) j["state_sizes"] = spec.state_sizes;
  if (!spec.action_sizes.empty()) j["action_sizes"] = spec.action_sizes;
  if (!spec.obs_sizes.empty()) j["obs_sizes"] = spec.obs_sizes;
  j["mixing_lambda"] = spec.mixing_lambda;
  j["obs_noise_beta"] = spec.obs_noise_beta;
  j["seed"] = spec.seed;
  return j;
}

GameSpec game_spec_from_json(const json& j) {
  GameSpec spec;
  if (j.contains("kind")) spec.kind = game_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("players")) spec.num_players = j.at("players").get<int>();
  if (j.contains("horizon")) spec.horizon = j.at("horizon").get<int>();
  if (j.contains("state_sizes")) spec.state_sizes = j.at("state_sizes").get<std::vector<int>>();
  if (j.contains("action_sizes")) spec.action_sizes = j.at("action_sizes").get<std::vector<int>>();
  if (j.contains("obs_sizes")) spec.obs_sizes = j.at("obs_sizes").get<std::vector<int>>();
  if (j.contains("mixing_lambda")) spec.mixing_lambda = j.at("mixing_lambda").get<double>();
  if (j.contains("obs_noise_beta")) spec.obs_noise_beta = j.at("obs_noise_beta").get<double>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  spec.resolve_sizes();
  return spec;
}

json certificate_to_json(const GeneratedGame& game) {
  json j;
  j["kind"] = to_string(game.kind);
  j["floors"] = {{"lambda", game.floor_lambda}, {"beta", game.floor_beta}, {"alpha", game.floor_alpha}};
  if (game.has_potential) {
    const auto& m = game.model;
    const int SJ = static_cast<int>(m.joint_state_space().total());
    const int AJ = static_cast<int>(m.joint_action_space().total());
    json phi = json::array();
    for (const auto& t : game.potential.phi) phi.push_back(table_2d(t, SJ, AJ));
    j["phi"] = std::move(phi);
  } else {
    j["phi"] = nullptr;
  }
  return j;
}

json superstate_to_json(const SuperstateMdp& ss) {
  const PomgModel& m = ss.model();
  json j;
  j["window"] = ss.window_len();
  json players = json::array();
  for (int i = 0; i < m.num_players; ++i) {
    const int O = m.obs_sizes[static_cast<std::size_t>(i)];
    json steps = json::array();
    for (int h = 0; h < m.horizon; ++h) {
      json rows = json::array();
      for (int w = ss.block_begin(i, h); w < ss.block_end(i, h); ++w) {
        const WindowBelief& b = ss.belief(i, h, w);
        json kernel = json::array();
        for (int o = 0; o < O; ++o) kernel.push_back(ss.obs_margin(i, h, w, o));
        rows.push_back({{"window", w},
                        {"belief", b.probs},
                        {"mass", b.mass},
                        {"reachable", b.reachable},
                        {"kernel", std::move(kernel)}});
      }
      steps.push_back(std::move(rows));
    }
    players.push_back({{"steps", std::move(steps)}});
  }
  j["players"] = std::move(players);
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

void save_model(const PomgModel& model, const std::string& path) {
  write_text_file(path, model_to_json(model).dump(1) + "\n");
}

PomgModel load_model(const std::string& path) {
  return model_from_json(json::parse(read_text_file(path)));
}

void save_profile(const PolicyProfile& profile, const std::string& path) {
  write_text_file(path, profile_to_json(profile).dump(1) + "\n");
}

PolicyProfile load_profile(const std::string& path, int horizon) {
  return profile_from_json(json::parse(read_text_file(path)), horizon);
}

}  // namespace pomg
