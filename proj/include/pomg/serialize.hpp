#pragma once

#include <string>

#include <json.hpp>

#include "pomg/games.hpp"
#include "pomg/model.hpp"
#include "pomg/policy.hpp"
#include "pomg/superstate.hpp"

namespace pomg {

// Model files: {"players", "horizon", "spaces", "transition"[i][h][s][a][s'],
// "observation"[i][h][s][o], "reward"[i][h][joint_s][joint_a] (mixed-radix,
// player 0 most significant), "init"[i][s]}.
nlohmann::json model_to_json(const PomgModel& model);
PomgModel model_from_json(const nlohmann::json& j);

// Policy files: {"window", "players"[i] = {"actions", "obs", "steps"[h][w] = row}}
// with rows positioned by codec index.
nlohmann::json profile_to_json(const PolicyProfile& profile);
PolicyProfile profile_from_json(const nlohmann::json& j, int horizon);

nlohmann::json game_spec_to_json(const GameSpec& spec);
GameSpec game_spec_from_json(const nlohmann::json& j);

/// Sidecar certificate for generated games: kind, floors, φ tables.
nlohmann::json certificate_to_json(const GeneratedGame& game);

/// Inspection dump of the superstate tables: per player and step, every
/// step-consistent window's belief, mass, reachability and kernel row.
nlohmann::json superstate_to_json(const SuperstateMdp& ss);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

void save_model(const PomgModel& model, const std::string& path);
PomgModel load_model(const std::string& path);
void save_profile(const PolicyProfile& profile, const std::string& path);
PolicyProfile load_profile(const std::string& path, int horizon);

}  // namespace pomg
