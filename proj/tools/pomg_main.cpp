#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pomg/experiment.hpp"
#include "pomg/sampler.hpp"
#include "pomg/serialize.hpp"

namespace {

using nlohmann::json;

int cmd_generate(const std::string& spec_path, const std::string& out_dir) {
  const pomg::GameSpec spec = pomg::game_spec_from_json(json::parse(pomg::read_text_file(spec_path)));
  const pomg::GeneratedGame game = pomg::generate_game(spec);
  std::filesystem::create_directories(out_dir);
  pomg::save_model(game.model, out_dir + "/model.json");
  pomg::write_text_file(out_dir + "/certificate.json",
                        pomg::certificate_to_json(game).dump(1) + "\n");
  std::cout << "wrote " << out_dir << "/model.json and certificate.json (kind="
            << pomg::to_string(game.kind) << ", floors: lambda=" << game.floor_lambda
            << " beta=" << game.floor_beta << " alpha=" << game.floor_alpha << ")\n";
  return 0;
}

int cmd_run(const std::string& config_path, pomg::ExperimentConfig flags) {
  pomg::ExperimentConfig config = flags;
  if (!config_path.empty()) {
    // Config file wins over flags: flag values fill fields the file omits.
    const json file = json::parse(pomg::read_text_file(config_path));
    json merged = pomg::experiment_config_to_json(flags);
    merged.merge_patch(file);
    config = pomg::experiment_config_from_json(merged);
  }
  const int status = pomg::run_experiment(config);
  std::cout << "run complete; artifacts in " << config.out_dir << "\n";
  return status;
}

int cmd_gap(const std::string& model_path, const std::string& policy_path, int m,
            const std::string& cls, const std::string& dump_path) {
  const pomg::PomgModel model = pomg::load_model(model_path);
  pomg::PolicyProfile profile = pomg::load_profile(policy_path, model.horizon);
  if (m > 0 && m != profile.window_len)
    throw std::invalid_argument("--m disagrees with the policy file's window length");
  const pomg::SuperstateMdp ss(model, profile.window_len);
  if (!dump_path.empty())
    pomg::write_text_file(dump_path, pomg::superstate_to_json(ss).dump(1) + "\n");
  const pomg::NashGapReport report = pomg::nash_gap(ss, profile);
  for (std::size_t i = 0; i < report.players.size(); ++i) {
    const auto& g = report.players[i];
    std::printf("player %zu: V=%.6f V^m=%.6f", i, g.value_pomg, g.value_superstate);
    if (cls != "history") std::printf("  window: br=%.6f gap=%.6f", g.br_window, g.gap_window);
    if (cls != "window") std::printf("  history: br=%.6f gap=%.6f", g.br_history, g.gap_history);
    std::printf("\n");
  }
  if (cls != "history") std::printf("max window gap: %.6f\n", report.max_gap_window);
  if (cls != "window") std::printf("max history gap: %.6f\n", report.max_gap_history);
  return 0;
}

int cmd_verify(const std::string& seeds, pomg::VerifyOptions opts) {
  const auto sep = seeds.find("..");
  if (sep == std::string::npos) {
    opts.seed_begin = opts.seed_end = std::stoull(seeds);
  } else {
    opts.seed_begin = std::stoull(seeds.substr(0, sep));
    opts.seed_end = std::stoull(seeds.substr(sep + 2));
  }
  const auto checks = pomg::verify_suite(opts);
  std::cout << pomg::format_checks(checks);
  int failed = 0;
  for (const auto& c : checks) failed += c.pass ? 0 : 1;
  std::cout << checks.size() - static_cast<std::size_t>(failed) << "/" << checks.size()
            << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-window Nash learning laboratory for decoupled POMGs"};
  app.require_subcommand(1);

  // generate
  std::string spec_path, gen_out = "out";
  auto* generate = app.add_subcommand("generate", "Generate a game from a spec file");
  generate->add_option("--spec", spec_path, "GameSpec JSON file")->required();
  generate->add_option("--out", gen_out, "Output directory");

  // run
  std::string config_path;
  pomg::ExperimentConfig flags;
  auto* run = app.add_subcommand("run", "Run a learning experiment");
  run->add_option("--config", config_path, "ExperimentConfig JSON (overrides flags)");
  run->add_option("--model", flags.model_path, "Model file");
  run->add_option("--out", flags.out_dir, "Output directory");
  run->add_option("--iterations", flags.learner.iterations, "Iterations K");
  run->add_option("--episodes", flags.learner.episodes_per_iter, "Episodes per iteration T");
  run->add_option("--window", flags.learner.window_len, "Window length m");
  run->add_option("--eps", flags.learner.exploration_eps, "Exploration epsilon");
  run->add_option("--stepsize-scale", flags.learner.stepsize_scale, "Stepsize scale c");
  run->add_option("--seed", flags.learner.seed, "Master seed");
  run->add_option("--gap-cadence", flags.evaluation.gap_cadence, "Evaluate Nash gap every k iterations");

  // gap
  std::string model_path, policy_path, cls = "history", dump_path;
  int m = 0;
  auto* gap = app.add_subcommand("gap", "Evaluate the Nash gap of a policy file");
  gap->add_option("--model", model_path, "Model file")->required();
  gap->add_option("--policy", policy_path, "Policy file")->required();
  gap->add_option("--m", m, "Window length (must match the policy file)");
  gap->add_option("--class", cls, "Deviation class: window|history|both")
      ->check(CLI::IsMember({"window", "history", "both"}));
  gap->add_option("--dump-superstate", dump_path, "Write belief and kernel tables to this file");

  // verify
  std::string seeds = "0..9";
  pomg::VerifyOptions vopts;
  vopts.base.obs_noise_beta = 0.2;
  auto* verify = app.add_subcommand("verify", "Run the bound verification suite");
  verify->add_option("--seeds", seeds, "Seed range a..b");
  verify->add_option("--players", vopts.base.num_players, "Players");
  verify->add_option("--horizon", vopts.base.horizon, "Horizon");
  verify->add_option("--lambda", vopts.base.mixing_lambda, "Transition mixing weight");
  verify->add_option("--beta", vopts.base.obs_noise_beta, "Observation floor");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(spec_path, gen_out);
    if (run->parsed()) return cmd_run(config_path, flags);
    if (gap->parsed()) return cmd_gap(model_path, policy_path, m, cls, dump_path);
    if (verify->parsed()) return cmd_verify(seeds, vopts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
