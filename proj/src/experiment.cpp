#include "pomg/experiment.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "pomg/sampler.hpp"
#include "pomg/serialize.hpp"

namespace pomg {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

PolicyProfile random_profile(const PomgModel& model, int m, SeededRng& rng) {
  PolicyProfile profile{m, {}};
  for (int i = 0; i < model.num_players; ++i)
    profile.players.push_back(random_policy(model.horizon,
                                            model.action_sizes[static_cast<std::size_t>(i)],
                                            model.obs_sizes[static_cast<std::size_t>(i)], m, rng));
  return profile;
}

}  // namespace

json experiment_config_to_json(const ExperimentConfig& c) {
  json j;
  if (!c.model_path.empty()) j["model"] = c.model_path;
  if (c.game) j["game"] = game_spec_to_json(*c.game);
  j["out_dir"] = c.out_dir;
  j["learner"] = {{"iterations", c.learner.iterations},
                  {"episodes_per_iter", c.learner.episodes_per_iter},
                  {"window", c.learner.window_len},
                  {"exploration_eps", c.learner.exploration_eps},
                  {"stepsize_scale", c.learner.stepsize_scale},
                  {"seed", c.learner.seed},
                  {"eval_cadence", c.learner.eval_cadence}};
  json classes = json::array();
  if (c.evaluation.class_window) classes.push_back("window");
  if (c.evaluation.class_history) classes.push_back("history");
  j["evaluation"] = {{"gap_cadence", c.evaluation.gap_cadence}, {"deviation_classes", classes}};
  j["verify"] = {{"enabled", c.verify_after_run},
                 {"seed_begin", c.verify_seed_begin},
                 {"seed_end", c.verify_seed_end}};
  return j;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("model")) c.model_path = j.at("model").get<std::string>();
  if (j.contains("game")) c.game = game_spec_from_json(j.at("game"));
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("learner")) {
    const auto& l = j.at("learner");
    if (l.contains("iterations")) c.learner.iterations = l.at("iterations").get<int>();
    if (l.contains("episodes_per_iter")) c.learner.episodes_per_iter = l.at("episodes_per_iter").get<int>();
    if (l.contains("window")) c.learner.window_len = l.at("window").get<int>();
    if (l.contains("exploration_eps")) c.learner.exploration_eps = l.at("exploration_eps").get<double>();
    if (l.contains("stepsize_scale")) c.learner.stepsize_scale = l.at("stepsize_scale").get<double>();
    if (l.contains("seed")) c.learner.seed = l.at("seed").get<std::uint64_t>();
    if (l.contains("eval_cadence")) c.learner.eval_cadence = l.at("eval_cadence").get<int>();
  }
  if (j.contains("evaluation")) {
    const auto& e = j.at("evaluation");
    if (e.contains("gap_cadence")) c.evaluation.gap_cadence = e.at("gap_cadence").get<int>();
    if (e.contains("deviation_classes")) {
      c.evaluation.class_window = false;
      c.evaluation.class_history = false;
      for (const auto& cls : e.at("deviation_classes")) {
        if (cls.get<std::string>() == "window") c.evaluation.class_window = true;
        if (cls.get<std::string>() == "history") c.evaluation.class_history = true;
      }
    }
  }
  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    if (v.contains("enabled")) c.verify_after_run = v.at("enabled").get<bool>();
    if (v.contains("seed_begin")) c.verify_seed_begin = v.at("seed_begin").get<std::uint64_t>();
    if (v.contains("seed_end")) c.verify_seed_end = v.at("seed_end").get<std::uint64_t>();
  }
  return c;
}

int run_experiment(const ExperimentConfig& config_in) {
  ExperimentConfig config = config_in;
  config.learner.num_threads = default_thread_count();
  config.learner.eval_cadence = config.evaluation.gap_cadence;
  config.learner.validate();

  std::filesystem::create_directories(config.out_dir);

  PomgModel model;
  if (config.game) {
    GeneratedGame game = generate_game(*config.game);
    model = game.model;
    save_model(model, config.out_dir + "/model.json");
    write_text_file(config.out_dir + "/certificate.json", certificate_to_json(game).dump(1) + "\n");
  } else if (!config.model_path.empty()) {
    model = load_model(config.model_path);
  } else {
    throw std::invalid_argument("experiment config needs either a model path or an inline game");
  }
  require_valid(model);

  // Gap diagnostics share one superstate build across evaluations.
  std::map<int, std::pair<double, double>> gap_rows;  // k -> (window, history)
  GapEvaluator evaluator;
  std::optional<SuperstateMdp> ss;
  if (config.evaluation.gap_cadence > 0 &&
      (config.evaluation.class_window || config.evaluation.class_history)) {
    ss.emplace(model, config.learner.window_len);
    evaluator = [&](const PolicyProfile& profile, int k) {
      double gw = std::nan(""), gh = std::nan("");
      if (config.evaluation.class_window) {
        gw = 0.0;
        for (int i = 0; i < model.num_players; ++i) {
          const double v = marginal_policy_value(*ss, profile, i);
          gw = std::max(gw, best_response_superstate(*ss, profile, i).value - v);
        }
      }
      if (config.evaluation.class_history) {
        gh = 0.0;
        const auto v = exact_window_policy_value(model, profile);
        for (int i = 0; i < model.num_players; ++i)
          gh = std::max(gh, best_response_full_history(model, profile, i) -
                                v[static_cast<std::size_t>(i)]);
      }
      gap_rows[k] = {gw, gh};
      if (!std::isnan(gh)) return gh;
      return gw;
    };
  }

  const auto records = run_learning(model, config.learner, evaluator);

  // metrics.csv
  std::ostringstream csv;
  csv << "k,eta";
  for (int i = 0; i < model.num_players; ++i) csv << ",value_est_" << i;
  csv << ",min_visit,gap_window,gap_history\n";
  for (const auto& rec : records) {
    csv << rec.k << "," << fmt_double(rec.eta);
    for (double v : rec.value_estimates) csv << "," << fmt_double(v);
    csv << "," << rec.min_visit;
    const auto it = gap_rows.find(rec.k);
    if (it != gap_rows.end() && !std::isnan(it->second.first))
      csv << "," << fmt_double(it->second.first);
    else
      csv << ",";
    if (it != gap_rows.end() && !std::isnan(it->second.second))
      csv << "," << fmt_double(it->second.second);
    else
      csv << ",";
    csv << "\n";
  }
  write_text_file(config.out_dir + "/metrics.csv", csv.str());

  save_profile(records.back().policies, config.out_dir + "/policy.json");

  json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = config.learner.seed;
  manifest["threads"] = config.learner.num_threads;
  manifest["config"] = experiment_config_to_json(config);
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016" PRIx64, fnv1a(manifest["config"].dump()));
  manifest["config_hash"] = hash;
  write_text_file(config.out_dir + "/manifest.json", manifest.dump(1) + "\n");

  if (config.verify_after_run) {
    VerifyOptions vopts;
    vopts.seed_begin = config.verify_seed_begin;
    vopts.seed_end = config.verify_seed_end;
    if (config.game) {
      vopts.base = *config.game;
      vopts.base.obs_noise_beta = std::max(config.game->obs_noise_beta, 0.05);
    }
    const auto checks = verify_suite(vopts);
    write_text_file(config.out_dir + "/verification.txt", format_checks(checks));
    for (const auto& c : checks)
      if (!c.pass) return 1;
  }
  return 0;
}

std::vector<CheckResult> verify_suite(const VerifyOptions& opts) {
  std::vector<CheckResult> checks;
  auto add = [&](std::uint64_t seed, const std::string& name, double bound, double measured,
                 double tol = 1e-12) {
    checks.push_back({"seed=" + std::to_string(seed) + " " + name, bound, measured,
                      measured <= bound + tol});
  };

  for (std::uint64_t seed = opts.seed_begin; seed <= opts.seed_end; ++seed) {
    GameSpec spec = opts.base;
    spec.seed = seed;
    spec.kind = GameKind::kStatewisePotential;
    const GeneratedGame pot_game = generate_game(spec);
    spec.kind = GameKind::kIdenticalInterest;
    const GeneratedGame ii_game = generate_game(spec);

    SeededRng rng(seed, 1000);
    const int H = pot_game.model.horizon;

    add(seed, "model-valid", 0.0, static_cast<double>(validate_model(pot_game.model).size()));
    add(seed, "statewise-potential", 1e-10,
        verify_statewise_potential(pot_game.model, pot_game.potential.phi).max_violation, 0.0);

    const StabilityEstimate stab = measure_filter_stability(pot_game.model);

    // pairwise difference identity on random triples
    {
      double worst = 0.0;
      for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 7);
        std::vector<double> p(static_cast<std::size_t>(n)), q(static_cast<std::size_t>(n)),
            x(static_cast<std::size_t>(n));
        double sp = 0.0, sq = 0.0;
        for (auto& v : p) sp += (v = rng.next_double() + 1e-9);
        for (auto& v : q) sq += (v = rng.next_double() + 1e-9);
        for (auto& v : p) v /= sp;
        for (auto& v : q) v /= sq;
        for (auto& v : x) v = 10.0 * (rng.next_double() - 0.5);
        const auto [lhs, rhs] = pairwise_identity(p, q, x);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
      add(seed, "pairwise-identity", 1e-12, worst, 0.0);
    }

    for (int m : opts.window_lens) {
      const SuperstateMdp ss(pot_game.model, m);
      const double eps = stab.eps_budget(m);

      double worst_value = 0.0, worst_br = 0.0, worst_transfer = 0.0;
      for (int rep = 0; rep < opts.profiles_per_check; ++rep) {
        const PolicyProfile profile = random_profile(pot_game.model, m, rng);
        const NashGapReport gap = nash_gap(ss, profile, opts.budget);
        for (const auto& g : gap.players) {
          worst_value = std::max(worst_value, std::abs(g.value_superstate - g.value_pomg));
          worst_br = std::max(worst_br, std::abs(g.br_window - g.br_history));
        }
        worst_transfer = std::max(worst_transfer, gap.max_gap_history - gap.max_gap_window - 2.0 * eps);
      }
      add(seed, "value-approx m=" + std::to_string(m), eps, worst_value);
      add(seed, "best-response-approx m=" + std::to_string(m), eps, worst_br);
      add(seed, "gap-transfer-excess m=" + std::to_string(m), 0.0, worst_transfer, 1e-9);

      const auto contraction = belief_contraction_check(pot_game.model, m, stab.rho_joint);
      add(seed, contraction.name, contraction.bound, contraction.measured);

      {
        const PolicyProfile profile = random_profile(pot_game.model, m, rng);
        for (int i = 0; i < pot_game.model.num_players; ++i)
          for (const auto& check : kernel_reward_bias_check(ss, profile, i, stab.rho_joint))
            add(seed, check.name, check.bound, check.measured);
      }

      // near-potential audit on both certified kinds
      for (const GeneratedGame* game : {&pot_game, &ii_game}) {
        const SuperstateMdp gss(game->model, m);
        const StabilityEstimate gstab = measure_filter_stability(game->model);
        std::vector<DeviationTriple> devs;
        for (int rep = 0; rep < opts.deviations_per_check; ++rep) {
          DeviationTriple dev;
          dev.profile = random_profile(game->model, m, rng);
          dev.player = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(game->model.num_players));
          dev.alternative = random_policy(
              H, game->model.action_sizes[static_cast<std::size_t>(dev.player)],
              game->model.obs_sizes[static_cast<std::size_t>(dev.player)], m, rng);
          devs.push_back(std::move(dev));
        }
        const auto audit =
            near_potential_audit(game->model, gss, game->potential, devs, gstab.rho_joint, opts.budget);
        add(seed, "near-potential kind=" + to_string(game->kind) + " m=" + std::to_string(m),
            audit.bound, audit.max_mismatch);
      }
    }

    // m = H collapse: zero bias, exact value match.
    {
      const SuperstateMdp ss(pot_game.model, H);
      const PolicyProfile profile = random_profile(pot_game.model, H, rng);
      const auto v_true = exact_window_policy_value(pot_game.model, profile, opts.budget);
      double worst = 0.0;
      for (int i = 0; i < pot_game.model.num_players; ++i)
        worst = std::max(worst, std::abs(marginal_policy_value(ss, profile, i) -
                                         v_true[static_cast<std::size_t>(i)]));
      add(seed, "mH-value-collapse", 1e-10, worst, 0.0);

      double worst_kernel = 0.0;
      for (int i = 0; i < pot_game.model.num_players; ++i)
        for (const auto& check : kernel_reward_bias_check(ss, profile, i, 1.0))
          worst_kernel = std::max(worst_kernel, check.measured);
      add(seed, "mH-zero-bias", 1e-10, worst_kernel, 0.0);
    }
  }
  return checks;
}

std::string format_checks(const std::vector<CheckResult>& checks) {
  std::ostringstream oss;
  for (const auto& c : checks)
    oss << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  measured=" << fmt_double(c.measured)
        << " bound=" << fmt_double(c.bound) << "\n";
  return oss.str();
}

}  // namespace pomg
