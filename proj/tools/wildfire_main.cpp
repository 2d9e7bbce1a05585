#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wildfire/config.hpp"
#include "wildfire/harness.hpp"
#include "wildfire/kernels.hpp"

namespace {

using namespace wildfire;

ScenarioConfig load_or_default(const std::string& path) {
  return path.empty() ? default_config() : load_config(path);
}

void apply_overrides(ScenarioConfig& cfg, const std::string& filter, const std::string& policy,
                     double error_rate, int fire_steps, const std::string& weights,
                     const std::string& out_dir, int64_t seed) {
  if (!filter.empty()) {
    if (filter == "ekf") cfg.filter = FilterKind::Ekf;
    else if (filter == "pf") cfg.filter = FilterKind::Pf;
    else if (filter == "ekf+pf-eval") cfg.filter = FilterKind::EkfPfEval;
    else throw ConfigError("unknown filter: " + filter);
  }
  if (!policy.empty()) {
    if (policy == "dqn") cfg.policy = PolicyKind::Dqn;
    else if (policy == "random") cfg.policy = PolicyKind::Random;
    else if (policy == "heuristic") cfg.policy = PolicyKind::Heuristic;
    else if (policy == "receding_horizon") cfg.policy = PolicyKind::RecedingHorizon;
    else throw ConfigError("unknown policy: " + policy);
  }
  if (error_rate >= 0.0) cfg.error_rate = error_rate;
  if (fire_steps > 0) cfg.fire_steps = fire_steps;
  if (!weights.empty()) cfg.dqn_weights_path = weights;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed >= 0) cfg.seed = uint64_t(seed);
  validate(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wildfire surveillance simulation and estimation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string filter_override, policy_override, weights_override, out_override;
  double error_rate_override = -1.0;
  int fire_steps_override = 0;
  int64_t seed_override = -1;
  std::string simd;

  app.add_option("--simd", simd, "force a kernel backend: scalar or avx2");

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "JSON config file");
    cmd->add_option("--filter", filter_override, "ekf | pf | ekf+pf-eval");
    cmd->add_option("--policy", policy_override, "dqn | random | heuristic | receding_horizon");
    cmd->add_option("--error-rate", error_rate_override, "observation flip probability");
    cmd->add_option("--fire-steps", fire_steps_override, "episode length in fire steps");
    cmd->add_option("--weights", weights_override, "Q-network weight file");
    cmd->add_option("-o,--out", out_override, "output directory");
    cmd->add_option("--seed", seed_override, "master seed");
  };

  auto* simulate = app.add_subcommand("simulate", "run one episode and write its artifacts");
  add_common(simulate);

  auto* train_cmd = app.add_subcommand("train", "train the Q-network on the configured scenario");
  add_common(train_cmd);

  auto* evaluate = app.add_subcommand("evaluate", "run a seeded sweep from a sweep config");
  std::string sweep_path;
  evaluate->add_option("-c,--config", sweep_path, "sweep JSON config")->required();
  std::string sweep_out;
  evaluate->add_option("-o,--out", sweep_out, "sweep output directory");

  auto* render = app.add_subcommand("render", "compose overlay images from a run directory");
  std::string run_dir, render_out;
  render->add_option("--run", run_dir, "run directory with rasters and trajectory.csv")->required();
  render->add_option("-o,--out", render_out, "output directory for overlays");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!simd.empty()) {
      if (simd == "scalar") kernels::set_backend(kernels::Backend::Scalar);
      else if (simd == "avx2") kernels::set_backend(kernels::Backend::Avx2);
      else throw ConfigError("unknown --simd backend: " + simd);
    }

    if (simulate->parsed()) {
      ScenarioConfig cfg = load_or_default(config_path);
      apply_overrides(cfg, filter_override, policy_override, error_rate_override,
                      fire_steps_override, weights_override, out_override, seed_override);
      const std::string dir = cfg.out_dir.empty() ? "run_out" : cfg.out_dir;
      const auto result = run_episode(cfg, cfg.seed, dir);
      std::cout << "episode complete: cells_flown_over=" << result.metrics.cells_flown_over
                << " cells_observed=" << result.metrics.cells_observed
                << " belief_hamming=" << result.metrics.belief_hamming
                << " wind_error=" << result.metrics.wind_error << '\n'
                << "artifacts: " << result.out_dir << '\n';
    } else if (train_cmd->parsed()) {
      ScenarioConfig cfg = load_or_default(config_path);
      apply_overrides(cfg, filter_override, policy_override, error_rate_override,
                      fire_steps_override, weights_override, out_override, seed_override);
      const std::string dir = cfg.out_dir.empty() ? "train_out" : cfg.out_dir;
      train_dqn(cfg, dir);
      std::cout << "training complete: " << dir << "/weights.wfqn\n";
    } else if (evaluate->parsed()) {
      SweepConfig sweep = load_sweep_config(sweep_path);
      if (!sweep_out.empty()) sweep.out_dir = sweep_out;
      const auto result = run_sweep(sweep);
      for (const auto& s : result.summaries) {
        std::cout << s.label << ": episodes_ok=" << s.episodes_ok
                  << " flown_over=" << s.mean.cells_flown_over
                  << " observed=" << s.mean.cells_observed
                  << " belief_hamming=" << s.mean.belief_hamming
                  << " wind_error=" << s.mean.wind_error << '\n';
      }
      std::cout << "sweep artifacts: " << sweep.out_dir << '\n';
    } else if (render->parsed()) {
      const std::string out = render_out.empty() ? run_dir + "/render" : render_out;
      render_run(run_dir, out);
      std::cout << "overlays written to " << out << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
