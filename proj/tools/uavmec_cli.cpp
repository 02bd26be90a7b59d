// Command-line front end: train a policy, evaluate a checkpoint, or run the
// scripted baselines, all against the same simulated world.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "uavmec/config.hpp"
#include "uavmec/harness.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  int uavs = 0;
  int ues = 0;
  int episodes = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, const char* default_out) {
  cmd->add_option("--config", opts.config_path, "Config file (key = value lines)");
  cmd->add_option("--out", opts.out_dir, "Output directory")->default_val(default_out);
  cmd->add_option("--seed", opts.seed, "Run seed (overrides config)");
  cmd->add_option("--uavs", opts.uavs, "Number of UAVs (overrides config)");
  cmd->add_option("--ues", opts.ues, "Number of UEs (overrides config)");
  cmd->add_option("--episodes", opts.episodes, "Episode count (overrides config)");
}

uavmec::SimConfig build_config(const CommonOpts& opts) {
  uavmec::SimConfig cfg;
  if (!opts.config_path.empty()) cfg = uavmec::load_config(opts.config_path);
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  if (opts.uavs > 0) cfg.n_uavs = opts.uavs;
  if (opts.ues > 0) cfg.n_ues = opts.ues;
  if (opts.episodes > 0) cfg.episodes = opts.episodes;
  cfg.validate();
  return cfg;
}

void print_summary(const uavmec::EvalSummary& s) {
  std::cout << "episodes:        " << s.episodes << '\n'
            << "mean reward:     " << s.mean_total_reward << '\n'
            << "mean final f_e:  " << s.mean_final_f_e << '\n'
            << "mean final f_u:  " << s.mean_final_f_u << '\n'
            << "mean energy [J]: " << s.mean_total_energy << '\n'
            << "mean objective:  " << s.mean_objective << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-UAV edge offloading simulator and trainer"};
  app.require_subcommand(1);

  CommonOpts train_opts, eval_opts, base_opts;
  std::string checkpoint_dir;
  std::string baseline_kind;
  std::string dump_path;

  CLI::App* train_cmd = app.add_subcommand("train", "Train agents and save checkpoints");
  add_common(train_cmd, train_opts, "train_out");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a saved checkpoint greedily");
  add_common(eval_cmd, eval_opts, "eval_out");
  eval_cmd->add_option("--checkpoint", checkpoint_dir, "Checkpoint directory")->required();

  CLI::App* base_cmd = app.add_subcommand("baseline", "Run a scripted trajectory policy");
  base_cmd->add_option("kind", baseline_kind, "random or circle")->required();
  add_common(base_cmd, base_opts, "baseline_out");

  CLI::App* cfg_cmd = app.add_subcommand("print-config", "Write the default config");
  cfg_cmd->add_option("--out", dump_path, "Target file (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      const auto cfg = build_config(train_opts);
      const auto result = uavmec::train(cfg, train_opts.out_dir, &std::cout);
      std::cout << "checkpoint: " << result.checkpoint_dir << '\n'
                << "log:        " << train_opts.out_dir << "/training_log.csv\n";
    } else if (eval_cmd->parsed()) {
      const auto cfg = build_config(eval_opts);
      const int eps = eval_opts.episodes > 0 ? eval_opts.episodes : 1;
      const auto summary = uavmec::evaluate(checkpoint_dir, cfg, eps, eval_opts.out_dir);
      print_summary(summary);
    } else if (base_cmd->parsed()) {
      const auto cfg = build_config(base_opts);
      const int eps = base_opts.episodes > 0 ? base_opts.episodes : 1;
      const auto kind = uavmec::baseline_kind_from_string(baseline_kind);
      const auto summary = uavmec::run_baseline(kind, cfg, eps, base_opts.out_dir);
      print_summary(summary);
    } else if (cfg_cmd->parsed()) {
      uavmec::SimConfig cfg;
      if (dump_path.empty())
        std::cout << uavmec::serialize_config(cfg);
      else
        uavmec::save_config(cfg, dump_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
