#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavmec/baselines.hpp"
#include "uavmec/config.hpp"
#include "uavmec/env.hpp"
#include "uavmec/io.hpp"
#include "uavmec/maddpg.hpp"
#include "uavmec/rng.hpp"

namespace uavmec {

// Reserved sub-stream ids of the run seed. Each consumer owns one stream so
// adding draws in one place never shifts another.
namespace seed_stream {
inline constexpr std::uint64_t kUeLayout = 0;
inline constexpr std::uint64_t kTrainTasks = 1;
inline constexpr std::uint64_t kEvalTasks = 2;
inline constexpr std::uint64_t kBaselinePolicy = 3;
inline constexpr std::uint64_t kAgentInit = 100;   // consumed inside make_agents
inline constexpr std::uint64_t kAgentNoise = 200;  // + agent index
inline constexpr std::uint64_t kAgentReplay = 300; // + agent index
}  // namespace seed_stream

// Action source for rollouts. act receives only the agent's own observation;
// anything else a policy needs lives in its own closure state, reset at
// episode starts.
struct Policy {
  std::function<UavAction(int agent, std::span<const double> obs)> act;
  std::function<void()> on_episode_start = [] {};
};

struct EpisodeStats {
  std::vector<double> agent_rewards;  // summed over the episode
  double final_f_e = 0.0;
  double final_f_u = 0.0;
  double total_energy = 0.0;
  double objective = 0.0;  // sum_t f_u * f_e / (total energy of the TS)
};

using StepSink = std::function<void(const StepRecord&)>;

// Runs one full episode under the given policy. All stochastic input comes
// from task_rng, so a fixed (layout, rng state, policy) triple replays
// identically.
inline EpisodeStats rollout_episode(const SimConfig& cfg, std::span<const Vec2> ues,
                                    Policy& policy, Rng& task_rng,
                                    const StepSink& sink = {}) {
  policy.on_episode_start();
  WorldState world = reset_world(cfg, task_rng);
  EpisodeStats stats;
  stats.agent_rewards.assign(cfg.n_uavs, 0.0);
  std::vector<UavAction> actions(cfg.n_uavs);
  for (int t = 0; t < cfg.horizon; ++t) {
    for (int m = 0; m < cfg.n_uavs; ++m)
      actions[m] = policy.act(m, observe(world, m, cfg));
    StepResult res = env_step(world, actions, ues, cfg, task_rng);
    for (int m = 0; m < cfg.n_uavs; ++m) stats.agent_rewards[m] += res.rewards[m];
    double ts_energy = 0.0;
    for (double e : res.record.energies) ts_energy += e;
    stats.total_energy += ts_energy;
    stats.objective += res.record.f_u * res.record.f_e / ts_energy;
    stats.final_f_e = res.record.f_e;
    stats.final_f_u = res.record.f_u;
    if (sink) sink(res.record);
    world = std::move(res.next);
  }
  return stats;
}

// --- checkpointing ---

inline constexpr int kManifestVersion = 1;

inline void save_checkpoint(const std::vector<Agent>& agents, const SimConfig& cfg,
                            const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["version"] = kManifestVersion;
  manifest["n_agents"] = static_cast<int>(agents.size());
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  manifest["config_hash"] = hash;
  auto files = nlohmann::json::array();
  for (const Agent& a : agents) {
    const std::string suffix = std::to_string(a.index) + ".bin";
    save_net(a.actor, dir + "/actor_" + suffix);
    save_net(a.critic, dir + "/critic_" + suffix);
    save_net(a.target_actor, dir + "/target_actor_" + suffix);
    save_net(a.target_critic, dir + "/target_critic_" + suffix);
    files.push_back({{"agent", a.index},
                     {"actor", "actor_" + suffix},
                     {"critic", "critic_" + suffix},
                     {"target_actor", "target_actor_" + suffix},
                     {"target_critic", "target_critic_" + suffix}});
  }
  manifest["nets"] = std::move(files);
  std::ofstream os(dir + "/manifest.json");
  if (!os) throw std::runtime_error("save_checkpoint: cannot write manifest in " + dir);
  os << manifest.dump(2) << '\n';
}

// Actors only; that is all greedy execution needs.
inline std::vector<DenseNet> load_checkpoint_actors(const std::string& dir,
                                                    const SimConfig& cfg) {
  std::ifstream is(dir + "/manifest.json");
  if (!is) throw std::runtime_error("load_checkpoint: no manifest in " + dir);
  nlohmann::json manifest = nlohmann::json::parse(is);
  if (manifest.at("version").get<int>() != kManifestVersion)
    throw std::runtime_error("load_checkpoint: unsupported manifest version");
  char expect[32];
  std::snprintf(expect, sizeof(expect), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  if (manifest.at("config_hash").get<std::string>() != expect)
    throw std::runtime_error(
        "load_checkpoint: config hash mismatch; checkpoint was trained under a "
        "different world/network configuration");
  if (manifest.at("n_agents").get<int>() != cfg.n_uavs)
    throw std::runtime_error("load_checkpoint: agent count mismatch");
  std::vector<DenseNet> actors;
  for (const auto& entry : manifest.at("nets")) {
    DenseNet actor = load_net(dir + "/" + entry.at("actor").get<std::string>());
    if (actor.input_size() != obs_len(cfg) || actor.output_size() != kActionDim)
      throw std::runtime_error("load_checkpoint: actor shape mismatch");
    actors.push_back(std::move(actor));
  }
  return actors;
}

// --- policies ---

inline Policy greedy_policy(std::vector<DenseNet> actors, const SimConfig& cfg) {
  auto nets = std::make_shared<std::vector<DenseNet>>(std::move(actors));
  Policy p;
  p.act = [nets, cfg](int agent, std::span<const double> obs) {
    const std::vector<double> u = forward((*nets)[agent], obs);
    return to_env_action(u, cfg);
  };
  return p;
}

inline Policy random_walk_policy(const SimConfig& cfg) {
  auto rng = std::make_shared<Rng>(sub_rng(cfg.seed, seed_stream::kBaselinePolicy));
  Policy p;
  p.act = [rng, cfg](int, std::span<const double>) { return random_policy(*rng, cfg); };
  return p;
}

inline Policy circle_track_policy(const CirclePlan& plan, const SimConfig& cfg) {
  auto ts = std::make_shared<std::vector<int>>(cfg.n_uavs, 0);
  Policy p;
  p.act = [plan, ts, cfg](int agent, std::span<const double> obs) {
    const UavPose pose{obs[0] * cfg.side_len, obs[1] * cfg.side_len};
    return circle_policy(plan, agent, pose, (*ts)[agent]++);
  };
  p.on_episode_start = [ts] { std::fill(ts->begin(), ts->end(), 0); };
  return p;
}

// --- training ---

struct TrainResult {
  std::vector<RunRecord> records;
  std::string checkpoint_dir;
  std::vector<Vec2> ues;
};

// The full training loop: per TS select noisy actions, step the world, store
// one transition per agent, then run one learning step once every buffer
// holds a batch. The UE layout is drawn once per seed and reused across
// episodes; episode logs and periodic checkpoints land in out_dir.
inline TrainResult train(const SimConfig& cfg, const std::string& out_dir,
                         std::ostream* progress = nullptr) {
  namespace fs = std::filesystem;
  cfg.validate();
  fs::create_directories(out_dir);
  save_config(cfg, out_dir + "/config.cfg");

  Rng layout_rng = sub_rng(cfg.seed, seed_stream::kUeLayout);
  Rng task_rng = sub_rng(cfg.seed, seed_stream::kTrainTasks);
  TrainResult result;
  result.ues = spawn_ues(cfg, layout_rng);
  result.checkpoint_dir = out_dir + "/checkpoint";
  std::vector<Agent> agents = make_agents(cfg);

  std::vector<UavAction> actions(cfg.n_uavs);
  std::vector<std::array<double, kActionDim>> raws(cfg.n_uavs);

  auto flush_log = [&]() {
    write_metrics_csv(result.records, cfg.n_uavs, out_dir + "/training_log.csv");
  };

  try {
    for (int ep = 0; ep < cfg.episodes; ++ep) {
      const auto ep_start = std::chrono::steady_clock::now();
      WorldState world = reset_world(cfg, task_rng);
      RunRecord rec;
      rec.episode = ep;
      rec.seed = cfg.seed;
      rec.agent_rewards.assign(cfg.n_uavs, 0.0);

      for (int t = 0; t < cfg.horizon; ++t) {
        std::vector<double> state = joint_state(world, cfg);
        for (int m = 0; m < cfg.n_uavs; ++m) {
          const ActionSample s = select_action(agents[m], observe(world, m, cfg), true, cfg);
          actions[m] = s.env_action;
          raws[m] = s.raw;
        }
        StepResult res = env_step(world, actions, result.ues, cfg, task_rng);
        std::vector<double> next_state = joint_state(res.next, cfg);
        std::vector<double> joint_u;
        joint_u.reserve(static_cast<std::size_t>(cfg.n_uavs) * kActionDim);
        for (const auto& r : raws) joint_u.insert(joint_u.end(), r.begin(), r.end());

        for (int m = 0; m < cfg.n_uavs; ++m) {
          Transition tr{state, joint_u, res.rewards[m] / cfg.reward_scale, next_state};
          if (cfg.new_priority == NewPriorityMode::TdError) {
            const double delta = td_error(agents[m], tr, agents, cfg);
            agents[m].buffer.push(std::move(tr), std::abs(delta));
          } else {
            agents[m].buffer.push(std::move(tr));
          }
          rec.agent_rewards[m] += res.rewards[m];
        }
        for (double e : res.record.energies) rec.energy_j += e;
        rec.f_e = res.record.f_e;
        rec.f_u = res.record.f_u;
        train_step(agents, cfg);
        world = std::move(res.next);
      }

      rec.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - ep_start).count();
      result.records.push_back(std::move(rec));
      if (cfg.checkpoint_every > 0 && (ep + 1) % cfg.checkpoint_every == 0)
        save_checkpoint(agents, cfg, result.checkpoint_dir);
      if (progress && ((ep + 1) % 100 == 0 || ep + 1 == cfg.episodes)) {
        const auto& rr = result.records.back();
        double total = 0.0;
        for (double v : rr.agent_rewards) total += v;
        *progress << "episode " << (ep + 1) << "/" << cfg.episodes
                  << " reward " << total << " f_e " << rr.f_e << " f_u " << rr.f_u
                  << " sigma " << agents[0].noise_sigma << '\n';
      }
    }
  } catch (...) {
    // Keep the partial log and the last periodic checkpoint on abort.
    flush_log();
    throw;
  }

  save_checkpoint(agents, cfg, result.checkpoint_dir);
  flush_log();
  return result;
}

// --- evaluation and baselines ---

struct EvalSummary {
  int episodes = 0;
  std::vector<double> mean_agent_rewards;
  double mean_total_reward = 0.0;
  double mean_final_f_e = 0.0;
  double mean_final_f_u = 0.0;
  double mean_total_energy = 0.0;
  double mean_objective = 0.0;
  std::vector<double> served_counts;  // per UE, summed over all episodes
  std::vector<RunRecord> records;
};

inline nlohmann::json summary_json(const EvalSummary& s) {
  nlohmann::json j;
  j["episodes"] = s.episodes;
  j["mean_agent_rewards"] = s.mean_agent_rewards;
  j["mean_total_reward"] = s.mean_total_reward;
  j["mean_final_f_e"] = s.mean_final_f_e;
  j["mean_final_f_u"] = s.mean_final_f_u;
  j["mean_total_energy_j"] = s.mean_total_energy;
  j["mean_objective"] = s.mean_objective;
  j["served_counts"] = s.served_counts;
  return j;
}

// Shared by evaluate() and run_baseline(): greedy rollouts with trajectory
// streaming and per-episode records.
inline EvalSummary run_episodes(const SimConfig& cfg, std::span<const Vec2> ues,
                                Policy& policy, int episodes,
                                const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::ofstream traj(out_dir + "/trajectory.jsonl");
  if (!traj) throw std::runtime_error("run_episodes: cannot open trajectory.jsonl");

  Rng task_rng = sub_rng(cfg.seed, seed_stream::kEvalTasks);
  EvalSummary summary;
  summary.episodes = episodes;
  summary.mean_agent_rewards.assign(cfg.n_uavs, 0.0);
  summary.served_counts.assign(cfg.n_ues, 0.0);

  for (int ep = 0; ep < episodes; ++ep) {
    const auto ep_start = std::chrono::steady_clock::now();
    StepSink sink = [&](const StepRecord& rec) {
      traj << step_record_json(rec, ep).dump() << '\n';
      for (std::size_t n = 0; n < rec.decisions.size(); ++n)
        if (rec.decisions[n] > 0) summary.served_counts[n] += 1.0;
    };
    EpisodeStats stats = rollout_episode(cfg, ues, policy, task_rng, sink);

    RunRecord rec;
    rec.episode = ep;
    rec.seed = cfg.seed;
    rec.agent_rewards = stats.agent_rewards;
    rec.f_e = stats.final_f_e;
    rec.f_u = stats.final_f_u;
    rec.energy_j = stats.total_energy;
    rec.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - ep_start).count();
    summary.records.push_back(std::move(rec));

    for (int m = 0; m < cfg.n_uavs; ++m)
      summary.mean_agent_rewards[m] += stats.agent_rewards[m] / episodes;
    summary.mean_final_f_e += stats.final_f_e / episodes;
    summary.mean_final_f_u += stats.final_f_u / episodes;
    summary.mean_total_energy += stats.total_energy / episodes;
    summary.mean_objective += stats.objective / episodes;
  }
  for (double v : summary.mean_agent_rewards) summary.mean_total_reward += v;

  write_metrics_csv(summary.records, cfg.n_uavs, out_dir + "/metrics.csv");
  std::ofstream os(out_dir + "/summary.json");
  os << summary_json(summary).dump(2) << '\n';
  return summary;
}

// Greedy evaluation of a saved checkpoint. Refuses checkpoints whose
// structural config hash differs from the given config.
inline EvalSummary evaluate(const std::string& checkpoint_dir, const SimConfig& cfg,
                            int episodes, const std::string& out_dir) {
  cfg.validate();
  std::vector<DenseNet> actors = load_checkpoint_actors(checkpoint_dir, cfg);
  Rng layout_rng = sub_rng(cfg.seed, seed_stream::kUeLayout);
  const std::vector<Vec2> ues = spawn_ues(cfg, layout_rng);
  Policy policy = greedy_policy(std::move(actors), cfg);
  return run_episodes(cfg, ues, policy, episodes, out_dir);
}

enum class BaselineKind { Random, Circle };

inline BaselineKind baseline_kind_from_string(const std::string& s) {
  if (s == "random") return BaselineKind::Random;
  if (s == "circle") return BaselineKind::Circle;
  throw std::invalid_argument("baseline kind must be 'random' or 'circle'");
}

// Scripted-trajectory runs through the identical pipeline and export schema.
inline EvalSummary run_baseline(BaselineKind kind, const SimConfig& cfg, int episodes,
                                const std::string& out_dir) {
  cfg.validate();
  Rng layout_rng = sub_rng(cfg.seed, seed_stream::kUeLayout);
  const std::vector<Vec2> ues = spawn_ues(cfg, layout_rng);
  Policy policy;
  if (kind == BaselineKind::Random) {
    policy = random_walk_policy(cfg);
  } else {
    const auto starts = initial_poses(cfg);
    policy = circle_track_policy(make_circle_plan(ues, starts, cfg), cfg);
  }
  return run_episodes(cfg, ues, policy, episodes, out_dir);
}

}  // namespace uavmec
