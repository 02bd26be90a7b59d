#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavmec/config.hpp"
#include "uavmec/env.hpp"
#include "uavmec/neural.hpp"
#include "uavmec/replay.hpp"
#include "uavmec/rng.hpp"
#include "uavmec/types.hpp"

namespace uavmec {

inline constexpr int kActionDim = 2;  // (angle, distance), normalized

// Map a normalized policy output in [-1,1]^2 onto the action ranges:
// u0 -> angle over the full turn, u1 -> distance in [0, d_max]. Both
// endpoints of u0 mean "fly in the +x direction", so 2*pi wraps to 0.
inline UavAction to_env_action(std::span<const double> u, const SimConfig& cfg) {
  double angle = std::fmod((u[0] + 1.0) * std::numbers::pi, 2.0 * std::numbers::pi);
  double dist = (u[1] + 1.0) * 0.5 * cfg.d_max;
  dist = std::clamp(dist, 0.0, cfg.d_max);
  return UavAction{angle, dist};
}

inline double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

// One learner: online and target actor/critic, its own replay buffer and
// noise schedule. The critic sees the joint state and joint action; the
// actor sees only this agent's observation.
struct Agent {
  int index = 0;
  int n_agents = 0;
  int obs_dim = 0;
  DenseNet actor, critic, target_actor, target_critic;
  AdamState actor_opt, critic_opt;
  PriorityBuffer buffer;
  Rng noise_rng;
  Rng replay_rng;
  double noise_sigma = 1.0;
  long train_steps = 0;

  Agent(int idx, const SimConfig& cfg, Rng& init_rng)
      : index(idx),
        n_agents(cfg.n_uavs),
        obs_dim(obs_len(cfg)),
        buffer(cfg.buffer_cap, cfg.beta_priority, cfg.eps_priority),
        noise_rng(sub_rng(cfg.seed, 200 + static_cast<std::uint64_t>(idx))),
        replay_rng(sub_rng(cfg.seed, 300 + static_cast<std::uint64_t>(idx))),
        noise_sigma(cfg.noise_sigma0) {
    std::vector<int> actor_widths{obs_dim};
    actor_widths.insert(actor_widths.end(), cfg.hidden_widths.begin(), cfg.hidden_widths.end());
    actor_widths.push_back(kActionDim);
    std::vector<int> critic_widths{n_agents * (obs_dim + kActionDim)};
    critic_widths.insert(critic_widths.end(), cfg.hidden_widths.begin(), cfg.hidden_widths.end());
    critic_widths.push_back(1);
    actor = make_net(actor_widths, Act::Relu, Act::Tanh, init_rng, 1e-3);
    critic = make_net(critic_widths, Act::Relu, Act::Identity, init_rng);
    target_actor = actor;
    target_critic = critic;
    actor_opt = AdamState(actor, cfg.lr_actor);
    critic_opt = AdamState(critic, cfg.lr_critic);
  }

  int state_dim() const { return n_agents * obs_dim; }
  int joint_action_dim() const { return n_agents * kActionDim; }

  std::span<const double> obs_slice(std::span<const double> state, int agent) const {
    return state.subspan(static_cast<std::size_t>(agent) * obs_dim, obs_dim);
  }
};

inline std::vector<Agent> make_agents(const SimConfig& cfg) {
  Rng init_rng = sub_rng(cfg.seed, 100);
  std::vector<Agent> agents;
  agents.reserve(cfg.n_uavs);
  for (int m = 0; m < cfg.n_uavs; ++m) agents.emplace_back(m, cfg, init_rng);
  return agents;
}

struct ActionSample {
  UavAction env_action;
  std::array<double, kActionDim> raw;  // normalized, as stored in transitions
};

// Policy output plus optional exploration noise, clipped back to the
// normalized box before mapping to the environment ranges.
inline ActionSample select_action(Agent& agent, std::span<const double> observation,
                                  bool explore, const SimConfig& cfg) {
  const std::vector<double> out = forward(agent.actor, observation);
  ActionSample s;
  for (int i = 0; i < kActionDim; ++i) {
    double u = out[i];
    if (explore && agent.noise_sigma > 0.0)
      u = clamp_unit(u + agent.noise_rng.normal(0.0, agent.noise_sigma));
    s.raw[i] = u;
  }
  s.env_action = to_env_action(s.raw, cfg);
  return s;
}

// TD error of one transition under the current target networks. The next
// joint action comes from every agent's target actor applied to its own
// slice of the next state.
inline double td_error(const Agent& agent, const Transition& tr,
                       const std::vector<Agent>& all, const SimConfig& cfg) {
  std::vector<double> next_in(tr.next_state.begin(), tr.next_state.end());
  for (const Agent& other : all) {
    const auto obs = agent.obs_slice(tr.next_state, other.index);
    const std::vector<double> u = forward(other.target_actor, obs);
    next_in.insert(next_in.end(), u.begin(), u.end());
  }
  std::vector<double> cur_in(tr.state.begin(), tr.state.end());
  cur_in.insert(cur_in.end(), tr.action.begin(), tr.action.end());
  const double q_next = forward(agent.target_critic, next_in)[0];
  const double q_cur = forward(agent.critic, cur_in)[0];
  return tr.reward + cfg.gamma * q_next - q_cur;
}

struct CriticUpdateResult {
  double loss = 0.0;
  std::vector<double> abs_deltas;
};

// One Adam step on the critic, minimizing the importance-weighted squared
// TD error over the sampled batch. Emits |delta| per sample for the
// priority refresh.
inline CriticUpdateResult critic_update(Agent& agent,
                                        std::span<const std::size_t> slots,
                                        std::span<const double> probs,
                                        const std::vector<Agent>& all,
                                        const SimConfig& cfg) {
  const std::size_t k = slots.size();
  if (k == 0) throw std::invalid_argument("critic_update: empty batch");
  Grads grads(agent.critic);
  grads.zero();
  CriticUpdateResult res;
  res.abs_deltas.reserve(k);

  FwdCache critic_cache, scratch;
  std::vector<double> next_in, cur_in;
  const double inv_k = 1.0 / static_cast<double>(k);

  for (std::size_t i = 0; i < k; ++i) {
    const Transition& tr = agent.buffer.at(slots[i]);
    next_in.assign(tr.next_state.begin(), tr.next_state.end());
    for (const Agent& other : all) {
      forward(other.target_actor, agent.obs_slice(tr.next_state, other.index), scratch);
      const auto& u = scratch.x.back();
      next_in.insert(next_in.end(), u.begin(), u.end());
    }
    forward(agent.target_critic, next_in, scratch);
    const double q_next = scratch.x.back()[0];

    cur_in.assign(tr.state.begin(), tr.state.end());
    cur_in.insert(cur_in.end(), tr.action.begin(), tr.action.end());
    forward(agent.critic, cur_in, critic_cache);
    const double q_cur = critic_cache.x.back()[0];

    const double delta = tr.reward + cfg.gamma * q_next - q_cur;
    const double w = is_weight(k, probs[i], cfg.mu_is);
    res.loss += w * delta * delta * inv_k;
    const double upstream = -2.0 * w * delta * inv_k;
    backward(agent.critic, critic_cache, std::span<const double>(&upstream, 1), grads);
    res.abs_deltas.push_back(std::abs(delta));
  }

  if (!std::isfinite(res.loss))
    throw std::runtime_error("critic_update: non-finite loss");
  adam_step(agent.critic, grads, agent.critic_opt);
  return res;
}

// Q and dQ/d(own action slice) for a candidate joint action; the seam that
// lets tests drive the actor against a hand-built critic.
using ActionCritic = std::function<double(std::span<const double> state,
                                          std::span<const double> joint_action,
                                          std::span<double> dq_da)>;

inline ActionCritic net_action_critic(Agent& agent) {
  return [&agent](std::span<const double> state, std::span<const double> joint_action,
                  std::span<double> dq_da) {
    thread_local FwdCache cache;
    std::vector<double> in(state.begin(), state.end());
    in.insert(in.end(), joint_action.begin(), joint_action.end());
    forward(agent.critic, in, cache);
    const double one = 1.0;
    const std::vector<double> din =
        backward(agent.critic, cache, std::span<const double>(&one, 1), nullptr);
    const std::size_t base = state.size() + static_cast<std::size_t>(agent.index) * kActionDim;
    for (int i = 0; i < kActionDim; ++i) dq_da[i] = din[base + i];
    return cache.x.back()[0];
  };
}

// One Adam step of deterministic policy gradient ascent: the batch's other
// actions stay as stored, this agent's is replaced by its online actor, and
// the critic's action gradient is chained through the actor.
inline void actor_update_with_critic(Agent& agent, std::span<const std::size_t> slots,
                                     const ActionCritic& critic_fn) {
  const std::size_t k = slots.size();
  if (k == 0) throw std::invalid_argument("actor_update: empty batch");
  Grads grads(agent.actor);
  grads.zero();
  FwdCache actor_cache;
  std::vector<double> joint(agent.joint_action_dim());
  std::array<double, kActionDim> dq_da{};

  for (std::size_t i = 0; i < k; ++i) {
    const Transition& tr = agent.buffer.at(slots[i]);
    const auto obs = agent.obs_slice(tr.state, agent.index);
    forward(agent.actor, obs, actor_cache);
    const auto& u = actor_cache.x.back();
    joint.assign(tr.action.begin(), tr.action.end());
    for (int c = 0; c < kActionDim; ++c)
      joint[static_cast<std::size_t>(agent.index) * kActionDim + c] = u[c];
    critic_fn(tr.state, joint, dq_da);
    backward(agent.actor, actor_cache, dq_da, grads);
  }

  // Ascend the batch-mean objective.
  grads.scale(-1.0 / static_cast<double>(k));
  adam_step(agent.actor, grads, agent.actor_opt);
}

inline void actor_update(Agent& agent, std::span<const std::size_t> slots,
                         const SimConfig& /*cfg*/) {
  actor_update_with_critic(agent, slots, net_action_critic(agent));
}

struct TrainDiagnostics {
  bool trained = false;
  std::vector<double> critic_losses;
  std::vector<double> mean_abs_delta;
};

// One full learning step for every agent: sample, critic step, actor step,
// soft target updates, priority refresh, noise decay. No-op until every
// buffer can fill a batch.
inline TrainDiagnostics train_step(std::vector<Agent>& agents, const SimConfig& cfg) {
  TrainDiagnostics diag;
  for (const Agent& a : agents) {
    if (a.buffer.size() < static_cast<std::size_t>(cfg.batch_k)) return diag;
  }
  diag.trained = true;
  for (Agent& agent : agents) {
    const auto batch = agent.buffer.sample(cfg.batch_k, agent.replay_rng);
    const auto cu = critic_update(agent, batch.slots, batch.probs, agents, cfg);
    actor_update(agent, batch.slots, cfg);
    soft_update(agent.target_actor, agent.actor, cfg.tau);
    soft_update(agent.target_critic, agent.critic, cfg.tau);
    agent.buffer.update_priorities(batch.slots, batch.ids, cu.abs_deltas);
    agent.noise_sigma *= cfg.noise_decay;
    agent.train_steps += 1;

    diag.critic_losses.push_back(cu.loss);
    double s = 0.0;
    for (double d : cu.abs_deltas) s += d;
    diag.mean_abs_delta.push_back(s / static_cast<double>(cu.abs_deltas.size()));
  }
  return diag;
}

}  // namespace uavmec
