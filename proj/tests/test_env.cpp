#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "uavmec/env.hpp"

using namespace uavmec;

namespace {

// Independent route to the rate formula, kept apart from data_rate on
// purpose: evaluates the SNR pieces separately in long double.
long double rate_reference(long double r, const SimConfig& cfg) {
  const long double rho = static_cast<long double>(cfg.g0) * cfg.g_ant / cfg.noise;
  const long double denom = static_cast<long double>(cfg.altitude) * cfg.altitude + r * r;
  const long double snr = rho * cfg.tx_power / denom;
  return cfg.bandwidth * std::log2(1.0L + snr);
}

Task reference_task() {
  // 12 KB at 1900 cycles/bit.
  return Task{96000.0, 96000.0 * 1900.0};
}

}  // namespace

TEST_CASE("spawn_ues stays in the square and is seed-deterministic") {
  SimConfig cfg;
  Rng a(77), b(77);
  const auto ues = spawn_ues(cfg, a);
  REQUIRE(ues.size() == 50);
  for (const auto& ue : ues) {
    CHECK(ue.x >= 0.0);
    CHECK(ue.x <= 100.0);
    CHECK(ue.y >= 0.0);
    CHECK(ue.y <= 100.0);
  }
  const auto again = spawn_ues(cfg, b);
  for (std::size_t i = 0; i < ues.size(); ++i) CHECK(ues[i] == again[i]);
}

TEST_CASE("spawn_ues empirical mean sits at the center") {
  SimConfig cfg;
  cfg.n_ues = 100000;
  Rng rng(123);
  const auto ues = spawn_ues(cfg, rng);
  double mx = 0.0, my = 0.0;
  for (const auto& ue : ues) {
    mx += ue.x;
    my += ue.y;
  }
  mx /= ues.size();
  my /= ues.size();
  CHECK(std::abs(mx - 50.0) < 1.0);
  CHECK(std::abs(my - 50.0) < 1.0);
}

TEST_CASE("spawn_tasks ranges and degenerate density") {
  SimConfig cfg;
  Rng rng(9);
  const auto tasks = spawn_tasks(cfg, rng);
  for (const auto& t : tasks) {
    CHECK(t.data_bits >= 80000.0);
    CHECK(t.data_bits <= 112000.0);
    CHECK(t.cycles >= t.data_bits * 1800.0);
    CHECK(t.cycles <= t.data_bits * 2000.0);
  }
  Rng r2(9);
  const auto same = spawn_tasks(cfg, r2);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    CHECK(tasks[i].data_bits == same[i].data_bits);
    CHECK(tasks[i].cycles == same[i].cycles);
  }

  SimConfig degen = cfg;
  degen.density_min = degen.density_max = 1900.0;
  Rng r3(4);
  for (const auto& t : spawn_tasks(degen, r3))
    CHECK(t.cycles == Catch::Approx(t.data_bits * 1900.0).epsilon(1e-15));
}

TEST_CASE("uav_step moves, reverts, and rejects bad actions") {
  SimConfig cfg;
  const UavPose start{10.0, 10.0};
  SECTION("axis-aligned move") {
    auto [pose, viol] = uav_step(start, {0.0, 20.0}, {}, cfg);
    CHECK_FALSE(viol);
    CHECK(pose.x == Catch::Approx(30.0));
    CHECK(pose.y == Catch::Approx(10.0));
  }
  SECTION("out-of-bounds candidate stays put") {
    auto [pose, viol] = uav_step({90.0, 90.0}, {std::numbers::pi / 4.0, 20.0}, {}, cfg);
    CHECK(viol);
    CHECK(pose.x == 90.0);
    CHECK(pose.y == 90.0);
  }
  SECTION("proximity violation flags both parties") {
    const std::vector<UavPose> other_a{{50.0, 50.5}};
    auto [pa, va] = uav_step({50.0, 50.0}, {0.0, 0.0}, other_a, cfg);
    CHECK(va);
    CHECK(pa == UavPose{50.0, 50.0});
    const std::vector<UavPose> other_b{{50.0, 50.0}};
    auto [pb, vb] = uav_step({50.0, 50.5}, {0.0, 0.0}, other_b, cfg);
    CHECK(vb);
  }
  SECTION("contract violations") {
    CHECK_THROWS_AS(uav_step(start, {-0.1, 5.0}, {}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(uav_step(start, {2.0 * std::numbers::pi, 5.0}, {}, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(uav_step(start, {0.0, cfg.d_max + 0.1}, {}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(uav_step(start, {0.0, -1.0}, {}, cfg), std::invalid_argument);
  }
}

TEST_CASE("horizontal_dist basics and symmetry") {
  CHECK(horizontal_dist({0, 0}, {3, 4}) == Catch::Approx(5.0));
  CHECK(horizontal_dist({7, -2}, {7, -2}) == 0.0);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec2 a{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Vec2 b{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    CHECK(horizontal_dist(a, b) == Catch::Approx(horizontal_dist(b, a)).epsilon(1e-15));
  }
}

TEST_CASE("data_rate matches the independent reference at the origin") {
  SimConfig cfg;
  const double r0 = data_rate(0.0, cfg);
  const double want = static_cast<double>(rate_reference(0.0L, cfg));
  CHECK(std::abs(r0 - want) / want < 1e-3);
  CHECK(r0 == Catch::Approx(1.3663727980e8).epsilon(1e-3));  // frozen reference value
}

TEST_CASE("data_rate is monotone in distance and linear in bandwidth") {
  SimConfig cfg;
  double prev = data_rate(0.0, cfg);
  for (double r = 5.0; r <= 100.0; r += 5.0) {
    const double cur = data_rate(r, cfg);
    CHECK(cur < prev);
    prev = cur;
  }
  SimConfig doubled = cfg;
  doubled.bandwidth *= 2.0;
  CHECK(data_rate(20.0, doubled) == Catch::Approx(2.0 * data_rate(20.0, cfg)).epsilon(1e-12));
}

TEST_CASE("offload and execution times are exact quotients") {
  const Task task = reference_task();
  SimConfig cfg;
  const double r0 = data_rate(0.0, cfg);
  CHECK(offload_time(task, r0) == Catch::Approx(7.0259e-4).epsilon(1e-3));
  CHECK(exec_time(task, task.cycles) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(exec_time(task, task.cycles / 2.0) == Catch::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(offload_time(task, 0.0), std::domain_error);
  CHECK_THROWS_AS(exec_time(task, 0.0), std::domain_error);
}

TEST_CASE("local energy at the deadline frequency") {
  SimConfig cfg;
  const Task task = reference_task();
  const double f = local_cpu_hz(task, cfg);
  CHECK(f == Catch::Approx(1.824e8).epsilon(1e-12));
  const double e = local_energy(task, f, cfg);
  // Independent route: k * f^v * (F/f).
  const double want = cfg.k_energy * std::pow(f, cfg.v_energy) * (task.cycles / f);
  CHECK(e == Catch::Approx(want).epsilon(1e-12));
  CHECK(e == Catch::Approx(6.0684042240e-4).epsilon(1e-3));  // frozen reference value

  CHECK(local_energy(Task{1000.0, 0.0}, 1e6, cfg) == 0.0);
  SimConfig lin = cfg;
  lin.v_energy = 1.0;
  CHECK(local_energy(task, 1e6, lin) == Catch::Approx(local_energy(task, 1e9, lin)));
  CHECK(local_energy(task, 1e6, lin) == Catch::Approx(cfg.k_energy * task.cycles));
}

TEST_CASE("offload energy is power times airtime and grows with distance") {
  SimConfig cfg;
  CHECK(offload_energy(7.0259e-4, cfg) == Catch::Approx(7.0259e-5).epsilon(1e-12));
  CHECK(offload_energy(0.0, cfg) == 0.0);
  CHECK_THROWS_AS(offload_energy(-1.0, cfg), std::domain_error);
  const Task task = reference_task();
  double prev = -1.0;
  for (double r = 0.0; r <= 20.0; r += 2.0) {
    const double e = offload_energy(offload_time(task, data_rate(r, cfg)), cfg);
    CHECK(e > prev);
    prev = e;
  }
}

TEST_CASE("observe layout and normalization") {
  SimConfig cfg;
  cfg.n_uavs = 3;
  cfg.n_ues = 50;
  Rng rng(1);
  WorldState w = reset_world(cfg, rng);
  const auto obs = observe(w, 0, cfg);
  REQUIRE(static_cast<int>(obs.size()) == obs_len(cfg));
  CHECK(obs.size() == 57);  // 2 + 2 + 50 + 3
  CHECK(obs[0] == Catch::Approx(0.1));  // (10,10)/100
  CHECK(obs[1] == Catch::Approx(0.1));
  // all counters zero at t=0
  for (std::size_t i = 4; i < obs.size(); ++i) CHECK(obs[i] == 0.0);
  const auto state = joint_state(w, cfg);
  CHECK(state.size() == 3u * 57u);
  CHECK_THROWS_AS(observe(w, 3, cfg), std::out_of_range);
}

TEST_CASE("env_step applies the documented accounting") {
  SimConfig cfg;
  cfg.n_uavs = 2;
  cfg.n_ues = 4;
  Rng rng(21);
  // UEs under UAV 0's pad; UAV 1 far away.
  const std::vector<Vec2> ues{{10, 10}, {11, 10}, {10, 11}, {90, 90}};
  WorldState w = reset_world(cfg, rng);
  const std::vector<UavAction> hold(2, UavAction{0.0, 0.0});
  const StepResult res = env_step(w, hold, ues, cfg, rng);

  CHECK(res.next.t == 1);
  CHECK(res.record.decisions[0] == 1);
  CHECK(res.record.decisions[1] == 1);
  CHECK(res.record.decisions[2] == 1);
  CHECK(res.record.decisions[3] == 2);
  CHECK(res.next.served_counts == std::vector<double>{1, 1, 1, 1});
  CHECK(res.next.load_history[0] == Catch::Approx(0.75));
  CHECK(res.next.load_history[1] == Catch::Approx(0.25));
  const double c_sum = res.next.load_history[0] + res.next.load_history[1];
  CHECK(c_sum == Catch::Approx(4.0 / 4.0));  // offloading UEs / N
  CHECK(res.record.f_e == Catch::Approx(1.0));
  CHECK(res.record.f_u == Catch::Approx(jain(std::vector<double>{0.75, 0.25})));
}

TEST_CASE("no coverage means all-local and zero loads") {
  SimConfig cfg;
  cfg.n_uavs = 2;
  cfg.n_ues = 3;
  cfg.r_cov = 2.0;
  cfg.r_uav = 1.0;
  Rng rng(2);
  const std::vector<Vec2> ues{{50, 50}, {40, 60}, {60, 40}};  // far from both pads
  WorldState w = reset_world(cfg, rng);
  const std::vector<UavAction> hold(2, UavAction{0.0, 0.0});
  const StepResult res = env_step(w, hold, ues, cfg, rng);
  for (int d : res.record.decisions) CHECK(d == 0);
  CHECK(res.next.load_history == std::vector<double>{0.0, 0.0});
  CHECK(res.record.f_u == 0.0);
  CHECK(res.record.f_e == 0.0);
  // Nobody served yet: reward is 0 or -penalty.
  for (double r : res.rewards) CHECK(r == 0.0);
}

TEST_CASE("all-violating step pays the penalty on the shared term") {
  SimConfig cfg;
  cfg.n_uavs = 2;
  cfg.n_ues = 3;
  Rng rng(3), rng2(3);
  const std::vector<Vec2> ues{{10, 10}, {90, 90}, {50, 50}};
  WorldState w = reset_world(cfg, rng);
  // Both UAVs try to leave the area: (10,10) heading down-left etc.
  const std::vector<UavAction> out{{std::numbers::pi * 1.25, 20.0},
                                   {std::numbers::pi * 0.25, 20.0}};
  const StepResult bad = env_step(w, out, ues, cfg, rng);
  CHECK(bad.record.violations == std::vector<bool>{true, true});
  WorldState w2 = reset_world(cfg, rng2);
  const std::vector<UavAction> hold(2, UavAction{0.0, 0.0});
  const StepResult good = env_step(w2, hold, ues, cfg, rng2);
  // same decisions either way (poses unchanged), so rewards differ by p_m
  for (int m = 0; m < 2; ++m)
    CHECK(bad.rewards[m] == Catch::Approx(good.rewards[m] - cfg.penalty));
}

TEST_CASE("env_step is deterministic and respects the horizon") {
  SimConfig cfg;
  cfg.n_uavs = 2;
  cfg.n_ues = 5;
  cfg.horizon = 3;
  Rng layout(8);
  const auto ues = spawn_ues(cfg, layout);

  auto run = [&]() {
    Rng rng(99);
    Rng actions_rng(55);
    WorldState w = reset_world(cfg, rng);
    std::vector<StepRecord> records;
    for (int t = 0; t < cfg.horizon; ++t) {
      std::vector<UavAction> acts;
      for (int m = 0; m < cfg.n_uavs; ++m)
        acts.push_back({actions_rng.uniform(0.0, 6.28), actions_rng.uniform(0.0, 20.0)});
      StepResult res = env_step(w, acts, ues, cfg, rng);
      records.push_back(res.record);
      w = std::move(res.next);
    }
    return std::make_pair(w, records);
  };
  auto [w1, rec1] = run();
  auto [w2, rec2] = run();
  for (int t = 0; t < cfg.horizon; ++t) {
    CHECK(rec1[t].poses == rec2[t].poses);
    CHECK(rec1[t].energies == rec2[t].energies);
    CHECK(rec1[t].rewards == rec2[t].rewards);
    CHECK(rec1[t].decisions == rec2[t].decisions);
  }
  // horizon guard
  std::vector<UavAction> hold(2, UavAction{0.0, 0.0});
  Rng r(1);
  CHECK_THROWS_AS(env_step(w1, hold, ues, cfg, r), std::logic_error);
}

TEST_CASE("poses stay in bounds and movers stay separated under random play") {
  SimConfig cfg;
  cfg.n_uavs = 3;
  cfg.n_ues = 8;
  cfg.horizon = 40;
  cfg.r_uav = 5.0;  // make proximity events likely
  Rng layout(14);
  const auto ues = spawn_ues(cfg, layout);
  Rng rng(500), act_rng(501);
  WorldState w = reset_world(cfg, rng);
  for (int step = 0; step < 2000; ++step) {
    if (w.t == cfg.horizon) w = reset_world(cfg, rng);
    const auto before = w.poses;
    std::vector<UavAction> acts;
    for (int m = 0; m < cfg.n_uavs; ++m)
      acts.push_back({act_rng.uniform(0.0, 6.283), act_rng.uniform(0.0, cfg.d_max)});
    StepResult res = env_step(w, acts, ues, cfg, rng);
    for (int m = 0; m < cfg.n_uavs; ++m) {
      CHECK(in_bounds(res.next.poses[m], cfg));
      const bool moved = !(res.next.poses[m] == before[m]);
      CHECK(moved == !res.record.violations[m]);
    }
    for (int a = 0; a < cfg.n_uavs; ++a) {
      for (int b = a + 1; b < cfg.n_uavs; ++b) {
        const bool both_moved =
            !res.record.violations[a] && !res.record.violations[b];
        if (both_moved)
          CHECK(horizontal_dist(res.next.poses[a], res.next.poses[b]) >= cfg.r_uav);
      }
    }
    w = std::move(res.next);
  }
}

TEST_CASE("served counts track offload events one to one") {
  SimConfig cfg;
  cfg.n_uavs = 2;
  cfg.n_ues = 12;
  Rng layout(31);
  const auto ues = spawn_ues(cfg, layout);
  Rng rng(32), act_rng(33);
  WorldState w = reset_world(cfg, rng);
  for (int t = 0; t < cfg.horizon; ++t) {
    const auto before = w.served_counts;
    std::vector<UavAction> acts;
    for (int m = 0; m < cfg.n_uavs; ++m)
      acts.push_back({act_rng.uniform(0.0, 6.283), act_rng.uniform(0.0, cfg.d_max)});
    StepResult res = env_step(w, acts, ues, cfg, rng);
    int offloaded = 0;
    for (int n = 0; n < cfg.n_ues; ++n) {
      const bool off = res.record.decisions[n] > 0;
      offloaded += off ? 1 : 0;
      CHECK(res.next.served_counts[n] - before[n] == (off ? 1.0 : 0.0));
    }
    double load_sum = 0.0;
    for (int m = 0; m < cfg.n_uavs; ++m)
      load_sum += res.next.load_history[m] - w.load_history[m];
    CHECK(load_sum == Catch::Approx(static_cast<double>(offloaded) / cfg.n_ues));
    w = std::move(res.next);
  }
}
