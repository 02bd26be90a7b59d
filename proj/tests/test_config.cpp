#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "uavmec/config.hpp"

using namespace uavmec;

TEST_CASE("defaults validate and carry the reference parameter set") {
  SimConfig cfg;
  REQUIRE_NOTHROW(cfg.validate());
  CHECK(cfg.n_ues == 50);
  CHECK(cfg.horizon == 20);
  CHECK(cfg.side_len == 100.0);
  CHECK(cfg.noise == 1e-12);  // -90 dBm
  CHECK(cfg.gamma == 0.95);
  CHECK(cfg.batch_k == 256);
  CHECK(cfg.buffer_cap == 100000);
  CHECK(cfg.hidden_widths == std::vector<int>{400, 300, 200, 200});
}

TEST_CASE("task size units") {
  SimConfig cfg;
  CHECK(cfg.data_min_bits() == 80000.0);  // 10 KB
  CHECK(cfg.data_max_bits() == 112000.0);
  cfg.task_size_unit = TaskSizeUnit::Bit;
  CHECK(cfg.data_min_bits() == 10000.0);
  CHECK(cfg.data_max_bits() == 14000.0);
}

TEST_CASE("config round-trips through text") {
  SimConfig cfg;
  cfg.n_uavs = 2;
  cfg.seed = 4242;
  cfg.lr_actor = 1.25e-4;
  cfg.hidden_widths = {64, 64};
  cfg.task_size_unit = TaskSizeUnit::Bit;
  cfg.new_priority = NewPriorityMode::TdError;
  std::istringstream in(serialize_config(cfg));
  SimConfig back = parse_config(in);
  CHECK(serialize_config(back) == serialize_config(cfg));
  CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("parser accepts comments, rejects junk") {
  std::istringstream ok("# comment\nn_ues = 10\n\nseed = 7 # trailing\n");
  SimConfig cfg = parse_config(ok);
  CHECK(cfg.n_ues == 10);
  CHECK(cfg.seed == 7);

  std::istringstream unknown("definitely_not_a_key = 1\n");
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);
  std::istringstream badval("n_ues = ten\n");
  CHECK_THROWS_AS(parse_config(badval), ConfigError);
  std::istringstream noeq("n_ues 10\n");
  CHECK_THROWS_AS(parse_config(noeq), ConfigError);
}

TEST_CASE("validation enforces the documented invariants") {
  auto broken = [](auto mutate) {
    SimConfig cfg;
    mutate(cfg);
    return cfg;
  };
  CHECK_THROWS_AS(broken([](SimConfig& c) { c.r_uav = c.r_cov; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](SimConfig& c) { c.d_max = c.side_len + 1; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](SimConfig& c) { c.gamma = 1.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](SimConfig& c) { c.tau = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](SimConfig& c) { c.task_data_min_k = 20.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](SimConfig& c) { c.n_uavs = 5; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](SimConfig& c) { c.bandwidth = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](SimConfig& c) { c.hidden_widths = {}; }).validate(), ConfigError);
}

TEST_CASE("hash tracks structure, not run control") {
  SimConfig a, b;
  b.seed = 999;
  b.episodes = 17;
  b.lr_critic = 1e-3;
  CHECK(config_hash(a) == config_hash(b));  // run knobs don't matter
  b.altitude = 60.0;
  CHECK(config_hash(a) != config_hash(b));  // physics does
  SimConfig c;
  c.hidden_widths = {400, 300, 200, 201};
  CHECK(config_hash(a) != config_hash(c));  // network shape does
}
