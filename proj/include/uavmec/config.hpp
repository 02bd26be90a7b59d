#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavmec {

// How the kilo-valued task sizes convert to bits:
// Byte reading: 1 K = 1000 bytes = 8000 bits; Bit reading: 1 K = 1000 bits.
enum class TaskSizeUnit { Byte, Bit };

// Priority assigned to a freshly stored transition: largest priority seen so
// far, or a TD-error computed at push time.
enum class NewPriorityMode { MaxSeen, TdError };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every scalar of the simulated world plus the learner knobs. Defaults are
// the reference parameter set used throughout the tests.
struct SimConfig {
  // world geometry
  int n_ues = 50;
  int n_uavs = 3;
  int horizon = 20;          // time slots per episode
  double side_len = 100.0;   // m, square target area
  double altitude = 50.0;    // m, fixed UAV flight height
  double d_max = 20.0;       // m, max flying distance per TS
  double r_cov = 20.0;       // m, max horizontal coverage radius
  double r_uav = 1.0;        // m, min inter-UAV separation

  // channel and energy model
  double bandwidth = 1e7;    // Hz
  double tx_power = 0.1;     // W
  double noise = 1e-12;      // W (-90 dBm)
  double g0 = 1.42e-4;       // channel gain at 1 m
  double g_ant = 2.2846;     // antenna constant
  double k_energy = 1e-28;   // CPU energy coefficient
  double v_energy = 3.0;     // CPU energy exponent
  double t_slot = 1.0;       // s, task deadline = TS duration

  // task model
  double task_data_min_k = 10.0;  // kilo-units, see task_size_unit
  double task_data_max_k = 14.0;
  TaskSizeUnit task_size_unit = TaskSizeUnit::Byte;
  double density_min = 1800.0;    // cycles per bit
  double density_max = 2000.0;

  // reward
  double penalty = 10.0;        // subtracted per violating UAV
  double reward_scale = 1.0;    // divides rewards stored for training only

  // learner
  double gamma = 0.95;
  double tau = 0.01;
  double lr_actor = 3e-5;
  double lr_critic = 1e-4;
  int batch_k = 256;
  std::size_t buffer_cap = 100000;
  double eps_priority = 0.001;
  double beta_priority = 0.6;
  double mu_is = 0.4;
  double noise_sigma0 = 1.0;
  double noise_decay = 0.9995;
  NewPriorityMode new_priority = NewPriorityMode::MaxSeen;
  std::vector<int> hidden_widths = {400, 300, 200, 200};

  // run control
  int episodes = 3000;
  int checkpoint_every = 500;
  std::uint64_t seed = 1;

  double data_min_bits() const { return task_data_min_k * bits_per_kilo(); }
  double data_max_bits() const { return task_data_max_k * bits_per_kilo(); }

  double bits_per_kilo() const {
    return task_size_unit == TaskSizeUnit::Byte ? 8000.0 : 1000.0;
  }

  void validate() const {
    auto req = [](bool ok, const char* what) {
      if (!ok) throw ConfigError(std::string("config: ") + what);
    };
    req(n_ues > 0, "n_ues must be positive");
    req(n_uavs > 0 && n_uavs <= 4, "n_uavs must be in [1,4] (initial corner slots)");
    req(horizon > 0, "horizon must be positive");
    req(side_len > 0 && altitude > 0 && d_max > 0, "lengths must be positive");
    req(bandwidth > 0 && tx_power > 0 && noise > 0, "channel constants must be positive");
    req(g0 > 0 && g_ant > 0 && k_energy > 0 && v_energy >= 1, "energy constants invalid");
    req(t_slot > 0, "t_slot must be positive");
    req(r_uav < r_cov, "r_uav must be < r_cov");
    req(d_max <= side_len, "d_max must be <= side_len");
    req(task_data_min_k > 0 && task_data_min_k <= task_data_max_k, "task data range invalid");
    req(density_min > 0 && density_min <= density_max, "density range invalid");
    req(gamma > 0 && gamma < 1, "gamma must be in (0,1)");
    req(tau > 0 && tau <= 1, "tau must be in (0,1]");
    req(lr_actor > 0 && lr_critic > 0, "learning rates must be positive");
    req(batch_k > 0, "batch_k must be positive");
    req(buffer_cap >= static_cast<std::size_t>(batch_k), "buffer_cap must hold a batch");
    req(eps_priority > 0, "eps_priority must be positive");
    req(beta_priority >= 0 && mu_is >= 0, "priority exponents must be nonnegative");
    req(noise_sigma0 >= 0 && noise_decay > 0 && noise_decay <= 1, "noise schedule invalid");
    req(!hidden_widths.empty(), "hidden_widths must not be empty");
    for (int w : hidden_widths) req(w > 0, "hidden widths must be positive");
    req(episodes > 0, "episodes must be positive");
    req(penalty >= 0, "penalty must be nonnegative");
    req(reward_scale > 0, "reward_scale must be positive");
  }
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt_widths(const std::vector<int>& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << ',';
    os << w[i];
  }
  return os.str();
}

inline std::vector<int> parse_widths(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

}  // namespace detail

// Key-value serialization, one "key = value" per line. parse_config accepts
// the same format with '#' comments; unknown keys are rejected.
inline std::string serialize_config(const SimConfig& c) {
  using detail::fmt_double;
  std::ostringstream os;
  os << "n_ues = " << c.n_ues << '\n';
  os << "n_uavs = " << c.n_uavs << '\n';
  os << "horizon = " << c.horizon << '\n';
  os << "side_len = " << fmt_double(c.side_len) << '\n';
  os << "altitude = " << fmt_double(c.altitude) << '\n';
  os << "d_max = " << fmt_double(c.d_max) << '\n';
  os << "r_cov = " << fmt_double(c.r_cov) << '\n';
  os << "r_uav = " << fmt_double(c.r_uav) << '\n';
  os << "bandwidth = " << fmt_double(c.bandwidth) << '\n';
  os << "tx_power = " << fmt_double(c.tx_power) << '\n';
  os << "noise = " << fmt_double(c.noise) << '\n';
  os << "g0 = " << fmt_double(c.g0) << '\n';
  os << "g_ant = " << fmt_double(c.g_ant) << '\n';
  os << "k_energy = " << fmt_double(c.k_energy) << '\n';
  os << "v_energy = " << fmt_double(c.v_energy) << '\n';
  os << "t_slot = " << fmt_double(c.t_slot) << '\n';
  os << "task_data_min_k = " << fmt_double(c.task_data_min_k) << '\n';
  os << "task_data_max_k = " << fmt_double(c.task_data_max_k) << '\n';
  os << "task_size_unit = " << (c.task_size_unit == TaskSizeUnit::Byte ? "byte" : "bit") << '\n';
  os << "density_min = " << fmt_double(c.density_min) << '\n';
  os << "density_max = " << fmt_double(c.density_max) << '\n';
  os << "penalty = " << fmt_double(c.penalty) << '\n';
  os << "reward_scale = " << fmt_double(c.reward_scale) << '\n';
  os << "gamma = " << fmt_double(c.gamma) << '\n';
  os << "tau = " << fmt_double(c.tau) << '\n';
  os << "lr_actor = " << fmt_double(c.lr_actor) << '\n';
  os << "lr_critic = " << fmt_double(c.lr_critic) << '\n';
  os << "batch_k = " << c.batch_k << '\n';
  os << "buffer_cap = " << c.buffer_cap << '\n';
  os << "eps_priority = " << fmt_double(c.eps_priority) << '\n';
  os << "beta_priority = " << fmt_double(c.beta_priority) << '\n';
  os << "mu_is = " << fmt_double(c.mu_is) << '\n';
  os << "noise_sigma0 = " << fmt_double(c.noise_sigma0) << '\n';
  os << "noise_decay = " << fmt_double(c.noise_decay) << '\n';
  os << "new_priority = " << (c.new_priority == NewPriorityMode::MaxSeen ? "max" : "td") << '\n';
  os << "hidden_widths = " << detail::fmt_widths(c.hidden_widths) << '\n';
  os << "episodes = " << c.episodes << '\n';
  os << "checkpoint_every = " << c.checkpoint_every << '\n';
  os << "seed = " << c.seed << '\n';
  return os.str();
}

inline SimConfig parse_config(std::istream& in) {
  SimConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "n_ues") c.n_ues = std::stoi(val);
      else if (key == "n_uavs") c.n_uavs = std::stoi(val);
      else if (key == "horizon") c.horizon = std::stoi(val);
      else if (key == "side_len") c.side_len = std::stod(val);
      else if (key == "altitude") c.altitude = std::stod(val);
      else if (key == "d_max") c.d_max = std::stod(val);
      else if (key == "r_cov") c.r_cov = std::stod(val);
      else if (key == "r_uav") c.r_uav = std::stod(val);
      else if (key == "bandwidth") c.bandwidth = std::stod(val);
      else if (key == "tx_power") c.tx_power = std::stod(val);
      else if (key == "noise") c.noise = std::stod(val);
      else if (key == "g0") c.g0 = std::stod(val);
      else if (key == "g_ant") c.g_ant = std::stod(val);
      else if (key == "k_energy") c.k_energy = std::stod(val);
      else if (key == "v_energy") c.v_energy = std::stod(val);
      else if (key == "t_slot") c.t_slot = std::stod(val);
      else if (key == "task_data_min_k") c.task_data_min_k = std::stod(val);
      else if (key == "task_data_max_k") c.task_data_max_k = std::stod(val);
      else if (key == "task_size_unit") {
        if (val == "byte") c.task_size_unit = TaskSizeUnit::Byte;
        else if (val == "bit") c.task_size_unit = TaskSizeUnit::Bit;
        else throw ConfigError("task_size_unit must be byte or bit");
      }
      else if (key == "density_min") c.density_min = std::stod(val);
      else if (key == "density_max") c.density_max = std::stod(val);
      else if (key == "penalty") c.penalty = std::stod(val);
      else if (key == "reward_scale") c.reward_scale = std::stod(val);
      else if (key == "gamma") c.gamma = std::stod(val);
      else if (key == "tau") c.tau = std::stod(val);
      else if (key == "lr_actor") c.lr_actor = std::stod(val);
      else if (key == "lr_critic") c.lr_critic = std::stod(val);
      else if (key == "batch_k") c.batch_k = std::stoi(val);
      else if (key == "buffer_cap") c.buffer_cap = std::stoull(val);
      else if (key == "eps_priority") c.eps_priority = std::stod(val);
      else if (key == "beta_priority") c.beta_priority = std::stod(val);
      else if (key == "mu_is") c.mu_is = std::stod(val);
      else if (key == "noise_sigma0") c.noise_sigma0 = std::stod(val);
      else if (key == "noise_decay") c.noise_decay = std::stod(val);
      else if (key == "new_priority") {
        if (val == "max") c.new_priority = NewPriorityMode::MaxSeen;
        else if (val == "td") c.new_priority = NewPriorityMode::TdError;
        else throw ConfigError("new_priority must be max or td");
      }
      else if (key == "hidden_widths") c.hidden_widths = detail::parse_widths(val);
      else if (key == "episodes") c.episodes = std::stoi(val);
      else if (key == "checkpoint_every") c.checkpoint_every = std::stoi(val);
      else if (key == "seed") c.seed = std::stoull(val);
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ConfigError("config line " + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  return c;
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

inline void save_config(const SimConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << serialize_config(c);
}

// FNV-1a over the structural fields that a checkpoint depends on: network
// shapes and world/physics constants. Run-control knobs (seed, episodes,
// learning rates, ...) deliberately excluded so a saved model can be
// re-evaluated with different run settings.
inline std::uint64_t config_hash(const SimConfig& c) {
  using detail::fmt_double;
  std::ostringstream os;
  os << c.n_ues << '|' << c.n_uavs << '|' << c.horizon << '|'
     << fmt_double(c.side_len) << '|' << fmt_double(c.altitude) << '|'
     << fmt_double(c.d_max) << '|' << fmt_double(c.r_cov) << '|'
     << fmt_double(c.r_uav) << '|' << fmt_double(c.bandwidth) << '|'
     << fmt_double(c.tx_power) << '|' << fmt_double(c.noise) << '|'
     << fmt_double(c.g0) << '|' << fmt_double(c.g_ant) << '|'
     << fmt_double(c.k_energy) << '|' << fmt_double(c.v_energy) << '|'
     << fmt_double(c.t_slot) << '|' << fmt_double(c.data_min_bits()) << '|'
     << fmt_double(c.data_max_bits()) << '|' << fmt_double(c.density_min) << '|'
     << fmt_double(c.density_max) << '|' << detail::fmt_widths(c.hidden_widths);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace uavmec
