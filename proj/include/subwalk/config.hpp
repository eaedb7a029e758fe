#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subwalk/bernstein.hpp"

namespace subwalk {

// Line-oriented INI: [spec], [experiment] and [mc] sections of key = value lines.
struct ExperimentConfig {
  // [spec]
  std::string family = "stable";  // stable | stable_mixture | relativistic
  std::vector<double> params{0.5};

  // [experiment]
  int d = 2;
  std::vector<double> n_list{8.0, 16.0, 32.0};
  int M = 20000;
  int M_d3 = 4000;
  double eps_tail = 1e-6;
  int step_radius = 160;
  bool assign_tail = true;
  int green_radius = 32;
  int green_radius_d3 = 16;
  double band_r_max = 16.0;
  double b1 = 1.0 / 12.0;
  double b2 = 1.0 / 6.0;
  double a = 1.0 / 3.0;
  double harnack_a = 0.5;
  double exterior_factor = 4.0;
  double capture_factor = 8.0;
  int probe_trials = 1000;
  std::string out = "out";

  // [mc]
  std::uint64_t seed = 12345;
  int jobs = 1;
  long long exit_paths = 1000000;
  double mc_n = 8.0;
  long long max_steps = 100000;
  long long green_paths = 50000;
  long long green_steps = 1000;

  BernsteinSpec spec() const;
  int truncation_M() const { return d == 3 ? M_d3 : M; }
  int green_grid_radius() const { return d == 3 ? green_radius_d3 : green_radius; }
  // Throws ConfigError on invalid combinations.
  void validate() const;
};

// Throws ConfigError on unreadable files, unknown sections or keys, and malformed values.
ExperimentConfig load_config(const std::string& path);
// "section.key" = value, same parsing rules as the file.
void apply_setting(ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value);
std::vector<std::string> config_keys();
std::string config_help();
std::string config_to_ini(const ExperimentConfig& cfg);

}  // namespace subwalk
