#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mpsim/state.hpp"

namespace mpsim {

enum class Experiment { simulate, zeromode, hydrogen, scaling, epsilon_sweep };

std::string to_string(Experiment e);
/// Accepts "epsilon-sweep" and "epsilon_sweep".
Experiment parse_experiment(const std::string& name);

struct RunConfig {
  Experiment experiment = Experiment::simulate;
  SimParams params;
  std::filesystem::path output_dir = "out";
  int sample_every = 1;
  std::uint64_t seed = 0;
  /// 0 disables checkpoints.
  int checkpoint_every = 0;
  std::filesystem::path restart;

  // Initial data for time-dependent experiments.
  std::string initial = "gaussian";
  double width = 1.0;
  Vec3 center{0.0, 0.0, 0.0};
  Vec3 momentum{0.0, 0.0, 0.0};
  std::array<cplx, 2> spin{cplx{1.0, 0.0}, cplx{0.0, 0.0}};
  std::string a_init = "zero";
  double a_amplitude = 0.0;
  int a_max_mode = 2;

  // Experiment-specific lists and knobs.
  std::vector<double> lambdas;
  std::vector<double> epsilons;
  double field_energy = 0.1;
  int samples = 1000;
  double sample_radius = 10.0;

  /// Effective value of every key as text, and where it came from
  /// ("default", "file" or "flag").
  std::map<std::string, std::string> values;
  std::map<std::string, std::string> sources;
  std::map<std::string, std::string> file_values;
  std::map<std::string, std::string> flag_values;
};

struct ConfigKey {
  std::string name;
  std::string help;
};

/// Every accepted key, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Closest accepted key by edit distance.
std::string nearest_key(const std::string& key);

/// Reads "key = value" lines; '#' starts a comment.  Unknown keys raise a
/// config error that names the nearest valid key.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Builds a validated RunConfig: experiment preset defaults, then file
/// values, then flag values.  Throws config errors naming the field.
RunConfig parse_config(Experiment experiment, const std::map<std::string, std::string>& file_values,
                       const std::map<std::string, std::string>& flag_values);

}  // namespace mpsim
