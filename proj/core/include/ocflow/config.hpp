#pragma once

#include <map>
#include <memory>
#include <ostream>
#include <string>

#include "ocflow/guidance.hpp"

namespace ocflow {

/// Flat dotted key-value config ("problem.field.variant = linear"), one pair
/// per line, "#" comments. Lookups that fail raise config_error carrying the
/// offending key (and line number when known).
struct ConfigData {
  std::string path;
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;  // 1-based

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
};

ConfigData parse_config_file(const std::string& path);

/// A fully assembled run: exactly one of the Euclidean or SO(3) sides is
/// populated, according to problem.manifold.
struct Experiment {
  bool is_so3 = false;

  std::unique_ptr<EuclideanField> field;
  std::unique_ptr<Reward> reward;
  VectorXd x0;
  GuidanceConfig config;

  std::unique_ptr<So3Field> so3_field;
  std::unique_ptr<So3Reward> so3_reward;
  so3::Mat3 so3_x0 = so3::Mat3::Identity();
  So3GuidanceConfig so3_config;

  std::string report_path;
  std::string curves_path;
  std::string trajectory_path;
};

Experiment build_experiment(const ConfigData& cfg);

/// Runs one config end to end and writes its outputs. Returns the process
/// exit code: 0 on success, 2 on configuration errors, 3 when the run
/// diverged (partial report still written).
int execute_run(const std::string& config_path, std::ostream& log);

/// Runs every *.cfg under config_dir (sorted), with up to `jobs` configs in
/// flight at once. Returns the worst per-config exit code.
int execute_sweep(const std::string& config_dir, int jobs, std::ostream& log);

}  // namespace ocflow
