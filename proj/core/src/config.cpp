#include "ocflow/config.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "ocflow/report_io.hpp"
#include "ocflow/rng.hpp"

namespace ocflow {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

int line_of(const ConfigData& cfg, const std::string& key) {
  const auto it = cfg.lines.find(key);
  return it == cfg.lines.end() ? -1 : it->second;
}

std::vector<double> get_numbers(const ConfigData& cfg, const std::string& key,
                                int expected) {
  std::istringstream in(cfg.get(key));
  std::vector<double> out;
  double v = 0.0;
  while (in >> v) out.push_back(v);
  std::string leftover;
  if ((in >> leftover && !leftover.empty()) || out.empty() ||
      (expected >= 0 && static_cast<int>(out.size()) != expected)) {
    throw config_error("key '" + key + "' must hold " +
                           (expected >= 0 ? std::to_string(expected)
                                          : std::string("one or more")) +
                           " numbers",
                       line_of(cfg, key), key);
  }
  return out;
}

VectorXd get_vector(const ConfigData& cfg, const std::string& key, int dim) {
  const std::vector<double> nums = get_numbers(cfg, key, dim);
  return Eigen::Map<const VectorXd>(nums.data(), nums.size());
}

so3::Mat3 get_mat3(const ConfigData& cfg, const std::string& key) {
  const std::vector<double> nums = get_numbers(cfg, key, 9);
  so3::Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = nums[3 * r + c];
  return m;
}

so3::Mat3 get_rotation(const ConfigData& cfg, const std::string& key) {
  const so3::Mat3 m = get_mat3(cfg, key);
  if (!so3::is_rotation(m)) {
    throw config_error("key '" + key + "' is not a rotation matrix",
                       line_of(cfg, key), key);
  }
  return m;
}

[[noreturn]] void bad_value(const ConfigData& cfg, const std::string& key,
                            const std::string& what) {
  throw config_error("key '" + key + "': " + what, line_of(cfg, key), key);
}

}  // namespace

bool ConfigData::has(const std::string& key) const {
  return values.count(key) != 0;
}

const std::string& ConfigData::get(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) {
    throw config_error("missing required key '" + key + "'", -1, key);
  }
  return it->second;
}

std::string ConfigData::get_or(const std::string& key,
                               const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ConfigData::get_double(const std::string& key) const {
  const std::string& raw = get(key);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(raw, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != raw.size()) {
    throw config_error("key '" + key + "' is not a number: '" + raw + "'",
                       line_of(*this, key), key);
  }
  return v;
}

double ConfigData::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int ConfigData::get_int(const std::string& key) const {
  const double v = get_double(key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw config_error("key '" + key + "' must be an integer",
                       line_of(*this, key), key);
  }
  return i;
}

bool ConfigData::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& raw = get(key);
  if (raw == "true" || raw == "1") return true;
  if (raw == "false" || raw == "0") return false;
  throw config_error("key '" + key + "' must be true or false",
                     line_of(*this, key), key);
}

ConfigData parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw config_error("cannot open config file '" + path + "'", -1, "");
  }
  ConfigData cfg;
  cfg.path = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("line " + std::to_string(lineno) +
                             ": expected 'key = value'",
                         lineno, "");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw config_error("line " + std::to_string(lineno) + ": empty key",
                         lineno, "");
    }
    if (!cfg.values.emplace(key, value).second) {
      throw config_error("line " + std::to_string(lineno) +
                             ": duplicate key '" + key + "'",
                         lineno, key);
    }
    cfg.lines[key] = lineno;
  }
  return cfg;
}

namespace {

std::unique_ptr<EuclideanField> build_euclidean_field(const ConfigData& cfg,
                                                      int dim) {
  const std::string variant = cfg.get("problem.field.variant");
  if (variant == "zero") return std::make_unique<ZeroField>(dim);
  if (variant == "linear") {
    const std::vector<double> nums =
        get_numbers(cfg, "problem.field.matrix", dim * dim);
    MatrixXd a(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) a(r, c) = nums[r * dim + c];
    return std::make_unique<LinearField>(std::move(a));
  }
  if (variant == "gaussian_path") {
    return std::make_unique<AffineGaussianPathField>(
        AffineGaussianPathField::ot_schedule(),
        get_vector(cfg, "problem.field.x1", dim));
  }
  if (variant == "mlp") {
    Mlp net = Mlp::load(cfg.get("problem.field.weights_file"));
    if (net.output_dim() != dim) {
      bad_value(cfg, "problem.field.weights_file",
                "network output dimension does not match problem.dim");
    }
    return std::make_unique<MlpField>(std::move(net));
  }
  bad_value(cfg, "problem.field.variant", "unknown variant '" + variant + "'");
}

std::unique_ptr<So3Field> build_so3_field(const ConfigData& cfg) {
  const std::string variant = cfg.get("problem.field.variant");
  if (variant == "zero") return std::make_unique<ZeroSo3Field>();
  if (variant == "constant_body") {
    const std::vector<double> w = get_numbers(cfg, "problem.field.omega", 3);
    return std::make_unique<ConstantBodyField>(
        so3::hat(so3::Vec3(w[0], w[1], w[2])));
  }
  if (variant == "geodesic_pull") {
    return std::make_unique<GeodesicPullField>(
        get_rotation(cfg, "problem.field.target"));
  }
  if (variant == "mlp") {
    return std::make_unique<MlpSo3Field>(
        Mlp::load(cfg.get("problem.field.weights_file")));
  }
  bad_value(cfg, "problem.field.variant", "unknown variant '" + variant + "'");
}

std::unique_ptr<Reward> build_base_reward(const ConfigData& cfg,
                                          const std::string& prefix, int dim) {
  const std::string variant = cfg.get(prefix + ".variant");
  if (variant == "quadratic_target") {
    return std::make_unique<QuadraticTarget>(
        get_vector(cfg, prefix + ".target", dim));
  }
  if (variant == "linear_probe") {
    return std::make_unique<LinearProbe>(get_vector(cfg, prefix + ".w", dim));
  }
  bad_value(cfg, prefix + ".variant", "unknown variant '" + variant + "'");
}

std::unique_ptr<So3Reward> build_base_so3_reward(const ConfigData& cfg,
                                                 const std::string& prefix) {
  const std::string variant = cfg.get(prefix + ".variant");
  if (variant == "geodesic_target") {
    return std::make_unique<GeodesicTarget>(
        get_rotation(cfg, prefix + ".target"));
  }
  if (variant == "linear_probe") {
    return std::make_unique<So3LinearProbe>(get_mat3(cfg, prefix + ".w"));
  }
  bad_value(cfg, prefix + ".variant", "unknown variant '" + variant + "'");
}

GuidanceMode parse_mode(const ConfigData& cfg) {
  const std::string mode = cfg.get("optimizer.mode");
  if (mode == "ocflow") return GuidanceMode::ocflow;
  if (mode == "flowgrad") return GuidanceMode::flowgrad;
  if (mode == "dflow") return GuidanceMode::dflow;
  if (mode == "naive") return GuidanceMode::naive;
  bad_value(cfg, "optimizer.mode", "unknown mode '" + mode + "'");
}

So3GuidanceMode parse_so3_mode(const ConfigData& cfg) {
  const std::string mode = cfg.get("optimizer.mode");
  if (mode == "ocflow_so3") return So3GuidanceMode::ocflow_so3;
  if (mode == "naive_so3") return So3GuidanceMode::naive_so3;
  bad_value(cfg, "optimizer.mode", "unknown mode '" + mode + "'");
}

}  // namespace

Experiment build_experiment(const ConfigData& cfg) {
  Experiment exp;
  const std::string manifold = cfg.get("problem.manifold");
  if (manifold != "euclidean" && manifold != "so3") {
    bad_value(cfg, "problem.manifold", "must be 'euclidean' or 'so3'");
  }
  exp.is_so3 = manifold == "so3";
  const auto seed = static_cast<std::uint64_t>(
      cfg.get_double_or("optimizer.seed", 0.0));

  try {
    if (exp.is_so3) {
      So3GuidanceConfig& oc = exp.so3_config;
      oc.mode = parse_so3_mode(cfg);
      oc.gamma = cfg.get_double("optimizer.gamma");
      oc.alpha = cfg.get_double_or("optimizer.alpha", 1.0);
      oc.n_steps = cfg.get_int("optimizer.n_steps");
      oc.n_controls = cfg.has("optimizer.n_controls")
                          ? cfg.get_int("optimizer.n_controls")
                          : oc.n_steps;
      oc.max_iters = cfg.get_int("optimizer.max_iters");
      oc.fd_step = cfg.get_double_or("optimizer.fd_step", 1e-5);
      oc.early_stop = cfg.get_bool_or("optimizer.early_stop", false);
      oc.validate();

      exp.so3_field = build_so3_field(cfg);
      const std::string x0 = cfg.get_or("problem.x0", "identity");
      if (x0 == "identity") {
        exp.so3_x0 = so3::Mat3::Identity();
      } else if (x0 == "random") {
        Rng rng(seed);
        exp.so3_x0 = rng.random_rotation();
      } else {
        exp.so3_x0 = get_rotation(cfg, "problem.x0");
      }

      const std::string reward = cfg.get("problem.reward.variant");
      if (reward == "composite_prior") {
        const double lambda = cfg.get_double("problem.reward.lambda");
        const So3Trajectory prior = integrate_so3(
            *exp.so3_field, zero_so3_controls(1, oc.n_steps), exp.so3_x0,
            TimeGrid(oc.n_steps));
        exp.so3_reward = std::make_unique<So3CompositePrior>(
            build_base_so3_reward(cfg, "problem.reward.base"), lambda,
            prior.states.back());
      } else {
        exp.so3_reward = build_base_so3_reward(cfg, "problem.reward");
      }
    } else {
      const int dim = cfg.get_int("problem.dim");
      if (dim <= 0) bad_value(cfg, "problem.dim", "must be positive");

      GuidanceConfig& oc = exp.config;
      oc.mode = parse_mode(cfg);
      oc.alpha = cfg.get_double_or("optimizer.alpha", 1.0);
      if (cfg.has("optimizer.gamma") && !cfg.has("optimizer.beta")) {
        const double gamma = cfg.get_double("optimizer.gamma");
        if (gamma <= 0.0) bad_value(cfg, "optimizer.gamma", "must be positive");
        oc.beta = gamma / (1.0 + gamma);
        oc.eta = oc.alpha / (1.0 + gamma);
      } else {
        oc.beta = cfg.get_double_or("optimizer.beta", 0.5);
        oc.eta = cfg.get_double_or("optimizer.eta", 0.1);
      }
      oc.n_steps = cfg.get_int("optimizer.n_steps");
      oc.n_controls = cfg.has("optimizer.n_controls")
                          ? cfg.get_int("optimizer.n_controls")
                          : (oc.mode == GuidanceMode::dflow ? 1 : oc.n_steps);
      oc.max_iters = cfg.get_int("optimizer.max_iters");
      oc.dflow_step = cfg.get_double_or("optimizer.dflow_step", 1.0);
      oc.fd_step = cfg.get_double_or("optimizer.fd_step", 1e-5);
      oc.early_stop = cfg.get_bool_or("optimizer.early_stop", false);
      oc.validate();

      exp.field = build_euclidean_field(cfg, dim);
      const std::string x0 = cfg.get("problem.x0");
      if (x0 == "random") {
        Rng rng(seed);
        exp.x0 = rng.normal_vector(dim);
      } else {
        exp.x0 = get_vector(cfg, "problem.x0", dim);
      }

      const std::string reward = cfg.get("problem.reward.variant");
      if (reward == "composite_prior") {
        const double lambda = cfg.get_double("problem.reward.lambda");
        const EuclideanTrajectory prior = integrate_euclidean(
            *exp.field, zero_controls(1, dim, oc.n_steps), exp.x0,
            TimeGrid(oc.n_steps));
        exp.reward = std::make_unique<CompositePrior>(
            build_base_reward(cfg, "problem.reward.base", dim), lambda,
            prior.states.back());
      } else {
        exp.reward = build_base_reward(cfg, "problem.reward", dim);
      }
    }
  } catch (const invalid_input_error& e) {
    // Bad parameter values surface as config errors with the file context.
    throw config_error(e.what(), -1, "");
  }

  exp.report_path = cfg.get_or("output.report", "");
  exp.curves_path = cfg.get_or("output.curves", "");
  exp.trajectory_path = cfg.get_or("output.trajectory", "");
  return exp;
}

int execute_run(const std::string& config_path, std::ostream& log) {
  ConfigData cfg;
  Experiment exp;
  try {
    cfg = parse_config_file(config_path);
    exp = build_experiment(cfg);
  } catch (const config_error& e) {
    log << config_path << ": config error: " << e.what() << "\n";
    return 2;
  }

  for (const std::string* p :
       {&exp.report_path, &exp.curves_path, &exp.trajectory_path}) {
    if (p->empty()) continue;
    const std::filesystem::path parent = std::filesystem::path(*p).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
  }

  std::string status;
  double final_j = 0.0;
  int iterations = 0;
  try {
    if (exp.is_so3) {
      const So3GuidanceReport rep = run_guidance_so3(
          *exp.so3_field, exp.so3_x0, *exp.so3_reward, exp.so3_config);
      if (!exp.report_path.empty()) {
        write_report_json(exp.report_path, rep, exp.so3_config.alpha,
                          cfg.values);
      }
      if (!exp.curves_path.empty()) write_curves_csv(exp.curves_path, rep.records);
      if (!exp.trajectory_path.empty() && rep.final_trajectory) {
        write_trajectory_csv(exp.trajectory_path, *rep.final_trajectory,
                             TimeGrid(exp.so3_config.n_steps));
      }
      status = rep.status;
      final_j = rep.records.empty() ? 0.0 : rep.records.back().objective;
      iterations = static_cast<int>(rep.records.size()) - 1;
    } else {
      const GuidanceReport rep =
          run_guidance(*exp.field, exp.x0, *exp.reward, exp.config);
      if (!exp.report_path.empty()) {
        write_report_json(exp.report_path, rep, exp.config.alpha, cfg.values);
      }
      if (!exp.curves_path.empty()) write_curves_csv(exp.curves_path, rep.records);
      if (!exp.trajectory_path.empty() && rep.final_trajectory) {
        write_trajectory_csv(exp.trajectory_path, *rep.final_trajectory,
                             TimeGrid(exp.config.n_steps));
      }
      status = rep.status;
      final_j = rep.records.empty() ? 0.0 : rep.records.back().objective;
      iterations = static_cast<int>(rep.records.size()) - 1;
    }
  } catch (const std::exception& e) {
    log << config_path << ": run failed: " << e.what() << "\n";
    return 3;
  }

  if (!exp.report_path.empty() &&
      !report_self_consistent(read_report_json(exp.report_path))) {
    log << config_path << ": emitted report failed its consistency check\n";
    return 1;
  }
  log << config_path << ": status=" << status << " iterations=" << iterations
      << " final_J=" << final_j << "\n";
  return status == "ok" ? 0 : 3;
}

int execute_sweep(const std::string& config_dir, int jobs, std::ostream& log) {
  namespace fs = std::filesystem;
  std::vector<std::string> configs;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(config_dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") {
      configs.push_back(entry.path().string());
    }
  }
  if (ec) {
    log << "sweep: cannot read directory '" << config_dir << "'\n";
    return 2;
  }
  if (configs.empty()) {
    log << "sweep: no .cfg files in '" << config_dir << "'\n";
    return 2;
  }
  std::sort(configs.begin(), configs.end());

  const int workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<std::ostringstream> logs(configs.size());
  std::vector<int> codes(configs.size(), 0);
  std::atomic<std::size_t> cursor{0};
  auto work = [&]() {
    for (std::size_t i = cursor.fetch_add(1); i < configs.size();
         i = cursor.fetch_add(1)) {
      codes[i] = execute_run(configs[i], logs[i]);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();

  int worst = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    log << logs[i].str();
    worst = std::max(worst, codes[i]);
  }
  log << "sweep: " << configs.size() << " configs, worst exit code " << worst
      << "\n";
  return worst;
}

}  // namespace ocflow
