#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ocflow/oracles.hpp"
#include "ocflow/rewards.hpp"

namespace ocflow {

enum class GuidanceMode { ocflow, flowgrad, dflow, naive };
enum class So3GuidanceMode { ocflow_so3, naive_so3 };

/// Settings for the Euclidean control optimizer. The update per iteration is
/// theta_m <- beta theta_m + eta g_m with g_m the block-aggregated co-state;
/// beta encodes the proximal weight via gamma = beta / (1 - beta), and the
/// fixed point theta = (eta / (1 - beta)) g is the stationary control of
/// J = alpha Phi - running cost when eta = alpha / (1 + gamma).
struct GuidanceConfig {
  double eta = 0.1;
  double beta = 0.5;
  double alpha = 1.0;
  int n_steps = 100;
  int n_controls = 100;
  int max_iters = 10;
  GuidanceMode mode = GuidanceMode::ocflow;
  double dflow_step = 1.0;   // initial backtracking step for dflow mode
  double fd_step = 1e-5;     // probe step for naive mode
  bool early_stop = false;
  double early_stop_tol = 1e-10;
  bool record_controls = false;

  double gamma() const { return beta / (1.0 - beta); }
  void validate() const;
};

/// SO(3) optimizer settings; beta and eta both derive from gamma so the
/// update stays the exact argmax of the proximally penalized Hamiltonian
/// (beta + eta = 1).
struct So3GuidanceConfig {
  double gamma = 1.0;
  double alpha = 1.0;
  int n_steps = 100;
  int n_controls = 100;
  int max_iters = 10;
  So3GuidanceMode mode = So3GuidanceMode::ocflow_so3;
  double fd_step = 1e-5;
  bool early_stop = false;
  double early_stop_tol = 1e-10;
  bool record_controls = false;

  double beta() const { return gamma / (1.0 + gamma); }
  double eta() const { return 1.0 / (1.0 + gamma); }
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double terminal_reward = 0.0;  // Phi(x_N), unscaled
  double running_cost = 0.0;
  double control_change_norm = 0.0;
  double eps_k = 0.0;
};

struct GuidanceReport {
  std::vector<IterationRecord> records;
  std::string status = "ok";  // "ok" or "diverged"
  std::string detail;
  double best_objective = 0.0;
  /// First iteration after which every J change stays below 1e-6; -1 when
  /// the last change was still larger.
  int plateau_iteration = -1;
  std::optional<ControlSchedule> final_control;
  std::optional<EuclideanTrajectory> final_trajectory;
  std::vector<std::vector<VectorXd>> control_history;  // record_controls only
  std::vector<VectorXd> x0_history;                    // dflow mode only
};

struct HamiltonianRecord {
  int iter = 0;
  std::vector<double> h_values;       // H per fine step at this iterate
  std::vector<double> delta_h_tilde;  // per block for the producing update
  double eps_k = 0.0;
  double objective = 0.0;
};

struct So3GuidanceReport {
  std::vector<IterationRecord> records;
  std::vector<HamiltonianRecord> hamiltonian_records;
  std::string status = "ok";
  std::string detail;
  double best_objective = 0.0;
  int plateau_iteration = -1;
  std::optional<So3ControlSchedule> final_control;
  std::optional<So3Trajectory> final_trajectory;
  double max_orthogonality_residual = 0.0;
  bool costate_bound_ok = true;
  /// Worst first-order-condition residual mu - theta' - gamma (theta' -
  /// theta) over all updates; zero in exact arithmetic.
  double max_update_residual = 0.0;
  std::vector<std::vector<so3::Mat3>> control_history;
};

/// theta_m <- beta theta_m + eta g_m.
ControlSchedule update_control(const ControlSchedule& theta,
                               const std::vector<VectorXd>& block_costates,
                               const GuidanceConfig& cfg);
So3ControlSchedule update_control_so3(const So3ControlSchedule& theta,
                                      const std::vector<so3::Mat3>& block_costates,
                                      const So3GuidanceConfig& cfg);

/// Integrated Hamiltonian gain of an update, trapezoid over the state grid:
/// Delta H(t) = <mu, theta' - theta> - 1/2 ||theta'||^2 + 1/2 ||theta||^2
/// with block-piecewise values. Nonnegative after update_control_so3.
double epsilon_k(const So3ControlSchedule& prev, const So3ControlSchedule& next,
                 const std::vector<so3::Mat3>& block_costates,
                 const TimeGrid& grid);

GuidanceReport run_guidance(const EuclideanField& field, const VectorXd& x0,
                            const Reward& reward, const GuidanceConfig& cfg);
So3GuidanceReport run_guidance_so3(const So3Field& field, const so3::Mat3& x0,
                                   const So3Reward& reward,
                                   const So3GuidanceConfig& cfg);

/// Doubles gamma (starting at the configured beta's gamma, at least 1) until
/// a probe run of max_iters iterations ascends within 1e-10 per step,
/// re-deriving beta (and eta = alpha / (1 + gamma) for the Euclidean case)
/// each time. Throws degenerate_problem_error when the cap is exhausted.
GuidanceConfig calibrate_gamma(const EuclideanField& field, const VectorXd& x0,
                               const Reward& reward, GuidanceConfig base,
                               int max_doublings = 60);
So3GuidanceConfig calibrate_gamma_so3(const So3Field& field,
                                      const so3::Mat3& x0,
                                      const So3Reward& reward,
                                      So3GuidanceConfig base,
                                      int max_doublings = 60);

}  // namespace ocflow
