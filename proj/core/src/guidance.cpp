#include "ocflow/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ocflow/errors.hpp"

namespace ocflow {

namespace {

constexpr double kPlateauTol = 1e-6;

void validate_common(double alpha, int n_steps, int n_controls, int max_iters) {
  if (alpha < 0.0) throw invalid_input_error("config: alpha must be >= 0");
  if (n_steps <= 0) throw invalid_input_error("config: n_steps must be positive");
  if (n_controls <= 0 || n_steps % n_controls != 0) {
    throw invalid_input_error("config: n_controls must divide n_steps");
  }
  if (max_iters < 0) throw invalid_input_error("config: max_iters must be >= 0");
}

double change_norm(const ControlSchedule& a, const ControlSchedule& b) {
  double s = 0.0;
  for (int m = 0; m < a.size(); ++m) {
    s += (a.elements[m] - b.elements[m]).squaredNorm();
  }
  return std::sqrt(s);
}

double change_norm_so3(const So3ControlSchedule& a, const So3ControlSchedule& b) {
  double s = 0.0;
  for (int m = 0; m < a.size(); ++m) {
    s += (a.elements[m] - b.elements[m]).squaredNorm();
  }
  return std::sqrt(s);
}

/// First record index after which every J change stays below kPlateauTol;
/// -1 when the final change was still large (no plateau reached).
template <class Records>
int compute_plateau(const Records& r) {
  const int k = static_cast<int>(r.size()) - 1;
  int last_big = -1;
  for (int j = 0; j < k; ++j) {
    if (std::abs(r[j + 1].objective - r[j].objective) >= kPlateauTol) {
      last_big = j;
    }
  }
  if (k > 0 && last_big == k - 1) return -1;
  return last_big + 1;
}

template <class Report>
void finalize(Report& rep) {
  // A run that died before its first record has no best; keep the summary
  // finite so it serializes cleanly.
  rep.best_objective = 0.0;
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    const double j = rep.records[i].objective;
    rep.best_objective = i == 0 ? j : std::max(rep.best_objective, j);
  }
  rep.plateau_iteration = compute_plateau(rep.records);
}

}  // namespace

void GuidanceConfig::validate() const {
  validate_common(alpha, n_steps, n_controls, max_iters);
  switch (mode) {
    case GuidanceMode::ocflow:
      if (!(beta > 0.0 && beta < 1.0)) {
        throw invalid_input_error("config: ocflow requires beta in (0, 1)");
      }
      if (eta <= 0.0) throw invalid_input_error("config: eta must be positive");
      break;
    case GuidanceMode::flowgrad:
      if (beta != 1.0) {
        throw invalid_input_error("config: flowgrad requires beta = 1");
      }
      if (eta <= 0.0) throw invalid_input_error("config: eta must be positive");
      break;
    case GuidanceMode::dflow:
      if (n_controls != 1) {
        throw invalid_input_error("config: dflow requires n_controls = 1");
      }
      if (dflow_step <= 0.0) {
        throw invalid_input_error("config: dflow_step must be positive");
      }
      break;
    case GuidanceMode::naive:
      if (!(beta > 0.0 && beta <= 1.0)) {
        throw invalid_input_error("config: naive requires beta in (0, 1]");
      }
      if (eta <= 0.0) throw invalid_input_error("config: eta must be positive");
      if (fd_step <= 0.0) {
        throw invalid_input_error("config: fd_step must be positive");
      }
      break;
  }
  if (early_stop && early_stop_tol <= 0.0) {
    throw invalid_input_error("config: early_stop_tol must be positive");
  }
}

void So3GuidanceConfig::validate() const {
  validate_common(alpha, n_steps, n_controls, max_iters);
  if (gamma <= 0.0) throw invalid_input_error("config: gamma must be positive");
  if (mode == So3GuidanceMode::naive_so3 && fd_step <= 0.0) {
    throw invalid_input_error("config: fd_step must be positive");
  }
  if (early_stop && early_stop_tol <= 0.0) {
    throw invalid_input_error("config: early_stop_tol must be positive");
  }
}

ControlSchedule update_control(const ControlSchedule& theta,
                               const std::vector<VectorXd>& block_costates,
                               const GuidanceConfig& cfg) {
  if (block_costates.size() != theta.elements.size()) {
    throw invalid_input_error("update: co-state block count mismatch");
  }
  std::vector<VectorXd> next(theta.elements.size());
  for (std::size_t m = 0; m < next.size(); ++m) {
    if (block_costates[m].size() != theta.elements[m].size()) {
      throw invalid_input_error("update: co-state dimension mismatch");
    }
    next[m] = cfg.beta * theta.elements[m] + cfg.eta * block_costates[m];
  }
  return ControlSchedule(std::move(next), theta.n_steps);
}

So3ControlSchedule update_control_so3(
    const So3ControlSchedule& theta,
    const std::vector<so3::Mat3>& block_costates,
    const So3GuidanceConfig& cfg) {
  if (block_costates.size() != theta.elements.size()) {
    throw invalid_input_error("update: co-state block count mismatch");
  }
  std::vector<so3::Mat3> next(theta.elements.size());
  for (std::size_t m = 0; m < next.size(); ++m) {
    next[m] = cfg.beta() * theta.elements[m] + cfg.eta() * block_costates[m];
  }
  return So3ControlSchedule(std::move(next), theta.n_steps);
}

double epsilon_k(const So3ControlSchedule& prev, const So3ControlSchedule& next,
                 const std::vector<so3::Mat3>& block_costates,
                 const TimeGrid& grid) {
  if (prev.n_steps != grid.n_steps || next.n_steps != grid.n_steps ||
      prev.size() != next.size() ||
      block_costates.size() != prev.elements.size()) {
    throw invalid_input_error("epsilon_k: schedule shapes disagree");
  }
  std::vector<double> dh(prev.size());
  for (int m = 0; m < prev.size(); ++m) {
    dh[m] = so3::inner(block_costates[m],
                       so3::Mat3(next.elements[m] - prev.elements[m])) -
            0.5 * next.elements[m].squaredNorm() +
            0.5 * prev.elements[m].squaredNorm();
  }
  const int n = grid.n_steps;
  const double dt = grid.dt();
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 0.5 * dt : dt;
    sum += w * dh[prev.block_of(std::min(k, n - 1))];
  }
  return sum;
}

namespace {

GuidanceReport run_dflow(const EuclideanField& field, const VectorXd& x0,
                         const Reward& reward, const GuidanceConfig& cfg) {
  const TimeGrid grid(cfg.n_steps);
  const double dt = grid.dt();
  const int d = field.dim();
  const ControlSchedule zero = zero_controls(1, d, cfg.n_steps);

  GuidanceReport rep;
  VectorXd start = x0;
  rep.x0_history.push_back(start);

  // The single control element implied by a start shift delta is delta / dt
  // (applied at step 0), so the running cost is ||delta||^2 / (2 dt).
  auto implied_cost = [&](const VectorXd& s) {
    return 0.5 * (s - x0).squaredNorm() / dt;
  };
  auto record = [&](int iter, const EuclideanTrajectory& traj, double change) {
    IterationRecord r;
    r.iter = iter;
    r.terminal_reward = reward.value(traj.states.back());
    r.running_cost = implied_cost(start);
    r.objective = cfg.alpha * r.terminal_reward - r.running_cost;
    r.control_change_norm = change;
    rep.records.push_back(r);
  };

  try {
    EuclideanTrajectory traj = integrate_euclidean(field, zero, start, grid);
    record(0, traj, 0.0);
    for (int k = 1; k <= cfg.max_iters; ++k) {
      const std::vector<VectorXd> chain = backward_grad_chain(
          field, traj, reward.gradient(traj.states.back()), zero, grid);
      const VectorXd g = cfg.alpha * chain.front();
      const double f0 = cfg.alpha * reward.value(traj.states.back());

      // Backtracking ascent on alpha Phi(x_N(start)); a failed search keeps
      // the iterate (recorded as a stall).
      VectorXd accepted = start;
      EuclideanTrajectory accepted_traj = traj;
      double step = cfg.dflow_step;
      for (int h = 0; h <= 20; ++h) {
        const VectorXd candidate = start + step * g;
        EuclideanTrajectory cand_traj =
            integrate_euclidean(field, zero, candidate, grid);
        const double f = cfg.alpha * reward.value(cand_traj.states.back());
        if (f >= f0 + 0.5 * step * g.squaredNorm()) {
          accepted = candidate;
          accepted_traj = std::move(cand_traj);
          break;
        }
        step *= 0.5;
      }
      const double change = (accepted - start).norm() / dt;
      start = accepted;
      traj = std::move(accepted_traj);
      rep.x0_history.push_back(start);
      record(k, traj, change);
      if (cfg.early_stop && change < cfg.early_stop_tol) break;
    }
    rep.final_control = ControlSchedule({VectorXd((start - x0) / dt)},
                                        cfg.n_steps);
    rep.final_trajectory = std::move(traj);
  } catch (const divergence_error& e) {
    rep.status = "diverged";
    rep.detail = e.what();
  }
  finalize(rep);
  return rep;
}

/// Central differences of alpha Phi(x_N) over every control coordinate,
/// re-integrating per probe.
std::vector<VectorXd> naive_gradient(const EuclideanField& field,
                                     const VectorXd& x0, const Reward& reward,
                                     const GuidanceConfig& cfg,
                                     const ControlSchedule& theta,
                                     const TimeGrid& grid) {
  ControlSchedule probe = theta;
  auto value = [&]() {
    const EuclideanTrajectory t = integrate_euclidean(field, probe, x0, grid);
    return cfg.alpha * reward.value(t.states.back());
  };
  std::vector<VectorXd> g(theta.elements.size());
  for (std::size_t m = 0; m < g.size(); ++m) {
    g[m] = VectorXd::Zero(theta.elements[m].size());
    for (Eigen::Index i = 0; i < g[m].size(); ++i) {
      const double saved = probe.elements[m][i];
      probe.elements[m][i] = saved + cfg.fd_step;
      const double hi = value();
      probe.elements[m][i] = saved - cfg.fd_step;
      const double lo = value();
      probe.elements[m][i] = saved;
      g[m][i] = (hi - lo) / (2.0 * cfg.fd_step);
    }
  }
  return g;
}

}  // namespace

GuidanceReport run_guidance(const EuclideanField& field, const VectorXd& x0,
                            const Reward& reward, const GuidanceConfig& cfg) {
  cfg.validate();
  if (x0.size() != field.dim() || reward.dim() != field.dim()) {
    throw invalid_input_error("guidance: field, x0 and reward dimensions differ");
  }
  if (cfg.mode == GuidanceMode::dflow) {
    return run_dflow(field, x0, reward, cfg);
  }

  const TimeGrid grid(cfg.n_steps);
  ControlSchedule theta = zero_controls(cfg.n_controls, field.dim(), cfg.n_steps);

  GuidanceReport rep;
  auto record = [&](int iter, const EuclideanTrajectory& traj, double change) {
    IterationRecord r;
    r.iter = iter;
    r.terminal_reward = reward.value(traj.states.back());
    r.running_cost = running_cost(theta, grid);
    r.objective = cfg.alpha * r.terminal_reward - r.running_cost;
    r.control_change_norm = change;
    rep.records.push_back(r);
    if (cfg.record_controls) rep.control_history.push_back(theta.elements);
  };

  try {
    EuclideanTrajectory traj = integrate_euclidean(field, theta, x0, grid);
    record(0, traj, 0.0);
    for (int k = 1; k <= cfg.max_iters; ++k) {
      std::vector<VectorXd> grad_blocks;
      if (cfg.mode == GuidanceMode::naive) {
        grad_blocks = naive_gradient(field, x0, reward, cfg, theta, grid);
      } else {
        const std::vector<VectorXd> chain = backward_grad_chain(
            field, traj, reward.gradient(traj.states.back()), theta, grid);
        grad_blocks = aggregate_costates(chain, theta);
      }
      ControlSchedule next = update_control(theta, grad_blocks, cfg);
      const double change = change_norm(theta, next);
      theta = std::move(next);
      traj = integrate_euclidean(field, theta, x0, grid);
      record(k, traj, change);
      if (cfg.early_stop && change < cfg.early_stop_tol) break;
    }
    rep.final_trajectory = std::move(traj);
  } catch (const divergence_error& e) {
    rep.status = "diverged";
    rep.detail = e.what();
  }
  rep.final_control = std::move(theta);
  finalize(rep);
  return rep;
}

namespace {

std::vector<so3::Mat3> naive_gradient_so3(const So3Field& field,
                                          const so3::Mat3& x0,
                                          const So3Reward& reward,
                                          const So3GuidanceConfig& cfg,
                                          const So3ControlSchedule& theta,
                                          const TimeGrid& grid) {
  So3ControlSchedule probe = theta;
  auto value = [&]() {
    const So3Trajectory t = integrate_so3(field, probe, x0, grid);
    return cfg.alpha * reward.value(t.states.back());
  };
  std::vector<so3::Mat3> g(theta.elements.size());
  for (std::size_t m = 0; m < g.size(); ++m) {
    so3::Vec3 coords;
    for (int i = 0; i < 3; ++i) {
      const so3::Mat3 saved = probe.elements[m];
      probe.elements[m] = saved + cfg.fd_step * so3::basis(i);
      const double hi = value();
      probe.elements[m] = saved - cfg.fd_step * so3::basis(i);
      const double lo = value();
      probe.elements[m] = saved;
      coords[i] = (hi - lo) / (2.0 * cfg.fd_step);
    }
    g[m] = so3::hat(coords);
  }
  return g;
}

}  // namespace

So3GuidanceReport run_guidance_so3(const So3Field& field, const so3::Mat3& x0,
                                   const So3Reward& reward,
                                   const So3GuidanceConfig& cfg) {
  cfg.validate();
  const TimeGrid grid(cfg.n_steps);
  const bool adjoint_mode = cfg.mode == So3GuidanceMode::ocflow_so3;
  So3ControlSchedule theta = zero_so3_controls(cfg.n_controls, cfg.n_steps);

  So3GuidanceReport rep;
  auto record = [&](int iter, const So3Trajectory& traj, double change,
                    double eps) {
    IterationRecord r;
    r.iter = iter;
    r.terminal_reward = reward.value(traj.states.back());
    r.running_cost = running_cost(theta, grid);
    r.objective = cfg.alpha * r.terminal_reward - r.running_cost;
    r.control_change_norm = change;
    r.eps_k = eps;
    rep.records.push_back(r);
    rep.max_orthogonality_residual = std::max(
        rep.max_orthogonality_residual, traj.max_orthogonality_residual);
    if (cfg.record_controls) rep.control_history.push_back(theta.elements);
  };
  auto hamiltonian_values = [&](const So3Trajectory& traj,
                                const std::vector<so3::Mat3>& mu) {
    std::vector<double> h(grid.n_steps);
    const double af = theta.async_factor();
    for (int k = 0; k < grid.n_steps; ++k) {
      const so3::Mat3 eff = theta.at_step(k) / af;
      h[k] = hamiltonian_so3(mu[k + 1],
                             so3::Mat3(traj.field_values[k] + eff), eff);
    }
    return h;
  };

  try {
    So3Trajectory traj = integrate_so3(field, theta, x0, grid);
    So3CostateResult costates;
    if (adjoint_mode) {
      const so3::Mat3 seed =
          cfg.alpha * reward.gradient(traj.states.back());
      costates = costate_solve_so3(field, theta, traj, seed, grid);
      rep.costate_bound_ok =
          rep.costate_bound_ok && costates.diagnostics.bound_ok;
      HamiltonianRecord h;
      h.iter = 0;
      h.h_values = hamiltonian_values(traj, costates.values);
      h.objective = cfg.alpha * reward.value(traj.states.back()) -
                    running_cost(theta, grid);
      rep.hamiltonian_records.push_back(std::move(h));
    }
    record(0, traj, 0.0, 0.0);

    for (int k = 1; k <= cfg.max_iters; ++k) {
      So3ControlSchedule next = theta;
      double eps = 0.0;
      std::vector<double> delta_h_tilde;
      if (adjoint_mode) {
        const std::vector<so3::Mat3> mu_blocks =
            aggregate_costates_so3(costates.values, theta);
        next = update_control_so3(theta, mu_blocks, cfg);
        eps = epsilon_k(theta, next, mu_blocks, grid);
        delta_h_tilde.resize(theta.elements.size());
        for (std::size_t m = 0; m < delta_h_tilde.size(); ++m) {
          const so3::Mat3& told = theta.elements[m];
          const so3::Mat3& tnew = next.elements[m];
          const so3::Mat3 residual =
              mu_blocks[m] - tnew - cfg.gamma * (tnew - told);
          rep.max_update_residual =
              std::max(rep.max_update_residual, residual.norm());
          delta_h_tilde[m] =
              so3::inner(mu_blocks[m], so3::Mat3(tnew - told)) -
              0.5 * tnew.squaredNorm() + 0.5 * told.squaredNorm() -
              0.5 * cfg.gamma * (tnew - told).squaredNorm();
        }
      } else {
        const std::vector<so3::Mat3> fd_blocks =
            naive_gradient_so3(field, x0, reward, cfg, theta, grid);
        std::vector<so3::Mat3> updated(theta.elements.size());
        for (std::size_t m = 0; m < updated.size(); ++m) {
          updated[m] =
              cfg.beta() * theta.elements[m] + cfg.eta() * fd_blocks[m];
        }
        next = So3ControlSchedule(std::move(updated), cfg.n_steps);
      }
      const double change = change_norm_so3(theta, next);
      theta = std::move(next);
      traj = integrate_so3(field, theta, x0, grid);
      if (adjoint_mode) {
        const so3::Mat3 seed =
            cfg.alpha * reward.gradient(traj.states.back());
        costates = costate_solve_so3(field, theta, traj, seed, grid);
        rep.costate_bound_ok =
            rep.costate_bound_ok && costates.diagnostics.bound_ok;
        HamiltonianRecord h;
        h.iter = k;
        h.h_values = hamiltonian_values(traj, costates.values);
        h.delta_h_tilde = std::move(delta_h_tilde);
        h.eps_k = eps;
        h.objective = cfg.alpha * reward.value(traj.states.back()) -
                      running_cost(theta, grid);
        rep.hamiltonian_records.push_back(std::move(h));
      }
      record(k, traj, change, eps);
      if (cfg.early_stop && change < cfg.early_stop_tol) break;
    }
    rep.final_trajectory = std::move(traj);
  } catch (const divergence_error& e) {
    rep.status = "diverged";
    rep.detail = e.what();
  } catch (const near_antipodal_error& e) {
    rep.status = "diverged";
    rep.detail = e.what();
  }
  rep.final_control = std::move(theta);
  finalize(rep);
  return rep;
}

namespace {

template <class Report>
bool ascends(const Report& rep) {
  if (rep.status != "ok") return false;
  for (std::size_t i = 1; i < rep.records.size(); ++i) {
    if (rep.records[i].objective < rep.records[i - 1].objective - 1e-10) {
      return false;
    }
  }
  return true;
}

}  // namespace

GuidanceConfig calibrate_gamma(const EuclideanField& field, const VectorXd& x0,
                               const Reward& reward, GuidanceConfig base,
                               int max_doublings) {
  double gamma = 1.0;
  for (int i = 0; i <= max_doublings; ++i) {
    GuidanceConfig c = base;
    c.beta = gamma / (1.0 + gamma);
    c.eta = base.alpha / (1.0 + gamma);
    if (ascends(run_guidance(field, x0, reward, c))) return c;
    gamma *= 2.0;
  }
  throw degenerate_problem_error(
      "gamma calibration: no monotone setting found within the doubling cap");
}

So3GuidanceConfig calibrate_gamma_so3(const So3Field& field,
                                      const so3::Mat3& x0,
                                      const So3Reward& reward,
                                      So3GuidanceConfig base,
                                      int max_doublings) {
  double gamma = std::max(1.0, base.gamma);
  for (int i = 0; i <= max_doublings; ++i) {
    So3GuidanceConfig c = base;
    c.gamma = gamma;
    if (ascends(run_guidance_so3(field, x0, reward, c))) return c;
    gamma *= 2.0;
  }
  throw degenerate_problem_error(
      "gamma calibration: no monotone setting found within the doubling cap");
}

}  // namespace ocflow
