#include "ocflow/integrate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace ocflow {

namespace {

void check_grid_match(int schedule_steps, const TimeGrid& grid,
                      const char* where) {
  if (schedule_steps != grid.n_steps) {
    throw invalid_input_error(std::string(where) +
                              ": control schedule and grid disagree on N");
  }
}

void check_traj_match(std::size_t n_states, const TimeGrid& grid,
                      const char* where) {
  if (n_states != static_cast<std::size_t>(grid.n_steps) + 1) {
    throw invalid_input_error(std::string(where) +
                              ": trajectory length does not match grid");
  }
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ControlSchedule zero_controls(int n_controls, int dim, int n_steps) {
  return ControlSchedule(
      std::vector<VectorXd>(n_controls, VectorXd::Zero(dim)), n_steps);
}

So3ControlSchedule zero_so3_controls(int n_controls, int n_steps) {
  return So3ControlSchedule(
      std::vector<so3::Mat3>(n_controls, so3::Mat3::Zero()), n_steps);
}

EuclideanTrajectory integrate_euclidean(const EuclideanField& field,
                                        const ControlSchedule& control,
                                        const VectorXd& x0,
                                        const TimeGrid& grid) {
  check_grid_match(control.n_steps, grid, "integrate");
  const int n = grid.n_steps;
  const double dt = grid.dt();
  const double control_weight = dt / control.async_factor();

  EuclideanTrajectory traj;
  traj.states.reserve(n + 1);
  traj.field_values.reserve(n);
  traj.states.push_back(x0);
  for (int k = 0; k < n; ++k) {
    const VectorXd f = field.eval(grid.t(k), traj.states.back());
    VectorXd next = traj.states.back() + dt * f + control_weight * control.at_step(k);
    if (!next.allFinite()) {
      throw divergence_error(k + 1, "state became non-finite at step " +
                                        std::to_string(k + 1));
    }
    traj.field_values.push_back(f);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

So3Trajectory integrate_so3(const So3Field& field,
                            const So3ControlSchedule& control,
                            const so3::Mat3& x0, const TimeGrid& grid) {
  check_grid_match(control.n_steps, grid, "integrate");
  if (!so3::is_rotation(x0)) {
    throw invalid_input_error("integrate: x0 is not a rotation matrix");
  }
  for (const so3::Mat3& c : control.elements) {
    if (!so3::is_skew(c)) {
      throw invalid_input_error("integrate: control element is not skew");
    }
  }
  const int n = grid.n_steps;
  const double dt = grid.dt();
  const double af = control.async_factor();

  So3Trajectory traj;
  traj.states.reserve(n + 1);
  traj.field_values.reserve(n);
  traj.states.push_back(x0);
  traj.max_orthogonality_residual = so3::orthogonality_residual(x0);
  for (int k = 0; k < n; ++k) {
    const so3::Mat3 f = field.eval(grid.t(k), traj.states.back());
    const so3::Mat3 body = f + control.at_step(k) / af;
    so3::Mat3 next = traj.states.back() * so3::exp(so3::Mat3(dt * body));
    if (!next.allFinite()) {
      throw divergence_error(k + 1, "state became non-finite at step " +
                                        std::to_string(k + 1));
    }
    traj.max_orthogonality_residual = std::max(
        traj.max_orthogonality_residual, so3::orthogonality_residual(next));
    traj.field_values.push_back(f);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

std::vector<VectorXd> backward_grad_chain(const EuclideanField& field,
                                          const EuclideanTrajectory& traj,
                                          const VectorXd& terminal_grad,
                                          const ControlSchedule& control,
                                          const TimeGrid& grid) {
  check_grid_match(control.n_steps, grid, "backward");
  check_traj_match(traj.states.size(), grid, "backward");
  if (terminal_grad.size() != field.dim()) {
    throw invalid_input_error("backward: terminal gradient dimension mismatch");
  }
  const int n = grid.n_steps;
  const double dt = grid.dt();

  std::vector<VectorXd> g(n + 1);
  g[n] = terminal_grad;
  for (int k = n - 1; k >= 0; --k) {
    g[k] = g[k + 1] + dt * field.vjp(grid.t(k), traj.states[k], g[k + 1]);
  }
  return g;
}

So3CostateResult costate_solve_so3(const So3Field& field,
                                   const So3ControlSchedule& control,
                                   const So3Trajectory& traj,
                                   const so3::Mat3& terminal_reward_grad,
                                   const TimeGrid& grid) {
  check_grid_match(control.n_steps, grid, "costate");
  check_traj_match(traj.states.size(), grid, "costate");
  if (traj.field_values.size() != static_cast<std::size_t>(grid.n_steps)) {
    throw invalid_input_error("costate: trajectory is missing field values");
  }
  const int n = grid.n_steps;
  const double dt = grid.dt();
  const double af = control.async_factor();

  So3CostateResult out;
  out.values.resize(n + 1);

  const so3::Mat3& xn = traj.states[n];
  so3::Vec3 m;
  for (int i = 0; i < 3; ++i) {
    m[i] = so3::inner(terminal_reward_grad, so3::Mat3(xn * so3::basis(i)));
  }
  out.values[n] = so3::basis_reconstruct(m);
  out.diagnostics.terminal_norm = out.values[n].norm();
  out.diagnostics.max_norm = out.diagnostics.terminal_norm;

  for (int k = n - 1; k >= 0; --k) {
    const so3::Mat3& mu_next = out.values[k + 1];
    const so3::Mat3 body = traj.field_values[k] + control.at_step(k) / af;
    Eigen::Matrix3d step_map;  // T_k with m_k = (I + dt T_k) m_{k+1}
    so3::Vec3 delta;
    for (int i = 0; i < 3; ++i) {
      const so3::Mat3& ei = so3::basis(i);
      const so3::Mat3 deriv =
          field.dirderiv(grid.t(k), traj.states[k], so3::Mat3(traj.states[k] * ei));
      const so3::Mat3 flow = -so3::bracket(body, ei) + deriv;
      delta[i] = so3::inner(mu_next, flow);
      for (int j = 0; j < 3; ++j) {
        step_map(i, j) = 0.5 * so3::inner(so3::basis(j), flow);
      }
    }
    m += dt * delta;
    out.values[k] = so3::basis_reconstruct(m);
    out.diagnostics.max_norm =
        std::max(out.diagnostics.max_norm, out.values[k].norm());
    out.diagnostics.growth_bound_exponent += dt * step_map.norm();
  }

  const double bound = out.diagnostics.terminal_norm *
                       std::exp(out.diagnostics.growth_bound_exponent);
  out.diagnostics.bound_ok =
      out.diagnostics.max_norm <= bound * (1.0 + 1e-9) + 1e-300;
  return out;
}

namespace {

template <class Element, class Zero>
std::vector<Element> block_means(const std::vector<Element>& costates,
                                 int n_controls, int async_factor,
                                 const Zero& zero) {
  std::vector<Element> out(n_controls, zero);
  for (int m = 0; m < n_controls; ++m) {
    for (int j = 0; j < async_factor; ++j) {
      out[m] += costates[m * async_factor + j + 1];
    }
    out[m] /= static_cast<double>(async_factor);
  }
  return out;
}

}  // namespace

std::vector<VectorXd> aggregate_costates(const std::vector<VectorXd>& costates,
                                         const ControlSchedule& control) {
  if (costates.size() != static_cast<std::size_t>(control.n_steps) + 1) {
    throw invalid_input_error("aggregate: co-state count does not match grid");
  }
  return block_means(costates, control.size(), control.async_factor(),
                     VectorXd(VectorXd::Zero(costates.front().size())));
}

std::vector<so3::Mat3> aggregate_costates_so3(
    const std::vector<so3::Mat3>& costates, const So3ControlSchedule& control) {
  if (costates.size() != static_cast<std::size_t>(control.n_steps) + 1) {
    throw invalid_input_error("aggregate: co-state count does not match grid");
  }
  return block_means(costates, control.size(), control.async_factor(),
                     so3::Mat3(so3::Mat3::Zero()));
}

void write_trajectory_csv(const std::string& path,
                          const EuclideanTrajectory& traj,
                          const TimeGrid& grid) {
  std::ofstream out(path);
  if (!out) throw invalid_input_error("trajectory: cannot open '" + path + "'");
  const int d = static_cast<int>(traj.states.front().size());
  out << "step,t";
  for (int i = 0; i < d; ++i) out << ",x" << i;
  out << "\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out << k << "," << fmt17(grid.t(static_cast<int>(k)));
    for (int i = 0; i < d; ++i) out << "," << fmt17(traj.states[k][i]);
    out << "\n";
  }
}

void write_trajectory_csv(const std::string& path, const So3Trajectory& traj,
                          const TimeGrid& grid) {
  std::ofstream out(path);
  if (!out) throw invalid_input_error("trajectory: cannot open '" + path + "'");
  out << "step,t";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out << ",r" << r << c;
  out << "\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out << k << "," << fmt17(grid.t(static_cast<int>(k)));
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out << "," << fmt17(traj.states[k](r, c));
    out << "\n";
  }
}

}  // namespace ocflow
