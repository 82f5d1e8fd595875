#pragma once

#include <string>
#include <vector>

#include "ocflow/errors.hpp"
#include "ocflow/fields.hpp"

namespace ocflow {

/// Uniform grid t_k = k/N on [0, 1].
struct TimeGrid {
  explicit TimeGrid(int n) : n_steps(n) {
    if (n <= 0) throw invalid_input_error("time grid: n_steps must be positive");
  }
  int n_steps;
  double dt() const { return 1.0 / n_steps; }
  double t(int k) const { return static_cast<double>(k) / n_steps; }
};

/// M control elements over N fine steps, each element governing a contiguous
/// block of N/M steps. M must divide N. With M = N this is the ordinary
/// synchronous (one control per step) schedule.
template <class Element>
struct Schedule {
  Schedule(std::vector<Element> elems, int n)
      : elements(std::move(elems)), n_steps(n) {
    if (elements.empty()) {
      throw invalid_input_error("schedule: needs at least one control element");
    }
    if (n_steps <= 0 || n_steps % static_cast<int>(elements.size()) != 0) {
      throw invalid_input_error(
          "schedule: control count must divide the step count");
    }
  }

  std::vector<Element> elements;
  int n_steps;

  int size() const { return static_cast<int>(elements.size()); }
  int async_factor() const { return n_steps / size(); }
  int block_of(int step) const { return step / async_factor(); }
  const Element& at_step(int step) const { return elements[block_of(step)]; }
};

using ControlSchedule = Schedule<VectorXd>;
using So3ControlSchedule = Schedule<so3::Mat3>;

ControlSchedule zero_controls(int n_controls, int dim, int n_steps);
So3ControlSchedule zero_so3_controls(int n_controls, int n_steps);

struct EuclideanTrajectory {
  std::vector<VectorXd> states;        // x_0 .. x_N
  std::vector<VectorXd> field_values;  // f(t_k, x_k), k = 0 .. N-1
};

struct So3Trajectory {
  std::vector<so3::Mat3> states;
  std::vector<so3::Mat3> field_values;
  double max_orthogonality_residual = 0.0;
};

/// Euler chain x_{k+1} = x_k + dt f(t_k, x_k) + (dt/async_factor) theta_k.
/// Each block's control element therefore contributes the total displacement
/// dt * theta regardless of the async factor. Throws divergence_error naming
/// the first non-finite step.
EuclideanTrajectory integrate_euclidean(const EuclideanField& field,
                                        const ControlSchedule& control,
                                        const VectorXd& x0,
                                        const TimeGrid& grid);

/// Geometric Euler x_{k+1} = x_k exp(dt (f(t_k, x_k) + theta_k/async_factor)).
/// States stay on the group to machine precision; the worst orthogonality
/// residual is recorded on the trajectory.
So3Trajectory integrate_so3(const So3Field& field,
                            const So3ControlSchedule& control,
                            const so3::Mat3& x0, const TimeGrid& grid);

/// Exact reverse-mode derivative of the discrete Euler map:
///   g_N = terminal_grad,  g_k = g_{k+1} + dt vjp(t_k, x_k, g_{k+1}),
/// so g_k = d Phi(x_N) / d x_k. Memory cost is the stored trajectory plus one
/// co-state vector.
std::vector<VectorXd> backward_grad_chain(const EuclideanField& field,
                                          const EuclideanTrajectory& traj,
                                          const VectorXd& terminal_grad,
                                          const ControlSchedule& control,
                                          const TimeGrid& grid);

struct CostateDiagnostics {
  double terminal_norm = 0.0;
  double max_norm = 0.0;
  /// Accumulated sum_k dt ||T_k||_F of the backward coordinate maps
  /// m_k = (I + dt T_k) m_{k+1}; exponentiating bounds the growth.
  double growth_bound_exponent = 0.0;
  bool bound_ok = true;
};

struct So3CostateResult {
  std::vector<so3::Mat3> values;  // mu_0 .. mu_N, all skew
  CostateDiagnostics diagnostics;
};

/// Backward co-state sweep for the left-trivialized dynamics. Terminal
/// pairing m_{N,i} = <G, x_N E_i> with G the matrix gradient of the terminal
/// objective; backward step
///   m_{k,i} = m_{k+1,i} - dt <mu_{k+1}, [f_k + theta_k, E_i]>
///                       + dt <mu_{k+1}, (df/dx)(x_k E_i)>,
/// where mu = (1/2) sum_i m_i E_i. Coordinates m_{k,i} approximate the
/// derivative of the terminal objective along x_k exp(eps E_i) to O(dt) over
/// the sweep.
So3CostateResult costate_solve_so3(const So3Field& field,
                                   const So3ControlSchedule& control,
                                   const So3Trajectory& traj,
                                   const so3::Mat3& terminal_reward_grad,
                                   const TimeGrid& grid);

/// Block means (1/async_factor) sum over the block of the post-step co-states
/// g_{k+1}: the gradient of the terminal objective with respect to a block
/// control element is dt times this mean.
std::vector<VectorXd> aggregate_costates(const std::vector<VectorXd>& costates,
                                         const ControlSchedule& control);
std::vector<so3::Mat3> aggregate_costates_so3(
    const std::vector<so3::Mat3>& costates, const So3ControlSchedule& control);

void write_trajectory_csv(const std::string& path,
                          const EuclideanTrajectory& traj,
                          const TimeGrid& grid);
void write_trajectory_csv(const std::string& path, const So3Trajectory& traj,
                          const TimeGrid& grid);

}  // namespace ocflow
