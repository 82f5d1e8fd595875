#pragma once

#include <functional>
#include <vector>

#include "ocflow/rewards.hpp"

namespace ocflow {

/// Central differences per coordinate, step 1e-5 by default.
VectorXd finite_diff_gradient(const std::function<double(const VectorXd&)>& f,
                              const VectorXd& x, double step = 1e-5);

/// Derivatives along the group directions x exp(+-eps E_i): the quantity the
/// SO(3) co-state coordinates approximate.
so3::Vec3 finite_diff_rotation_gradient(
    const std::function<double(const so3::Mat3&)>& f, const so3::Mat3& x,
    double step = 1e-5);

/// Central differences over the 9 matrix entries, treated freely.
so3::Mat3 finite_diff_matrix_gradient(
    const std::function<double(const so3::Mat3&)>& f, const so3::Mat3& x,
    double step = 1e-5);

/// Stationary control for the scalar problem x' = a x + theta, reward
/// -(x - target)^2 scaled by alpha, discretized by Euler with a synchronous
/// schedule. Solves the exact first-order conditions of the discrete
/// objective.
struct LqSolution {
  std::vector<double> theta;  // per-step profile, length n_steps
  double terminal;
  double objective;
};

LqSolution lq_closed_form(double a, double x0, double target, double alpha,
                          int n_steps);

/// Grid search over constant controls: one element repeated across all
/// blocks. Bounds are per searched coefficient; every refinement round keeps
/// the incumbent (the center of the shrunk window), so the per-round best is
/// nondecreasing by construction. Ties resolve to the lexicographically
/// smallest coefficient vector.
struct BruteForceSpec {
  VectorXd lower;
  VectorXd upper;
  int points_per_round = 21;
  int refine_rounds = 4;  // span shrinks 10x per round
};

struct BruteForceResult {
  VectorXd coefficients;
  double objective;
  std::vector<double> round_best;
};

/// Coefficients are the entries of the constant Euclidean control element.
BruteForceResult brute_force_constant_control(const EuclideanProblem& p,
                                              int n_controls,
                                              const BruteForceSpec& spec);

/// Coefficients weight fixed so(3) axes: theta = hat(sum_i c_i axis_i).
BruteForceResult brute_force_constant_control_so3(
    const So3Problem& p, int n_controls, const std::vector<so3::Vec3>& axes,
    const BruteForceSpec& spec);

}  // namespace ocflow
