#pragma once

#include <string>
#include <vector>

namespace ocflow {

/// Outcome of one behavioral check. observed is the worst measured quantity
/// and tolerance the threshold it was held against; detail says where the
/// worst case occurred.
struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct CheckOptions {
  /// Corrupts one VJP component inside the gradient checks. Used to confirm
  /// that the checks actually detect a broken backward pass.
  bool inject_vjp_fault = false;
};

/// Objective never drops by more than 1e-10 across seeded Euclidean runs
/// with a calibrated proximal weight.
CheckResult check_monotone_ascent();

/// Same ascent guarantee on rotation steering problems, plus decay of the
/// integrated Hamiltonian gain to < 1e-6 by the final iteration.
CheckResult check_monotone_ascent_rotations();

/// The optimizer reaches the closed-form linear-quadratic optimum
/// (J* = -0.25, constant control 0.5) within 1e-4.
CheckResult check_lq_optimum();

/// Rotation steering reaches the brute-force optimum (J* = -0.32) within
/// 2e-3.
CheckResult check_rotation_steering_optimum();

/// Half the integrated squared control never falls below sigma1^2 times the
/// path KL divergence on randomized cases; equality is flagged exactly for
/// constant schedules.
CheckResult check_kl_running_cost_bound();

/// Backward gradient chain matches finite differences through the full
/// integrator (Euclidean, four field variants), and the rotation co-state
/// pairing matches finite differences at selected steps.
CheckResult check_adjoint_gradients(const CheckOptions& opts = {});

/// Terminal error shrinks at first order in the step size on smooth
/// Euclidean and rotation problems (fitted slope within [0.8, 1.2]).
CheckResult check_integration_order();

/// flowgrad mode reproduces the proximal optimizer with beta = 1 exactly,
/// and dflow mode reproduces an independent start-point ascent reference.
CheckResult check_mode_equivalences();

/// The adjoint-based rotation optimizer beats the finite-difference baseline
/// on at least 9 of 10 seeded instances at an equal iteration budget.
CheckResult check_baseline_comparison();

/// Rotation-geometry invariants: hat/vee, basis normalization and brackets,
/// completeness, exp/log round trips, orthogonality, distance invariance.
CheckResult check_rotation_geometry();

/// Named bundles: geometry, gradients, bounds, convergence, baselines, all.
std::vector<std::string> check_suite_names();
std::vector<CheckResult> run_check_suite(const std::string& suite,
                                         const CheckOptions& opts = {});

}  // namespace ocflow
