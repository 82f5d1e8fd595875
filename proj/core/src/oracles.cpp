#include "ocflow/oracles.hpp"

#include <cmath>
#include <limits>

#include "ocflow/errors.hpp"

namespace ocflow {

VectorXd finite_diff_gradient(const std::function<double(const VectorXd&)>& f,
                              const VectorXd& x, double step) {
  VectorXd g(x.size());
  VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double hi = f(probe);
    probe[i] = x[i] - step;
    const double lo = f(probe);
    probe[i] = x[i];
    g[i] = (hi - lo) / (2.0 * step);
  }
  return g;
}

so3::Vec3 finite_diff_rotation_gradient(
    const std::function<double(const so3::Mat3&)>& f, const so3::Mat3& x,
    double step) {
  so3::Vec3 g;
  for (int i = 0; i < 3; ++i) {
    const so3::Mat3 bump = so3::exp(so3::Vec3(step * so3::Vec3::Unit(i)));
    const double hi = f(x * bump);
    const double lo = f(x * bump.transpose());
    g[i] = (hi - lo) / (2.0 * step);
  }
  return g;
}

so3::Mat3 finite_diff_matrix_gradient(
    const std::function<double(const so3::Mat3&)>& f, const so3::Mat3& x,
    double step) {
  so3::Mat3 g;
  so3::Mat3 probe = x;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      probe(r, c) = x(r, c) + step;
      const double hi = f(probe);
      probe(r, c) = x(r, c) - step;
      const double lo = f(probe);
      probe(r, c) = x(r, c);
      g(r, c) = (hi - lo) / (2.0 * step);
    }
  }
  return g;
}

LqSolution lq_closed_form(double a, double x0, double target, double alpha,
                          int n_steps) {
  if (n_steps <= 0) {
    throw invalid_input_error("lq oracle: n_steps must be positive");
  }
  const double dt = 1.0 / n_steps;
  const double growth = 1.0 + a * dt;

  // x_N = x0 P + dt sum_k rho_k theta_k with rho_k = growth^(N-1-k).
  // Stationarity of alpha * -(x_N - target)^2 - dt/2 sum theta^2 gives
  // theta_k = 2 alpha (target - x_N) rho_k, and substituting back
  // x_N = (x0 P + 2 alpha S target) / (1 + 2 alpha S), S = dt sum rho_k^2.
  std::vector<double> rho(n_steps);
  double p = 1.0;
  double s = 0.0;
  for (int k = n_steps - 1; k >= 0; --k) {
    rho[k] = p;
    s += dt * p * p;
    p *= growth;
  }
  const double denom = 1.0 + 2.0 * alpha * s;
  if (std::abs(denom) < 1e-12) {
    throw degenerate_problem_error(
        "lq oracle: stationarity system is singular");
  }
  LqSolution out;
  out.terminal = (x0 * p + 2.0 * alpha * s * target) / denom;
  out.theta.resize(n_steps);
  double cost = 0.0;
  for (int k = 0; k < n_steps; ++k) {
    out.theta[k] = 2.0 * alpha * (target - out.terminal) * rho[k];
    cost += 0.5 * dt * out.theta[k] * out.theta[k];
  }
  const double dev = out.terminal - target;
  out.objective = -alpha * dev * dev - cost;
  return out;
}

namespace {

void check_spec(const BruteForceSpec& spec, int expected_dims) {
  if (spec.lower.size() != expected_dims || spec.upper.size() != expected_dims) {
    throw invalid_input_error("brute force: bounds dimension mismatch");
  }
  for (Eigen::Index i = 0; i < spec.lower.size(); ++i) {
    if (!(spec.lower[i] < spec.upper[i]) || !std::isfinite(spec.lower[i]) ||
        !std::isfinite(spec.upper[i])) {
      throw invalid_input_error("brute force: bounds must be finite and ordered");
    }
  }
  if (spec.points_per_round < 3 || spec.points_per_round % 2 == 0) {
    throw invalid_input_error(
        "brute force: points_per_round must be odd and >= 3");
  }
  if (spec.refine_rounds < 0) {
    throw invalid_input_error("brute force: refine_rounds must be >= 0");
  }
}

/// Walks the grid in lexicographic order; strict improvement keeps the
/// lexicographically smallest maximizer.
BruteForceResult search(const BruteForceSpec& spec,
                        const std::function<double(const VectorXd&)>& objective) {
  const int dims = static_cast<int>(spec.lower.size());
  const int pts = spec.points_per_round;

  BruteForceResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  best.coefficients = VectorXd::Zero(dims);

  VectorXd lo = spec.lower;
  VectorXd hi = spec.upper;
  for (int round = 0; round <= spec.refine_rounds; ++round) {
    std::vector<int> idx(dims, 0);
    VectorXd point(dims);
    bool done = false;
    while (!done) {
      for (int dmn = 0; dmn < dims; ++dmn) {
        point[dmn] = lo[dmn] + (hi[dmn] - lo[dmn]) * idx[dmn] / (pts - 1);
      }
      const double j = objective(point);
      if (j > best.objective) {
        best.objective = j;
        best.coefficients = point;
      }
      done = true;
      for (int dmn = dims - 1; dmn >= 0; --dmn) {
        if (++idx[dmn] < pts) {
          done = false;
          break;
        }
        idx[dmn] = 0;
      }
    }
    best.round_best.push_back(best.objective);
    // Shrink a 10x smaller window around the incumbent, clipped to the
    // original bounds. The incumbent stays inside, so the best is monotone.
    for (int dmn = 0; dmn < dims; ++dmn) {
      const double span = (spec.upper[dmn] - spec.lower[dmn]) /
                          std::pow(10.0, round + 1);
      lo[dmn] = std::max(spec.lower[dmn], best.coefficients[dmn] - 0.5 * span);
      hi[dmn] = std::min(spec.upper[dmn], lo[dmn] + span);
    }
  }
  return best;
}

}  // namespace

BruteForceResult brute_force_constant_control(const EuclideanProblem& p,
                                              int n_controls,
                                              const BruteForceSpec& spec) {
  check_spec(spec, p.field->dim());
  return search(spec, [&](const VectorXd& c) {
    ControlSchedule control(std::vector<VectorXd>(n_controls, c),
                            p.grid.n_steps);
    return problem_objective(p, control);
  });
}

BruteForceResult brute_force_constant_control_so3(
    const So3Problem& p, int n_controls, const std::vector<so3::Vec3>& axes,
    const BruteForceSpec& spec) {
  if (axes.empty() || axes.size() > 3) {
    throw invalid_input_error("brute force: need 1 to 3 axis directions");
  }
  check_spec(spec, static_cast<int>(axes.size()));
  return search(spec, [&](const VectorXd& c) {
    so3::Vec3 w = so3::Vec3::Zero();
    for (std::size_t i = 0; i < axes.size(); ++i) w += c[i] * axes[i];
    So3ControlSchedule control(
        std::vector<so3::Mat3>(n_controls, so3::hat(w)), p.grid.n_steps);
    return problem_objective(p, control);
  });
}

}  // namespace ocflow
