#include "ocflow/rewards.hpp"

#include <algorithm>
#include <cmath>

#include "ocflow/errors.hpp"

namespace ocflow {

namespace {

void check_dim(const VectorXd& x, int dim, const char* where) {
  if (x.size() != dim) {
    throw invalid_input_error(std::string(where) + ": dimension mismatch");
  }
}

// phi / sin(phi), series below the switch point to dodge 0/0.
double angle_over_sin(double phi) {
  if (phi < so3::kTaylorSwitch) return 1.0 + phi * phi / 6.0;
  return phi / std::sin(phi);
}

double checked_angle(const so3::Mat3& x, const so3::Mat3& target,
                     const char* where) {
  const double c = 0.5 * ((x.transpose() * target).trace() - 1.0);
  const double phi = std::acos(std::clamp(c, -1.0, 1.0));
  if (phi > M_PI - so3::kAntipodalMargin) {
    throw near_antipodal_error(std::string(where) +
                               ": state is antipodal to the target");
  }
  return phi;
}

}  // namespace

QuadraticTarget::QuadraticTarget(VectorXd target) : target_(std::move(target)) {
  if (target_.size() == 0) {
    throw invalid_input_error("reward: empty target");
  }
}

double QuadraticTarget::value(const VectorXd& x) const {
  check_dim(x, dim(), "reward");
  return -(x - target_).squaredNorm();
}

VectorXd QuadraticTarget::gradient(const VectorXd& x) const {
  check_dim(x, dim(), "reward");
  return -2.0 * (x - target_);
}

LinearProbe::LinearProbe(VectorXd w) : w_(std::move(w)) {
  if (w_.size() == 0) throw invalid_input_error("reward: empty weight vector");
}

double LinearProbe::value(const VectorXd& x) const {
  check_dim(x, dim(), "reward");
  return w_.dot(x);
}

VectorXd LinearProbe::gradient(const VectorXd& x) const {
  check_dim(x, dim(), "reward");
  return w_;
}

CompositePrior::CompositePrior(std::shared_ptr<const Reward> base,
                               double lambda, VectorXd prior_terminal)
    : base_(std::move(base)),
      lambda_(lambda),
      prior_terminal_(std::move(prior_terminal)) {
  if (!base_) throw invalid_input_error("reward: composite needs a base");
  if (lambda_ < 0.0 || lambda_ > 1.0) {
    throw invalid_input_error("reward: lambda must lie in [0, 1]");
  }
  if (base_->dim() != prior_terminal_.size()) {
    throw invalid_input_error("reward: prior terminal dimension mismatch");
  }
}

double CompositePrior::value(const VectorXd& x) const {
  return lambda_ * base_->value(x) -
         (1.0 - lambda_) * (x - prior_terminal_).norm();
}

VectorXd CompositePrior::gradient(const VectorXd& x) const {
  VectorXd g = lambda_ * base_->gradient(x);
  const VectorXd diff = x - prior_terminal_;
  const double n = diff.norm();
  if (n > 1e-12) g -= ((1.0 - lambda_) / n) * diff;
  return g;
}

GeodesicTarget::GeodesicTarget(so3::Mat3 target) : target_(std::move(target)) {
  if (!so3::is_rotation(target_)) {
    throw invalid_input_error("reward: geodesic target must be a rotation");
  }
}

double GeodesicTarget::value(const so3::Mat3& x) const {
  // -1/2 ||log(x^T target)||_F^2 = -(angle)^2; extended off the group through
  // the trace formula so that 9-entry derivatives are meaningful.
  const double phi = checked_angle(x, target_, "reward");
  return -phi * phi;
}

so3::Mat3 GeodesicTarget::gradient(const so3::Mat3& x) const {
  const double phi = checked_angle(x, target_, "reward");
  return angle_over_sin(phi) * target_;
}

So3LinearProbe::So3LinearProbe(so3::Mat3 w) : w_(std::move(w)) {}

double So3LinearProbe::value(const so3::Mat3& x) const {
  return so3::inner(w_, x);
}

so3::Mat3 So3LinearProbe::gradient(const so3::Mat3&) const { return w_; }

So3CompositePrior::So3CompositePrior(std::shared_ptr<const So3Reward> base,
                                     double lambda, so3::Mat3 prior_terminal)
    : base_(std::move(base)),
      lambda_(lambda),
      prior_terminal_(std::move(prior_terminal)) {
  if (!base_) throw invalid_input_error("reward: composite needs a base");
  if (lambda_ < 0.0 || lambda_ > 1.0) {
    throw invalid_input_error("reward: lambda must lie in [0, 1]");
  }
  if (!so3::is_rotation(prior_terminal_)) {
    throw invalid_input_error("reward: prior terminal must be a rotation");
  }
}

double So3CompositePrior::value(const so3::Mat3& x) const {
  const double phi = checked_angle(x, prior_terminal_, "reward");
  return lambda_ * base_->value(x) -
         (1.0 - lambda_) * std::sqrt(2.0) * phi;
}

so3::Mat3 So3CompositePrior::gradient(const so3::Mat3& x) const {
  so3::Mat3 g = lambda_ * base_->gradient(x);
  const double phi = checked_angle(x, prior_terminal_, "reward");
  // d phi / dX = -prior / (2 sin phi); kink at coincidence resolved by the
  // zero subgradient.
  if (phi > 1e-9) {
    g += ((1.0 - lambda_) * std::sqrt(2.0) / (2.0 * std::sin(phi))) *
         prior_terminal_;
  }
  return g;
}

double running_cost(const ControlSchedule& control, const TimeGrid& grid) {
  double sum = 0.0;
  for (const VectorXd& theta : control.elements) sum += theta.squaredNorm();
  return 0.5 * grid.dt() * sum;
}

double running_cost(const So3ControlSchedule& control, const TimeGrid& grid) {
  double sum = 0.0;
  for (const so3::Mat3& theta : control.elements) sum += theta.squaredNorm();
  return 0.5 * grid.dt() * sum;
}

double objective_value(const Reward& reward, const VectorXd& terminal,
                       const ControlSchedule& control, double alpha,
                       const TimeGrid& grid) {
  return alpha * reward.value(terminal) - running_cost(control, grid);
}

double objective_value(const So3Reward& reward, const so3::Mat3& terminal,
                       const So3ControlSchedule& control, double alpha,
                       const TimeGrid& grid) {
  return alpha * reward.value(terminal) - running_cost(control, grid);
}

double hamiltonian(const VectorXd& mu, const VectorXd& velocity,
                   const VectorXd& theta) {
  return mu.dot(velocity) - 0.5 * theta.squaredNorm();
}

double hamiltonian_so3(const so3::Mat3& mu, const so3::Mat3& velocity,
                       const so3::Mat3& theta) {
  return so3::inner(mu, velocity) - 0.5 * theta.squaredNorm();
}

KlBoundResult gaussian_kl_bound_check(const GaussianPathCase& c) {
  if (c.sigma1 <= 0.0) {
    throw invalid_input_error("kl bound: sigma1 must be positive");
  }
  if (c.theta_pieces.empty()) {
    throw invalid_input_error("kl bound: empty schedule");
  }
  const double w = 1.0 / static_cast<double>(c.theta_pieces.size());
  double lhs = 0.0;
  VectorXd mean_shift = VectorXd::Zero(c.theta_pieces.front().size());
  for (const VectorXd& theta : c.theta_pieces) {
    lhs += 0.5 * w * theta.squaredNorm();
    mean_shift += w * theta;
  }
  const double kl =
      mean_shift.squaredNorm() / (2.0 * c.sigma1 * c.sigma1);
  KlBoundResult out;
  out.lhs = lhs;
  out.rhs = c.sigma1 * c.sigma1 * kl;
  out.holds = out.lhs >= out.rhs - 1e-12;
  out.equality = std::abs(out.lhs - out.rhs) <= 1e-12;
  return out;
}

double problem_objective(const EuclideanProblem& p,
                         const ControlSchedule& control) {
  const EuclideanTrajectory traj =
      integrate_euclidean(*p.field, control, p.x0, p.grid);
  return objective_value(*p.reward, traj.states.back(), control, p.alpha,
                         p.grid);
}

double problem_objective(const So3Problem& p,
                         const So3ControlSchedule& control) {
  const So3Trajectory traj = integrate_so3(*p.field, control, p.x0, p.grid);
  return objective_value(*p.reward, traj.states.back(), control, p.alpha,
                         p.grid);
}

}  // namespace ocflow
