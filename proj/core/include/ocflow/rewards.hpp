#pragma once

#include <memory>
#include <vector>

#include "ocflow/integrate.hpp"

namespace ocflow {

/// Terminal reward Phi on R^d with its exact analytic gradient.
class Reward {
 public:
  virtual ~Reward() = default;
  virtual int dim() const = 0;
  virtual double value(const VectorXd& x) const = 0;
  virtual VectorXd gradient(const VectorXd& x) const = 0;
};

/// Phi = -||x - target||^2.
class QuadraticTarget final : public Reward {
 public:
  explicit QuadraticTarget(VectorXd target);
  int dim() const override { return static_cast<int>(target_.size()); }
  double value(const VectorXd& x) const override;
  VectorXd gradient(const VectorXd& x) const override;

 private:
  VectorXd target_;
};

/// Phi = w . x.
class LinearProbe final : public Reward {
 public:
  explicit LinearProbe(VectorXd w);
  int dim() const override { return static_cast<int>(w_.size()); }
  double value(const VectorXd& x) const override;
  VectorXd gradient(const VectorXd& x) const override;

 private:
  VectorXd w_;
};

/// Phi = lambda base(x) - (1 - lambda) ||x - prior_terminal||. The penalty is
/// the plain norm, so the gradient at coincidence is taken as the zero
/// subgradient.
class CompositePrior final : public Reward {
 public:
  CompositePrior(std::shared_ptr<const Reward> base, double lambda,
                 VectorXd prior_terminal);
  int dim() const override { return static_cast<int>(prior_terminal_.size()); }
  double value(const VectorXd& x) const override;
  VectorXd gradient(const VectorXd& x) const override;

 private:
  std::shared_ptr<const Reward> base_;
  double lambda_;
  VectorXd prior_terminal_;
};

/// Terminal reward on SO(3). Gradients are the 9-entry matrix derivatives of
/// Phi with the state entries treated freely; tangency enters only later
/// through the pairing <grad, x E_i>.
class So3Reward {
 public:
  virtual ~So3Reward() = default;
  virtual double value(const so3::Mat3& x) const = 0;
  virtual so3::Mat3 gradient(const so3::Mat3& x) const = 0;
};

/// Phi = -1/2 d(x, target)^2 with the Frobenius geodesic distance, i.e.
/// -(relative angle)^2. Matrix gradient (phi / sin phi) target; throws
/// near_antipodal_error within kAntipodalMargin of pi.
class GeodesicTarget final : public So3Reward {
 public:
  explicit GeodesicTarget(so3::Mat3 target);
  double value(const so3::Mat3& x) const override;
  so3::Mat3 gradient(const so3::Mat3& x) const override;
  const so3::Mat3& target() const { return target_; }

 private:
  so3::Mat3 target_;
};

/// Phi = <W, x> = Tr(W^T x).
class So3LinearProbe final : public So3Reward {
 public:
  explicit So3LinearProbe(so3::Mat3 w);
  double value(const so3::Mat3& x) const override;
  so3::Mat3 gradient(const so3::Mat3& x) const override;

 private:
  so3::Mat3 w_;
};

/// Phi = lambda base(x) - (1 - lambda) d_geo(x, prior_terminal); zero
/// subgradient for the penalty at coincidence.
class So3CompositePrior final : public So3Reward {
 public:
  So3CompositePrior(std::shared_ptr<const So3Reward> base, double lambda,
                    so3::Mat3 prior_terminal);
  double value(const so3::Mat3& x) const override;
  so3::Mat3 gradient(const so3::Mat3& x) const override;

 private:
  std::shared_ptr<const So3Reward> base_;
  double lambda_;
  so3::Mat3 prior_terminal_;
};

/// 1/2 sum_m dt ||theta_m||^2, dt = 1/n_steps. Each block element carries the
/// weight dt because its total displacement in the state equation is dt theta.
double running_cost(const ControlSchedule& control, const TimeGrid& grid);
double running_cost(const So3ControlSchedule& control, const TimeGrid& grid);

/// J = alpha Phi(x_N) - running cost.
double objective_value(const Reward& reward, const VectorXd& terminal,
                       const ControlSchedule& control, double alpha,
                       const TimeGrid& grid);
double objective_value(const So3Reward& reward, const so3::Mat3& terminal,
                       const So3ControlSchedule& control, double alpha,
                       const TimeGrid& grid);

/// H = <mu, f + theta> - 1/2 ||theta||^2 (dot product or Frobenius pairing).
double hamiltonian(const VectorXd& mu, const VectorXd& velocity,
                   const VectorXd& theta);
double hamiltonian_so3(const so3::Mat3& mu, const so3::Mat3& velocity,
                       const so3::Mat3& theta);

/// Piecewise-constant control schedule on a uniform grid over [0, 1], paired
/// with the terminal scale of an affine Gaussian path.
struct GaussianPathCase {
  double sigma1;
  std::vector<VectorXd> theta_pieces;
};

struct KlBoundResult {
  double lhs;       // 1/2 integral ||theta||^2
  double rhs;       // sigma1^2 * KL = 1/2 ||integral theta||^2
  bool holds;       // lhs >= rhs - 1e-12
  bool equality;    // |lhs - rhs| <= 1e-12
};

/// Running cost vs the matched-covariance Gaussian KL between guided and
/// prior terminal conditionals. Piecewise-constant integrals are evaluated
/// exactly, so the equality flag is sharp for constant schedules.
KlBoundResult gaussian_kl_bound_check(const GaussianPathCase& c);

/// A fully specified guidance problem; the objective J(theta) below is what
/// every optimizer and oracle in this codebase maximizes.
struct EuclideanProblem {
  const EuclideanField* field;
  VectorXd x0;
  const Reward* reward;
  double alpha;
  TimeGrid grid;
};

struct So3Problem {
  const So3Field* field;
  so3::Mat3 x0;
  const So3Reward* reward;
  double alpha;
  TimeGrid grid;
};

double problem_objective(const EuclideanProblem& p,
                         const ControlSchedule& control);
double problem_objective(const So3Problem& p, const So3ControlSchedule& control);

}  // namespace ocflow
