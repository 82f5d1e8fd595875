#pragma once

#include <functional>
#include <memory>

#include <Eigen/Core>

#include "ocflow/mlp.hpp"
#include "ocflow/so3.hpp"

namespace ocflow {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Time-dependent velocity field on R^d. Implementations are immutable and
/// evaluation is pure, so one instance may serve concurrent runs.
class EuclideanField {
 public:
  virtual ~EuclideanField() = default;

  virtual int dim() const = 0;

  /// f(t, x).
  virtual VectorXd eval(double t, const VectorXd& x) const = 0;

  /// (df/dx)^T g at (t, x).
  virtual VectorXd vjp(double t, const VectorXd& x, const VectorXd& g) const = 0;

 protected:
  void check_dim(const VectorXd& x) const;
};

class ZeroField final : public EuclideanField {
 public:
  explicit ZeroField(int dim);
  int dim() const override { return dim_; }
  VectorXd eval(double t, const VectorXd& x) const override;
  VectorXd vjp(double t, const VectorXd& x, const VectorXd& g) const override;

 private:
  int dim_;
};

/// f(t, x) = A x.
class LinearField final : public EuclideanField {
 public:
  explicit LinearField(MatrixXd a);
  int dim() const override { return static_cast<int>(a_.rows()); }
  VectorXd eval(double t, const VectorXd& x) const override;
  VectorXd vjp(double t, const VectorXd& x, const VectorXd& g) const override;
  const MatrixXd& matrix() const { return a_; }

 private:
  MatrixXd a_;
};

/// Conditional field of an affine Gaussian probability path with mean
/// mu_t = a(t) x1 and scale sigma(t):
///   u(t, x) = a'(t) x1 + (sigma'(t)/sigma(t)) (x - a(t) x1).
/// sigma must stay positive wherever the field is evaluated; the optimal
/// transport schedule (a = t, sigma = 1 - t) hits zero only at t = 1, which
/// left-endpoint Euler never touches.
class AffineGaussianPathField final : public EuclideanField {
 public:
  struct Schedules {
    std::function<double(double)> mean_coef;
    std::function<double(double)> mean_coef_dot;
    std::function<double(double)> sigma;
    std::function<double(double)> sigma_dot;
  };

  static Schedules ot_schedule();

  AffineGaussianPathField(Schedules schedules, VectorXd x1);
  int dim() const override { return static_cast<int>(x1_.size()); }
  VectorXd eval(double t, const VectorXd& x) const override;
  VectorXd vjp(double t, const VectorXd& x, const VectorXd& g) const override;

 private:
  double sigma_ratio(double t) const;  // sigma'(t)/sigma(t), throws at sigma <= 0

  Schedules s_;
  VectorXd x1_;
};

/// Learned stand-in prior: network input is x with t appended, output is the
/// velocity.
class MlpField final : public EuclideanField {
 public:
  explicit MlpField(Mlp net);
  int dim() const override { return net_.output_dim(); }
  VectorXd eval(double t, const VectorXd& x) const override;
  VectorXd vjp(double t, const VectorXd& x, const VectorXd& g) const override;
  const Mlp& net() const { return net_; }

 private:
  Mlp net_;
};

/// Left-trivialized field on SO(3): eval returns the body-frame velocity in
/// so(3), so the state obeys x' = x f(t, x).
class So3Field {
 public:
  virtual ~So3Field() = default;

  virtual so3::Mat3 eval(double t, const so3::Mat3& x) const = 0;

  /// Directional derivative of eval along the tangent direction v = x e,
  /// e in so(3): d/ds f(t, x exp(s e)) at s = 0. Result lands in so(3).
  virtual so3::Mat3 dirderiv(double t, const so3::Mat3& x,
                             const so3::Mat3& v) const = 0;
};

class ZeroSo3Field final : public So3Field {
 public:
  so3::Mat3 eval(double t, const so3::Mat3& x) const override;
  so3::Mat3 dirderiv(double t, const so3::Mat3& x,
                     const so3::Mat3& v) const override;
};

/// Constant body-frame spin c.
class ConstantBodyField final : public So3Field {
 public:
  explicit ConstantBodyField(so3::Mat3 c);
  so3::Mat3 eval(double t, const so3::Mat3& x) const override;
  so3::Mat3 dirderiv(double t, const so3::Mat3& x,
                     const so3::Mat3& v) const override;
  const so3::Mat3& body_velocity() const { return c_; }

 private:
  so3::Mat3 c_;
};

/// f(t, x) = log(x^T target) / max(1 - t, 1e-3): steers along the geodesic
/// into the target by t = 1.
class GeodesicPullField final : public So3Field {
 public:
  static constexpr double kTimeClamp = 1e-3;

  explicit GeodesicPullField(so3::Mat3 target);
  so3::Mat3 eval(double t, const so3::Mat3& x) const override;
  so3::Mat3 dirderiv(double t, const so3::Mat3& x,
                     const so3::Mat3& v) const override;
  const so3::Mat3& target() const { return target_; }

 private:
  so3::Mat3 target_;
};

/// Learned SO(3) field: network input is the 9 row-major entries of x with t
/// appended, 3 outputs hatted into so(3). Tangency holds by construction.
class MlpSo3Field final : public So3Field {
 public:
  explicit MlpSo3Field(Mlp net);
  so3::Mat3 eval(double t, const so3::Mat3& x) const override;
  so3::Mat3 dirderiv(double t, const so3::Mat3& x,
                     const so3::Mat3& v) const override;
  const Mlp& net() const { return net_; }

 private:
  Mlp net_;
};

/// Width-32, two-hidden-layer tanh networks used as stand-in priors.
Mlp make_prior_net(int state_dim, Rng& rng, double gain = 1.0);
Mlp make_so3_prior_net(Rng& rng, double gain = 1.0);

}  // namespace ocflow
