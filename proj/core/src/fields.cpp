#include "ocflow/fields.hpp"

#include "ocflow/errors.hpp"

namespace ocflow {

namespace {

VectorXd with_time(const VectorXd& x, double t) {
  VectorXd in(x.size() + 1);
  in.head(x.size()) = x;
  in[x.size()] = t;
  return in;
}

VectorXd flatten_row_major(const so3::Mat3& x, double t) {
  VectorXd in(10);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) in[3 * r + c] = x(r, c);
  in[9] = t;
  return in;
}

}  // namespace

void EuclideanField::check_dim(const VectorXd& x) const {
  if (x.size() != dim()) {
    throw invalid_input_error("field: state dimension mismatch");
  }
}

ZeroField::ZeroField(int dim) : dim_(dim) {
  if (dim <= 0) throw invalid_input_error("field: dimension must be positive");
}

VectorXd ZeroField::eval(double, const VectorXd& x) const {
  check_dim(x);
  return VectorXd::Zero(dim_);
}

VectorXd ZeroField::vjp(double, const VectorXd& x, const VectorXd& g) const {
  check_dim(x);
  check_dim(g);
  return VectorXd::Zero(dim_);
}

LinearField::LinearField(MatrixXd a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols() || a_.rows() == 0) {
    throw invalid_input_error("field: linear coefficient must be square");
  }
}

VectorXd LinearField::eval(double, const VectorXd& x) const {
  check_dim(x);
  return a_ * x;
}

VectorXd LinearField::vjp(double, const VectorXd& x, const VectorXd& g) const {
  check_dim(x);
  check_dim(g);
  return a_.transpose() * g;
}

AffineGaussianPathField::Schedules AffineGaussianPathField::ot_schedule() {
  Schedules s;
  s.mean_coef = [](double t) { return t; };
  s.mean_coef_dot = [](double) { return 1.0; };
  s.sigma = [](double t) { return 1.0 - t; };
  s.sigma_dot = [](double) { return -1.0; };
  return s;
}

AffineGaussianPathField::AffineGaussianPathField(Schedules schedules,
                                                 VectorXd x1)
    : s_(std::move(schedules)), x1_(std::move(x1)) {
  if (!s_.mean_coef || !s_.mean_coef_dot || !s_.sigma || !s_.sigma_dot) {
    throw invalid_input_error("field: all four path schedules required");
  }
  if (x1_.size() == 0) {
    throw invalid_input_error("field: conditioning point must be non-empty");
  }
}

double AffineGaussianPathField::sigma_ratio(double t) const {
  const double sig = s_.sigma(t);
  if (sig <= 0.0) {
    throw singular_schedule_error("field: sigma(t) <= 0 at t = " +
                                  std::to_string(t));
  }
  return s_.sigma_dot(t) / sig;
}

VectorXd AffineGaussianPathField::eval(double t, const VectorXd& x) const {
  check_dim(x);
  const double ratio = sigma_ratio(t);
  const VectorXd mu = s_.mean_coef(t) * x1_;
  return s_.mean_coef_dot(t) * x1_ + ratio * (x - mu);
}

VectorXd AffineGaussianPathField::vjp(double t, const VectorXd& x,
                                      const VectorXd& g) const {
  check_dim(x);
  check_dim(g);
  return sigma_ratio(t) * g;
}

MlpField::MlpField(Mlp net) : net_(std::move(net)) {
  if (net_.input_dim() != net_.output_dim() + 1) {
    throw invalid_input_error("field: network input must be state dim + 1");
  }
}

VectorXd MlpField::eval(double t, const VectorXd& x) const {
  check_dim(x);
  return net_.forward(with_time(x, t));
}

VectorXd MlpField::vjp(double t, const VectorXd& x, const VectorXd& g) const {
  check_dim(x);
  check_dim(g);
  // Drop the cotangent component flowing into the time input.
  return net_.vjp(with_time(x, t), g).head(dim());
}

so3::Mat3 ZeroSo3Field::eval(double, const so3::Mat3&) const {
  return so3::Mat3::Zero();
}

so3::Mat3 ZeroSo3Field::dirderiv(double, const so3::Mat3&,
                                 const so3::Mat3&) const {
  return so3::Mat3::Zero();
}

ConstantBodyField::ConstantBodyField(so3::Mat3 c) : c_(std::move(c)) {
  if (!so3::is_skew(c_)) {
    throw invalid_input_error("field: body velocity must be skew-symmetric");
  }
}

so3::Mat3 ConstantBodyField::eval(double, const so3::Mat3&) const { return c_; }

so3::Mat3 ConstantBodyField::dirderiv(double, const so3::Mat3&,
                                      const so3::Mat3&) const {
  return so3::Mat3::Zero();
}

GeodesicPullField::GeodesicPullField(so3::Mat3 target)
    : target_(std::move(target)) {
  if (!so3::is_rotation(target_)) {
    throw invalid_input_error("field: target must be a rotation matrix");
  }
}

so3::Mat3 GeodesicPullField::eval(double t, const so3::Mat3& x) const {
  const double denom = std::max(1.0 - t, kTimeClamp);
  return so3::log(x.transpose() * target_) / denom;
}

so3::Mat3 GeodesicPullField::dirderiv(double t, const so3::Mat3& x,
                                      const so3::Mat3& v) const {
  // With l = log(x^T target)^vee and tangent direction v = x e,
  // d/ds log(exp(-s e) exp(hat l))^vee = -Jl_inv(l) e^vee at s = 0.
  const double denom = std::max(1.0 - t, kTimeClamp);
  const so3::Vec3 l = so3::vee(so3::log(x.transpose() * target_));
  const so3::Vec3 e = so3::vee(so3::project_skew(x.transpose() * v));
  return so3::hat(so3::Vec3(-(so3::left_jacobian_inv(l) * e) / denom));
}

MlpSo3Field::MlpSo3Field(Mlp net) : net_(std::move(net)) {
  if (net_.input_dim() != 10 || net_.output_dim() != 3) {
    throw invalid_input_error("field: rotation network must map 10 -> 3");
  }
}

so3::Mat3 MlpSo3Field::eval(double t, const so3::Mat3& x) const {
  return so3::hat(so3::Vec3(net_.forward(flatten_row_major(x, t))));
}

so3::Mat3 MlpSo3Field::dirderiv(double t, const so3::Mat3& x,
                                const so3::Mat3& v) const {
  VectorXd tangent(10);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) tangent[3 * r + c] = v(r, c);
  tangent[9] = 0.0;
  return so3::hat(so3::Vec3(net_.jvp(flatten_row_major(x, t), tangent)));
}

Mlp make_prior_net(int state_dim, Rng& rng, double gain) {
  return Mlp::random({state_dim + 1, 32, 32, state_dim}, rng, gain);
}

Mlp make_so3_prior_net(Rng& rng, double gain) {
  return Mlp::random({10, 32, 32, 3}, rng, gain);
}

}  // namespace ocflow
