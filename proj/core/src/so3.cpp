#include "ocflow/so3.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "ocflow/errors.hpp"

namespace ocflow::so3 {

Mat3 hat(const Vec3& w) {
  Mat3 a;
  a << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return a;
}

Vec3 vee(const Mat3& A) {
  if (!is_skew(A)) {
    throw invalid_input_error("vee: matrix is not skew-symmetric");
  }
  // Average the off-diagonal pairs so vee(project_skew(M)) == vee exactly.
  return Vec3(0.5 * (A(2, 1) - A(1, 2)), 0.5 * (A(0, 2) - A(2, 0)),
              0.5 * (A(1, 0) - A(0, 1)));
}

const Mat3& basis(int i) {
  static const Mat3 e[3] = {hat(Vec3::UnitX()), hat(Vec3::UnitY()),
                            hat(Vec3::UnitZ())};
  if (i < 0 || i > 2) {
    throw invalid_input_error("basis: index out of range");
  }
  return e[i];
}

bool is_skew(const Mat3& A, double tol) {
  return (A + A.transpose()).norm() <= tol;
}

bool is_rotation(const Mat3& R, double tol) {
  return orthogonality_residual(R) <= tol && R.determinant() > 0.0;
}

double orthogonality_residual(const Mat3& R) {
  return (R.transpose() * R - Mat3::Identity()).norm();
}

Mat3 project_skew(const Mat3& M) { return 0.5 * (M - M.transpose()); }

Mat3 exp(const Mat3& A) {
  if (!is_skew(A)) {
    throw invalid_input_error("exp: matrix is not skew-symmetric");
  }
  return exp(vee(A));
}

Mat3 exp(const Vec3& w) {
  const double th = w.norm();
  const double th2 = th * th;
  double a;  // sin(th) / th
  double b;  // (1 - cos(th)) / th^2
  if (th < kTaylorSwitch) {
    a = 1.0 - th2 / 6.0;
    b = 0.5 - th2 / 24.0;
  } else {
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / th2;
  }
  const Mat3 A = hat(w);
  return Mat3::Identity() + a * A + b * (A * A);
}

Mat3 log(const Mat3& R) {
  if (!is_rotation(R)) {
    throw invalid_input_error("log: matrix is not a rotation");
  }
  const double th = rotation_angle(R);
  if (th > M_PI - kAntipodalMargin) {
    throw near_antipodal_error(
        "log: rotation angle too close to pi for a stable principal branch");
  }
  if (th < kTaylorSwitch) {
    return project_skew(R);
  }
  return (th / (2.0 * std::sin(th))) * (R - R.transpose());
}

double rotation_angle(const Mat3& R) {
  const double c = 0.5 * (R.trace() - 1.0);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

double geodesic_distance(const Mat3& r1, const Mat3& r2) {
  // Equals ||log(r1^T r2)||_F on the principal branch, but stays finite and
  // continuous all the way to antipodal pairs.
  return std::sqrt(2.0) * rotation_angle(r1.transpose() * r2);
}

double inner(const Mat3& a, const Mat3& b) {
  return (a.transpose() * b).trace();
}

Mat3 bracket(const Mat3& a, const Mat3& b) { return a * b - b * a; }

Vec3 basis_coords(const Mat3& A) {
  return Vec3(inner(A, basis(0)), inner(A, basis(1)), inner(A, basis(2)));
}

Mat3 basis_reconstruct(const Vec3& c) {
  return 0.5 * (c.x() * basis(0) + c.y() * basis(1) + c.z() * basis(2));
}

Mat3 left_jacobian_inv(const Vec3& w) {
  const double th = w.norm();
  const double th2 = th * th;
  double h;
  if (th < kTaylorSwitch) {
    h = 1.0 / 12.0 + th2 / 720.0;
  } else {
    h = 1.0 / th2 - (1.0 + std::cos(th)) / (2.0 * th * std::sin(th));
  }
  const Mat3 A = hat(w);
  return Mat3::Identity() - 0.5 * A + h * (A * A);
}

}  // namespace ocflow::so3
