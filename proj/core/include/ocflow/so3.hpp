#pragma once

#include <Eigen/Core>

namespace ocflow::so3 {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

// Group-membership tolerances and series switch points.
inline constexpr double kSkewTol = 1e-9;
inline constexpr double kRotationTol = 1e-9;
inline constexpr double kTaylorSwitch = 1e-4;
inline constexpr double kAntipodalMargin = 1e-6;

/// hat(w) v = w x v for every 3-vector v.
Mat3 hat(const Vec3& w);

/// Inverse of hat. Throws invalid_input_error when A is not skew-symmetric
/// within kSkewTol (Frobenius norm of A + A^T).
Vec3 vee(const Mat3& A);

/// Canonical generators E_i = hat(e_i), i in {0,1,2}; <E_i, E_j> = 2 delta_ij.
const Mat3& basis(int i);

bool is_skew(const Mat3& A, double tol = kSkewTol);
bool is_rotation(const Mat3& R, double tol = kRotationTol);

/// ||R^T R - I||_F.
double orthogonality_residual(const Mat3& R);

/// Skew part (M - M^T) / 2.
Mat3 project_skew(const Mat3& M);

/// Rodrigues exponential so(3) -> SO(3):
///   exp(A) = I + (sin th / th) A + ((1 - cos th) / th^2) A^2,  th = ||w||.
/// Below kTaylorSwitch the coefficients use their second-order Taylor
/// expansions to avoid cancellation.
Mat3 exp(const Mat3& A);
Mat3 exp(const Vec3& w);

/// Principal matrix logarithm SO(3) -> so(3). Throws invalid_input_error for
/// non-rotations and near_antipodal_error for angles within kAntipodalMargin
/// of pi. Below kTaylorSwitch uses log(R) ~ (R - R^T)/2.
Mat3 log(const Mat3& R);

/// Rotation angle in [0, pi] (no validity check).
double rotation_angle(const Mat3& R);

/// d(R1, R2) = ||log(R1^T R2)||_F = sqrt(2) * relative rotation angle.
double geodesic_distance(const Mat3& r1, const Mat3& r2);

/// Frobenius inner product Tr(A^T B). For skew arguments,
/// <hat a, hat b> = 2 a.b, hence <A, A> = 2 ||vee A||^2.
double inner(const Mat3& a, const Mat3& b);

/// Lie bracket [A, B] = AB - BA; vee([hat a, hat b]) = a x b.
Mat3 bracket(const Mat3& a, const Mat3& b);

/// Coordinates c_i = <A, E_i>; completeness gives A = 1/2 sum_i c_i E_i.
Vec3 basis_coords(const Mat3& A);
Mat3 basis_reconstruct(const Vec3& c);

/// Inverse left Jacobian: for small d,
///   log(exp(hat d) exp(hat w))^vee = w + Jl_inv(w) d + O(|d|^2).
Mat3 left_jacobian_inv(const Vec3& w);

}  // namespace ocflow::so3
