#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "ocflow/so3.hpp"

namespace ocflow {

/// Seeded draws with a fixed bit-level mapping from engine output to doubles,
/// so streams are reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (cosine branch only; two engine draws).
  double normal() {
    const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vector(int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal();
    return v;
  }

  /// Rotation with a uniformly random axis and angle uniform in [0, max_angle].
  /// The default cap keeps samples clear of the antipodal set.
  so3::Mat3 random_rotation(double max_angle = 2.8) {
    so3::Vec3 axis(normal(), normal(), normal());
    const double n = axis.norm();
    axis = n > 0.0 ? so3::Vec3(axis / n) : so3::Vec3::UnitX();
    return so3::exp(so3::Vec3(uniform(0.0, max_angle) * axis));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ocflow
