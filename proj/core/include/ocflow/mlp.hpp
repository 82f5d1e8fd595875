#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "ocflow/rng.hpp"

namespace ocflow {

/// Feed-forward network with tanh hidden layers and a linear output layer.
/// Small and CPU-only; exists to give the integrators a nontrivial smooth
/// velocity field with exact reverse- and forward-mode derivatives.
class Mlp {
 public:
  struct Layer {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;
  };

  Mlp() = default;
  explicit Mlp(std::vector<Layer> layers);

  int input_dim() const { return static_cast<int>(layers_.front().weight.cols()); }
  int output_dim() const { return static_cast<int>(layers_.back().weight.rows()); }
  const std::vector<Layer>& layers() const { return layers_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

  /// J(x)^T cotangent, exact reverse mode.
  Eigen::VectorXd vjp(const Eigen::VectorXd& x,
                      const Eigen::VectorXd& cotangent) const;

  /// J(x) tangent, exact forward mode.
  Eigen::VectorXd jvp(const Eigen::VectorXd& x,
                      const Eigen::VectorXd& tangent) const;

  /// Gaussian init with per-layer 1/sqrt(fan_in) scaling.
  static Mlp random(const std::vector<int>& sizes, Rng& rng,
                    double gain = 1.0);

  /// Plain-text round trip, 17 significant digits.
  void save(const std::string& path) const;
  static Mlp load(const std::string& path);

 private:
  std::vector<Layer> layers_;
};

}  // namespace ocflow
