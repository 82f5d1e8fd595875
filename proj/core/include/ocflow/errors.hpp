#pragma once

#include <stdexcept>
#include <string>

namespace ocflow {

/// Input violates an operation's contract (shape mismatch, non-skew matrix,
/// invalid rotation, inconsistent schedule).
class invalid_input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rotation angle within margin of pi: the matrix logarithm is ill-conditioned
/// there. Callers are expected to perturb instead of branch-selecting a log.
class near_antipodal_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// State left the finite range during integration. Carries the step index.
class divergence_error : public std::runtime_error {
 public:
  divergence_error(int step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

/// Affine Gaussian path evaluated where sigma_t = 0 (the t = 1 endpoint).
class singular_schedule_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-form solve hit singular normal equations.
class degenerate_problem_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config file problem. line() is 1-based, or -1 when the error is not tied to
/// a specific line (e.g. a missing required key).
class config_error : public std::runtime_error {
 public:
  config_error(const std::string& what, int line = -1, std::string key = "")
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

}  // namespace ocflow
