#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "ocflow/errors.hpp"
#include "ocflow/fields.hpp"
#include "ocflow/oracles.hpp"
#include "ocflow/rewards.hpp"
#include "ocflow/rng.hpp"

using namespace ocflow;
namespace s = ocflow::so3;

TEST_CASE("quadratic target peaks at the target with zero slope") {
  const VectorXd target = (VectorXd(2) << 1.0, -1.0).finished();
  const QuadraticTarget phi(target);
  CHECK(phi.value(target) == 0.0);
  CHECK(phi.gradient(target).norm() == 0.0);
  const VectorXd x = (VectorXd(2) << 2.0, 0.0).finished();
  CHECK(phi.value(x) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK((phi.gradient(x) - (VectorXd(2) << -2.0, -2.0).finished()).norm() == 0.0);
}

TEST_CASE("linear probe scores the dot product") {
  const LinearProbe phi((VectorXd(2) << 1.0, 2.0).finished());
  const VectorXd x = (VectorXd(2) << 3.0, 4.0).finished();
  CHECK(phi.value(x) == doctest::Approx(11.0).epsilon(1e-15));
  CHECK((phi.gradient(x) - (VectorXd(2) << 1.0, 2.0).finished()).norm() == 0.0);
}

TEST_CASE("euclidean reward gradients agree with differences") {
  Rng rng(60);
  const QuadraticTarget quad(rng.normal_vector(3));
  const LinearProbe probe(rng.normal_vector(3));
  const CompositePrior comp(std::make_shared<LinearProbe>(rng.normal_vector(3)),
                            0.6, rng.normal_vector(3));
  const Reward* rewards[] = {&quad, &probe, &comp};
  for (const Reward* r : rewards) {
    for (int i = 0; i < 20; ++i) {
      const VectorXd x = rng.normal_vector(3);
      const VectorXd fd = finite_diff_gradient(
          [&](const VectorXd& y) { return r->value(y); }, x);
      CHECK((r->gradient(x) - fd).norm() < 1e-8 * std::max(1.0, fd.norm()));
    }
  }
}

TEST_CASE("blended reward interpolates between base score and stay-close penalty") {
  const auto base = std::make_shared<LinearProbe>((VectorXd(2) << 1.0, 0.0).finished());
  const VectorXd anchor = (VectorXd(2) << 0.5, 0.5).finished();
  const CompositePrior all_base(base, 1.0, anchor);
  const CompositePrior all_anchor(base, 0.0, anchor);
  Rng rng(61);
  for (int i = 0; i < 10; ++i) {
    const VectorXd x = rng.normal_vector(2);
    CHECK(all_base.value(x) == doctest::Approx(base->value(x)).epsilon(1e-15));
    CHECK(all_anchor.value(x) == doctest::Approx(-(x - anchor).norm()).epsilon(1e-14));
  }
  // Pure penalty is maximized exactly at the anchor, with the zero subgradient.
  CHECK(all_anchor.value(anchor) == 0.0);
  CHECK(all_anchor.gradient(anchor).norm() == 0.0);
}

TEST_CASE("geodesic rotation reward is minus the squared relative angle") {
  const s::Mat3 target = s::exp(s::Vec3(0.0, 0.8, 0.0));
  const GeodesicTarget phi(target);
  CHECK(phi.value(target) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(phi.value(s::Mat3::Identity())) ==
        doctest::Approx(0.64).epsilon(1e-12));
  const s::Mat3 quarter = s::exp(s::Vec3(0.0, 0.8 + 0.5, 0.0));
  CHECK(phi.value(quarter) == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("geodesic rotation gradient matches entrywise differences") {
  Rng rng(62);
  const GeodesicTarget phi(rng.random_rotation(1.5));
  for (int i = 0; i < 50; ++i) {
    const s::Mat3 x = rng.random_rotation(1.5);
    const s::Mat3 fd = finite_diff_matrix_gradient(
        [&](const s::Mat3& y) { return phi.value(y); }, x);
    CHECK((phi.gradient(x) - fd).norm() < 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("geodesic reward refuses the half-turn set where its slope blows up") {
  const GeodesicTarget phi(s::Mat3::Identity());
  const s::Mat3 flip = s::exp(s::Vec3(M_PI, 0.0, 0.0));
  CHECK_THROWS_AS(phi.gradient(flip), near_antipodal_error);
}

TEST_CASE("rotation probe reward is the Frobenius pairing") {
  s::Mat3 w;
  w << 1.0, 0.0, 0.5, 0.0, -1.0, 0.0, 0.0, 2.0, 0.0;
  const So3LinearProbe phi(w);
  Rng rng(63);
  const s::Mat3 x = rng.random_rotation(2.0);
  CHECK(phi.value(x) == doctest::Approx((w.transpose() * x).trace()).epsilon(1e-14));
  CHECK((phi.gradient(x) - w).norm() == 0.0);
}

TEST_CASE("blended rotation reward reduces to its parts at the lambda endpoints") {
  Rng rng(64);
  const s::Mat3 anchor = rng.random_rotation(1.0);
  const auto base = std::make_shared<GeodesicTarget>(rng.random_rotation(1.0));
  const So3CompositePrior all_base(base, 1.0, anchor);
  const So3CompositePrior all_anchor(base, 0.0, anchor);
  for (int i = 0; i < 10; ++i) {
    const s::Mat3 x = rng.random_rotation(1.5);
    CHECK(all_base.value(x) == doctest::Approx(base->value(x)).epsilon(1e-13));
    CHECK(all_anchor.value(x) ==
          doctest::Approx(-s::geodesic_distance(x, anchor)).epsilon(1e-13));
  }
  CHECK(all_anchor.value(anchor) > -1e-6);
}

TEST_CASE("running cost charges half the squared magnitude per unit time") {
  const int n = 50;
  const TimeGrid grid(n);
  const VectorXd c = (VectorXd(2) << 0.6, -0.8).finished();
  const ControlSchedule theta(std::vector<VectorXd>(n, c), n);
  // Constant magnitude 1: cost = 1/2 * sum dt * 1 = 1/2.
  CHECK(running_cost(theta, grid) == doctest::Approx(0.5).epsilon(1e-13));
  const ControlSchedule block(std::vector<VectorXd>(1, c), n);
  CHECK(running_cost(block, grid) == doctest::Approx(0.5 / n).epsilon(1e-13));

  const So3ControlSchedule rot(std::vector<s::Mat3>(n, s::hat(s::Vec3(0.6, 0.0, -0.8))), n);
  // Skew Frobenius norm doubles the vector norm squared.
  CHECK(running_cost(rot, grid) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("objective is the scaled terminal reward minus the control charge") {
  const int n = 20;
  const TimeGrid grid(n);
  const LinearProbe phi((VectorXd(1) << 1.0).finished());
  const VectorXd terminal = (VectorXd(1) << 0.7).finished();
  const ControlSchedule zero = zero_controls(1, 1, n);
  CHECK(objective_value(phi, terminal, zero, 2.0, grid) ==
        doctest::Approx(1.4).epsilon(1e-15));
  const ControlSchedule theta(std::vector<VectorXd>(n, (VectorXd(1) << 1.0).finished()), n);
  const double j1 = objective_value(phi, terminal, theta, 1.0, grid);
  const double j2 = objective_value(phi, terminal, theta, 2.0, grid);
  // Doubling alpha doubles only the terminal part.
  CHECK(j2 - j1 == doctest::Approx(0.7).epsilon(1e-13));
}

TEST_CASE("per-step control payoff has its known closed form") {
  const VectorXd mu = (VectorXd(2) << 1.0, 0.0).finished();
  const VectorXd vel = (VectorXd(2) << 0.5, 0.0).finished();
  const VectorXd th = (VectorXd(2) << 0.2, 0.0).finished();
  CHECK(hamiltonian(mu, vel, th) == doctest::Approx(0.48).epsilon(1e-15));

  const s::Mat3 rmu = s::hat(s::Vec3(1.0, 0.0, 0.0));
  const s::Mat3 rvel = s::hat(s::Vec3(0.5, 0.0, 0.0));
  const s::Mat3 rth = s::hat(s::Vec3(0.2, 0.0, 0.0));
  CHECK(hamiltonian_so3(rmu, rvel, rth) == doctest::Approx(0.96).epsilon(1e-13));
}

TEST_CASE("per-step payoff is maximized by aligning the control with the co-state") {
  Rng rng(65);
  for (int i = 0; i < 20; ++i) {
    const VectorXd mu = rng.normal_vector(3);
    const VectorXd vel = rng.normal_vector(3);
    const double best = hamiltonian(mu, (vel + mu).eval(), mu);
    for (int p = 0; p < 20; ++p) {
      const VectorXd other = mu + 0.1 * rng.normal_vector(3);
      CHECK(hamiltonian(mu, (vel + other).eval(), other) <= best + 1e-12);
    }
  }
}

TEST_CASE("control energy bounds the terminal mismatch of a straight-line path") {
  // Constant schedule: the bound is tight.
  GaussianPathCase constant;
  constant.sigma1 = 1.0;
  constant.theta_pieces = {(VectorXd(1) << 0.6).finished()};
  const KlBoundResult r1 = gaussian_kl_bound_check(constant);
  CHECK(r1.lhs == doctest::Approx(0.18).epsilon(1e-15));
  CHECK(r1.rhs == doctest::Approx(0.18).epsilon(1e-15));
  CHECK(r1.holds);
  CHECK(r1.equality);

  // Zero schedule: both sides vanish.
  GaussianPathCase zero;
  zero.sigma1 = 0.5;
  zero.theta_pieces = {VectorXd::Zero(2), VectorXd::Zero(2)};
  const KlBoundResult r0 = gaussian_kl_bound_check(zero);
  CHECK(r0.lhs == 0.0);
  CHECK(r0.rhs == 0.0);
  CHECK(r0.equality);
}

TEST_CASE("a ramping schedule pays strictly more than its net displacement needs") {
  // theta(t) = 1.2 t sampled as midpoint pieces: energy 0.24, displacement
  // term 0.18, so the inequality is strict.
  const int m = 1000;
  GaussianPathCase ramp;
  ramp.sigma1 = 1.0;
  ramp.theta_pieces.reserve(m);
  for (int i = 0; i < m; ++i) {
    ramp.theta_pieces.push_back(
        (VectorXd(1) << 1.2 * (i + 0.5) / m).finished());
  }
  const KlBoundResult r = gaussian_kl_bound_check(ramp);
  CHECK(r.lhs == doctest::Approx(0.24).epsilon(1e-6));
  CHECK(r.rhs == doctest::Approx(0.18).epsilon(1e-9));
  CHECK(r.holds);
  CHECK_FALSE(r.equality);
}

TEST_CASE("the energy bound holds across random schedules and is tight only when constant") {
  Rng rng(66);
  for (int i = 0; i < 100; ++i) {
    GaussianPathCase c;
    c.sigma1 = rng.uniform(0.1, 3.0);
    const int d = 1 + static_cast<int>(rng.uniform(0.0, 3.999));
    const int pieces = 1 + static_cast<int>(rng.uniform(0.0, 7.999));
    const bool constant = i % 5 == 0;
    const VectorXd fixed = rng.normal_vector(d);
    for (int p = 0; p < pieces; ++p) {
      c.theta_pieces.push_back(constant ? fixed : rng.normal_vector(d));
    }
    const KlBoundResult r = gaussian_kl_bound_check(c);
    CHECK(r.holds);
    if (constant || pieces == 1) CHECK(r.equality);
  }
}

TEST_CASE("problem objective matches the hand-assembled pieces") {
  const ZeroField field(1);
  const QuadraticTarget reward((VectorXd(1) << 1.0).finished());
  const EuclideanProblem p{&field, VectorXd::Zero(1), &reward, 0.5, TimeGrid(50)};
  const ControlSchedule theta(std::vector<VectorXd>(50, (VectorXd(1) << 0.5).finished()), 50);
  // Terminal 0.5, reward -(0.5-1)^2 = -0.25 scaled by 0.5; cost 1/2*0.25.
  CHECK(problem_objective(p, theta) == doctest::Approx(-0.25).epsilon(1e-12));
}
