#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ocflow/errors.hpp"
#include "ocflow/fields.hpp"
#include "ocflow/oracles.hpp"
#include "ocflow/rewards.hpp"
#include "ocflow/rng.hpp"

using namespace ocflow;
namespace s = ocflow::so3;

TEST_CASE("difference gradients recover linear and quadratic slopes") {
  const VectorXd w = (VectorXd(3) << 1.0, -2.0, 0.5).finished();
  const VectorXd at = (VectorXd(3) << 0.3, 0.1, -0.7).finished();
  const VectorXd gw = finite_diff_gradient(
      [&](const VectorXd& x) { return w.dot(x); }, at);
  CHECK((gw - w).norm() < 1e-10);

  const VectorXd x0 = (VectorXd(2) << 1.0, 2.0).finished();
  const VectorXd gq = finite_diff_gradient(
      [](const VectorXd& x) { return x.squaredNorm(); }, x0);
  CHECK((gq - (VectorXd(2) << 2.0, 4.0).finished()).norm() < 1e-9);
}

TEST_CASE("group-direction differences see through the rotation constraint") {
  // For Phi = <W, x>, the derivative along x exp(eps E_i) is <W, x E_i>.
  Rng rng(70);
  s::Mat3 w;
  w << 0.3, 1.0, -0.2, 0.4, 0.0, 0.7, -1.1, 0.2, 0.5;
  const s::Mat3 x = rng.random_rotation(1.8);
  const s::Vec3 g = finite_diff_rotation_gradient(
      [&](const s::Mat3& y) { return (w.transpose() * y).trace(); }, x);
  for (int i = 0; i < 3; ++i) {
    const double expected = (w.transpose() * x * s::basis(i)).trace();
    CHECK(g[i] == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("entrywise matrix differences recover a linear pairing") {
  s::Mat3 w;
  w << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0;
  Rng rng(71);
  const s::Mat3 x = rng.random_rotation(1.0);
  const s::Mat3 g = finite_diff_matrix_gradient(
      [&](const s::Mat3& y) { return (w.transpose() * y).trace(); }, x);
  CHECK((g - w).norm() < 1e-8);
}

TEST_CASE("drift-free scalar pull problem has the known stationary point") {
  const LqSolution sol = lq_closed_form(0.0, 0.0, 1.0, 0.5, 50);
  REQUIRE(sol.theta.size() == 50);
  for (double th : sol.theta) CHECK(th == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.terminal == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.objective == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("scalar solve keeps its hands off the state when the reward is off") {
  const LqSolution sol = lq_closed_form(0.4, 0.3, 1.0, 0.0, 30);
  for (double th : sol.theta) CHECK(std::abs(th) < 1e-14);
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("a huge reward weight pins the terminal onto the target") {
  const LqSolution sol = lq_closed_form(0.0, 0.0, 1.0, 1e6, 40);
  CHECK(std::abs(sol.terminal - 1.0) < 1e-5);
}

TEST_CASE("the scalar solve refuses a singular stationarity system") {
  // With no drift the weight sum is exactly 1, so alpha = -1/2 zeroes the
  // denominator of the terminal solve.
  CHECK_THROWS_AS(lq_closed_form(0.0, 0.0, 1.0, -0.5, 8),
                  degenerate_problem_error);
  CHECK_THROWS_AS(lq_closed_form(0.0, 0.0, 1.0, 0.5, 0), invalid_input_error);
}

TEST_CASE("scalar solve is stationary for the discrete objective it claims to solve") {
  const double a = 0.7, x0 = 0.2, target = 1.3, alpha = 0.8;
  const int n = 25;
  const LqSolution sol = lq_closed_form(a, x0, target, alpha, n);

  MatrixXd amat(1, 1);
  amat << a;
  const LinearField field(amat);
  const QuadraticTarget reward((VectorXd(1) << target).finished());
  const EuclideanProblem p{&field, (VectorXd(1) << x0).finished(), &reward,
                           alpha, TimeGrid(n)};
  std::vector<VectorXd> elems(n);
  for (int k = 0; k < n; ++k) elems[k] = (VectorXd(1) << sol.theta[k]).finished();
  const ControlSchedule theta(elems, n);
  const double j_star = problem_objective(p, theta);
  CHECK(j_star == doctest::Approx(sol.objective).epsilon(1e-10));

  // Nudging any single coefficient must not improve the objective.
  Rng rng(72);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = static_cast<int>(rng.uniform(0.0, n - 1e-9));
    ControlSchedule bumped = theta;
    bumped.elements[k][0] += rng.uniform(-1e-3, 1e-3);
    CHECK(problem_objective(p, bumped) <= j_star + 1e-10);
  }
}

TEST_CASE("grid search finds the scalar pull optimum") {
  const ZeroField field(1);
  const QuadraticTarget reward((VectorXd(1) << 1.0).finished());
  const EuclideanProblem p{&field, VectorXd::Zero(1), &reward, 0.5, TimeGrid(50)};
  BruteForceSpec spec;
  spec.lower = (VectorXd(1) << -2.0).finished();
  spec.upper = (VectorXd(1) << 2.0).finished();
  const BruteForceResult r = brute_force_constant_control(p, 50, spec);
  CHECK(std::abs(r.coefficients[0] - 0.5) < 1e-4);
  CHECK(std::abs(r.objective + 0.25) < 1e-6);
}

TEST_CASE("grid search finds the rotation steering optimum") {
  const ZeroSo3Field field;
  const GeodesicTarget reward(s::exp(s::Vec3(0.8, 0.0, 0.0)));
  const So3Problem p{&field, s::Mat3::Identity(), &reward, 1.0, TimeGrid(100)};
  BruteForceSpec spec;
  spec.lower = (VectorXd(1) << -2.0).finished();
  spec.upper = (VectorXd(1) << 2.0).finished();
  const BruteForceResult r = brute_force_constant_control_so3(
      p, 100, {s::Vec3::UnitX()}, spec);
  // Splitting the 0.8 turn: half through the control at quadratic price.
  CHECK(std::abs(r.coefficients[0] - 0.4) < 1e-3);
  CHECK(std::abs(r.objective + 0.32) < 1e-4);
}

TEST_CASE("grid search returns zero control when only the energy matters") {
  const ZeroField field(2);
  const LinearProbe reward(VectorXd::Zero(2));
  const EuclideanProblem p{&field, VectorXd::Zero(2), &reward, 1.0, TimeGrid(20)};
  BruteForceSpec spec;
  spec.lower = (VectorXd(2) << -2.0, -2.0).finished();
  spec.upper = (VectorXd(2) << 2.0, 2.0).finished();
  const BruteForceResult r = brute_force_constant_control(p, 20, spec);
  CHECK(r.coefficients.norm() < 1e-6);
  CHECK(std::abs(r.objective) < 1e-10);
}

TEST_CASE("each refinement round can only improve the incumbent") {
  Rng rng(73);
  const MlpField field(make_prior_net(2, rng));
  const QuadraticTarget reward(rng.normal_vector(2));
  const EuclideanProblem p{&field, rng.normal_vector(2), &reward, 1.0, TimeGrid(30)};
  BruteForceSpec spec;
  spec.lower = (VectorXd(2) << -3.0, -3.0).finished();
  spec.upper = (VectorXd(2) << 3.0, 3.0).finished();
  spec.refine_rounds = 5;
  const BruteForceResult r = brute_force_constant_control(p, 30, spec);
  // One entry for the opening sweep, then one per shrink round.
  REQUIRE(r.round_best.size() == 6);
  for (std::size_t i = 1; i < r.round_best.size(); ++i) {
    CHECK(r.round_best[i] >= r.round_best[i - 1]);
  }
  CHECK(r.objective == r.round_best.back());
}

TEST_CASE("grid search is bit-for-bit repeatable") {
  Rng rng(74);
  const MlpField field(make_prior_net(2, rng));
  const QuadraticTarget reward(rng.normal_vector(2));
  const EuclideanProblem p{&field, rng.normal_vector(2), &reward, 1.5, TimeGrid(25)};
  BruteForceSpec spec;
  spec.lower = (VectorXd(2) << -2.0, -2.0).finished();
  spec.upper = (VectorXd(2) << 2.0, 2.0).finished();
  const BruteForceResult r1 = brute_force_constant_control(p, 25, spec);
  const BruteForceResult r2 = brute_force_constant_control(p, 25, spec);
  CHECK((r1.coefficients - r2.coefficients).norm() == 0.0);
  CHECK(r1.objective == r2.objective);
}
