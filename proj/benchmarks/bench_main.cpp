#include <benchmark/benchmark.h>

#include "ocflow/fields.hpp"
#include "ocflow/guidance.hpp"
#include "ocflow/integrate.hpp"
#include "ocflow/rewards.hpp"
#include "ocflow/rng.hpp"

namespace {

using namespace ocflow;

void bm_integrate_euclidean(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const MlpField field(make_prior_net(8, rng));
  const VectorXd x0 = rng.normal_vector(8);
  const ControlSchedule theta = zero_controls(n, 8, n);
  const TimeGrid grid(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_euclidean(field, theta, x0, grid));
  }
}
BENCHMARK(bm_integrate_euclidean)->Arg(100)->Arg(400);

void bm_backward_chain(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  const MlpField field(make_prior_net(8, rng));
  const VectorXd x0 = rng.normal_vector(8);
  const ControlSchedule theta = zero_controls(n, 8, n);
  const TimeGrid grid(n);
  const EuclideanTrajectory traj = integrate_euclidean(field, theta, x0, grid);
  const VectorXd seed = rng.normal_vector(8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        backward_grad_chain(field, traj, seed, theta, grid));
  }
}
BENCHMARK(bm_backward_chain)->Arg(100)->Arg(400);

void bm_integrate_rotations(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  const MlpSo3Field field(make_so3_prior_net(rng));
  const so3::Mat3 x0 = rng.random_rotation();
  const So3ControlSchedule theta = zero_so3_controls(n, n);
  const TimeGrid grid(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_so3(field, theta, x0, grid));
  }
}
BENCHMARK(bm_integrate_rotations)->Arg(100)->Arg(400);

void bm_costate_sweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  const MlpSo3Field field(make_so3_prior_net(rng));
  const so3::Mat3 x0 = rng.random_rotation();
  const So3ControlSchedule theta = zero_so3_controls(n, n);
  const TimeGrid grid(n);
  const So3Trajectory traj = integrate_so3(field, theta, x0, grid);
  const so3::Mat3 seed = so3::hat(rng.normal_vector(3));
  for (auto _ : state) {
    benchmark::DoNotOptimize(costate_solve_so3(field, theta, traj, seed, grid));
  }
}
BENCHMARK(bm_costate_sweep)->Arg(100)->Arg(400);

void bm_exp_log_round_trip(benchmark::State& state) {
  Rng rng(5);
  const so3::Vec3 w = 1.3 * rng.normal_vector(3).normalized();
  for (auto _ : state) {
    benchmark::DoNotOptimize(so3::log(so3::exp(w)));
  }
}
BENCHMARK(bm_exp_log_round_trip);

void bm_guidance_iteration(benchmark::State& state) {
  Rng rng(6);
  const MlpField field(make_prior_net(8, rng));
  const VectorXd x0 = rng.normal_vector(8);
  const QuadraticTarget reward(rng.normal_vector(8));
  GuidanceConfig cfg;
  cfg.n_steps = 100;
  cfg.n_controls = 100;
  cfg.max_iters = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_guidance(field, x0, reward, cfg));
  }
}
BENCHMARK(bm_guidance_iteration);

}  // namespace

BENCHMARK_MAIN();
