#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "ocflow/errors.hpp"
#include "ocflow/fields.hpp"
#include "ocflow/oracles.hpp"
#include "ocflow/rng.hpp"

using namespace ocflow;
namespace s = ocflow::so3;

namespace {

std::string temp_path(const char* name) {
  return std::string("fields_tmp_") + name;
}

}  // namespace

TEST_CASE("mlp forward dimensions and tanh saturation") {
  Rng rng(10);
  const Mlp net = Mlp::random({3, 8, 2}, rng);
  CHECK(net.input_dim() == 3);
  CHECK(net.output_dim() == 2);
  const VectorXd y = net.forward(VectorXd::Zero(3));
  CHECK(y.size() == 2);
  CHECK(y.allFinite());
}

TEST_CASE("mlp save and load round-trips outputs exactly") {
  Rng rng(11);
  const Mlp net = Mlp::random({4, 16, 16, 3}, rng, 0.8);
  const std::string path = temp_path("net.txt");
  net.save(path);
  const Mlp back = Mlp::load(path);
  Rng probes(12);
  for (int i = 0; i < 20; ++i) {
    const VectorXd x = probes.normal_vector(4);
    CHECK((net.forward(x) - back.forward(x)).norm() == 0.0);
  }
  std::remove(path.c_str());
}

TEST_CASE("mlp load rejects truncated files") {
  const std::string path = temp_path("broken.txt");
  {
    std::ofstream out(path);
    out << "layers: 2\n3 4\n1 2 3 4\n";
  }
  CHECK_THROWS_AS(Mlp::load(path), invalid_input_error);
  std::remove(path.c_str());
}

TEST_CASE("mlp reverse and forward derivatives agree with differences") {
  Rng rng(13);
  const Mlp net = Mlp::random({3, 12, 3}, rng);
  Rng probes(14);
  for (int i = 0; i < 25; ++i) {
    const VectorXd x = probes.normal_vector(3);
    const VectorXd g = probes.normal_vector(3);
    const VectorXd v = probes.normal_vector(3);
    // <g, J v> computed both ways must match, and each side must match FD.
    const double via_vjp = net.vjp(x, g).dot(v);
    const double via_jvp = g.dot(net.jvp(x, v));
    CHECK(std::abs(via_vjp - via_jvp) < 1e-11);
    const double h = 1e-6;
    const double fd = g.dot((net.forward(x + h * v) - net.forward(x - h * v)) / (2.0 * h));
    CHECK(std::abs(via_vjp - fd) < 1e-7);
  }
}

TEST_CASE("zero field evaluates and back-propagates to zero") {
  const ZeroField f(3);
  CHECK(f.eval(0.3, VectorXd::Ones(3)).norm() == 0.0);
  CHECK(f.vjp(0.3, VectorXd::Ones(3), VectorXd::Ones(3)).norm() == 0.0);
  CHECK_THROWS_AS(f.eval(0.0, VectorXd::Ones(2)), invalid_input_error);
}

TEST_CASE("linear field applies its matrix and transposes it backward") {
  MatrixXd a(2, 2);
  a << 1.0, 2.0, -0.5, 0.25;
  const LinearField f(a);
  const VectorXd x = (VectorXd(2) << 1.0, -1.0).finished();
  CHECK((f.eval(0.1, x) - a * x).norm() == 0.0);
  const VectorXd g = (VectorXd(2) << 0.5, 2.0).finished();
  CHECK((f.vjp(0.1, x, g) - a.transpose() * g).norm() == 0.0);
}

TEST_CASE("straight-line path field pushes toward the endpoint") {
  // a(t) = t, sigma(t) = 1 - t: u(t, x) = x1 + (x - t x1) * (-1 / (1 - t)).
  const VectorXd x1 = VectorXd::Ones(1);
  const AffineGaussianPathField f(AffineGaussianPathField::ot_schedule(), x1);
  const VectorXd x = (VectorXd(1) << 0.25).finished();
  CHECK(f.eval(0.5, x)[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(f.eval(1.0, x), singular_schedule_error);
}

TEST_CASE("path field derivative is the scale ratio times the incoming vector") {
  const VectorXd x1 = (VectorXd(3) << 1.0, -2.0, 0.5).finished();
  const AffineGaussianPathField f(AffineGaussianPathField::ot_schedule(), x1);
  Rng rng(15);
  for (int i = 0; i < 20; ++i) {
    const double t = rng.uniform(0.0, 0.9);
    const VectorXd x = rng.normal_vector(3);
    const VectorXd g = rng.normal_vector(3);
    const double ratio = -1.0 / (1.0 - t);
    CHECK((f.vjp(t, x, g) - ratio * g).norm() < 1e-12);
  }
}

TEST_CASE("network-backed field reverse derivative matches differences") {
  Rng rng(16);
  const MlpField f(make_prior_net(3, rng));
  Rng probes(17);
  for (int i = 0; i < 50; ++i) {
    const double t = probes.uniform(0.0, 1.0);
    const VectorXd x = probes.normal_vector(3);
    const VectorXd g = probes.normal_vector(3);
    const VectorXd u = probes.normal_vector(3).normalized();
    const double h = 1e-5;
    const double fd = g.dot((f.eval(t, x + h * u) - f.eval(t, x - h * u)) / (2.0 * h));
    const double exact = f.vjp(t, x, g).dot(u);
    CHECK(std::abs(exact - fd) < 1e-7 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("rotation fields return skew body velocities everywhere") {
  Rng rng(18);
  const ConstantBodyField constant(s::hat(s::Vec3(0.3, -0.2, 0.5)));
  const GeodesicPullField pull(rng.random_rotation(1.5));
  const MlpSo3Field learned(make_so3_prior_net(rng));
  const ZeroSo3Field zero;
  const So3Field* fields[] = {&constant, &pull, &learned, &zero};
  for (int i = 0; i < 25; ++i) {
    const s::Mat3 x = rng.random_rotation(2.0);
    const double t = rng.uniform(0.0, 0.99);
    for (const So3Field* f : fields) {
      CHECK(s::is_skew(f->eval(t, x), 1e-12));
    }
  }
}

TEST_CASE("constant body field ignores time and state") {
  const s::Mat3 c = s::hat(s::Vec3(0.1, 0.2, 0.3));
  const ConstantBodyField f(c);
  Rng rng(19);
  CHECK((f.eval(0.0, s::Mat3::Identity()) - c).norm() == 0.0);
  CHECK((f.eval(0.7, rng.random_rotation(2.0)) - c).norm() == 0.0);
  CHECK(f.dirderiv(0.7, rng.random_rotation(2.0),
                   s::Mat3(rng.random_rotation(1.0) * s::basis(1))).norm() == 0.0);
}

TEST_CASE("geodesic pull points along the remaining rotation, sped up in time") {
  const s::Mat3 target = s::exp(s::Vec3(0.5, 0.0, 0.0));
  const GeodesicPullField f(target);
  const s::Mat3 at_identity = f.eval(0.0, s::Mat3::Identity());
  CHECK((at_identity - s::hat(s::Vec3(0.5, 0.0, 0.0))).norm() < 1e-12);
  const s::Mat3 later = f.eval(0.75, s::Mat3::Identity());
  CHECK((later - 4.0 * at_identity).norm() < 1e-12);
  // At the target the pull vanishes.
  CHECK(f.eval(0.3, target).norm() < 1e-7);
}

TEST_CASE("geodesic pull directional derivative matches group differences") {
  const s::Mat3 target = s::exp(s::Vec3(0.5, 0.0, 0.0));
  const GeodesicPullField f(target);
  Rng rng(20);
  const double eps = 1e-5;
  for (int i = 0; i < 30; ++i) {
    const s::Mat3 x = i == 0 ? s::Mat3::Identity() : rng.random_rotation(1.2);
    const double t = rng.uniform(0.0, 0.9);
    const s::Mat3 e = s::hat(s::Vec3(rng.normal_vector(3).normalized()));
    const s::Mat3 fd =
        (f.eval(t, s::Mat3(x * s::exp(s::Mat3(eps * e)))) -
         f.eval(t, s::Mat3(x * s::exp(s::Mat3(-eps * e))))) / (2.0 * eps);
    const s::Mat3 exact = f.dirderiv(t, x, s::Mat3(x * e));
    CHECK((exact - fd).norm() < 1e-6);
  }
}

TEST_CASE("learned rotation field directional derivative matches differences") {
  Rng rng(21);
  const MlpSo3Field f(make_so3_prior_net(rng, 0.7));
  const double eps = 1e-5;
  for (int i = 0; i < 50; ++i) {
    const s::Mat3 x = rng.random_rotation(2.2);
    const double t = rng.uniform(0.0, 1.0);
    const s::Mat3 e = s::hat(s::Vec3(rng.normal_vector(3).normalized()));
    const s::Mat3 fd =
        (f.eval(t, s::Mat3(x * s::exp(s::Mat3(eps * e)))) -
         f.eval(t, s::Mat3(x * s::exp(s::Mat3(-eps * e))))) / (2.0 * eps);
    const s::Mat3 exact = f.dirderiv(t, x, s::Mat3(x * e));
    CHECK((exact - fd).norm() < 1e-5 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("stand-in prior factories produce the advertised shapes") {
  Rng rng(22);
  const Mlp net = make_prior_net(5, rng);
  CHECK(net.input_dim() == 6);  // state plus time
  CHECK(net.output_dim() == 5);
  const Mlp rot = make_so3_prior_net(rng);
  CHECK(rot.input_dim() == 10);  // nine matrix entries plus time
  CHECK(rot.output_dim() == 3);
}
