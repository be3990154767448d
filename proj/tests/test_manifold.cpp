#include <cmath>
#include <numbers>

#include "aiml/errors.hpp"
#include "aiml/manifold.hpp"
#include "doctest.h"

using namespace aiml;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("manifold") {

TEST_CASE("torus embedding evaluates the closed form") {
  const auto spec = ManifoldSpec::torus();
  const Eigen::VectorXd a = embed_point(spec, 0.0, 0.0);
  CHECK(a(0) == doctest::Approx(15.0).epsilon(1e-15));
  CHECK(a(1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(a(2) == doctest::Approx(0.0).epsilon(1e-15));

  const Eigen::VectorXd b = embed_point(spec, kPi, kPi / 2);
  CHECK(b(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b(1) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(std::abs(b(2)) < 1e-12);
}

TEST_CASE("swiss roll 1 embedding") {
  const auto spec = ManifoldSpec::swiss_roll1();
  const Eigen::VectorXd x = embed_point(spec, 2 * kPi, 5.0);
  CHECK(x(0) == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(std::abs(x(1)) < 1e-13);
  CHECK(x(2) == doctest::Approx(5.0));
}

TEST_CASE("out-of-range latents are a domain error") {
  const auto spec = ManifoldSpec::swiss_roll1();
  CHECK_THROWS_AS(embed_point(spec, 0.5, 5.0), DomainError);  // phi below 1.5pi
  CHECK_THROWS_AS(embed_point(spec, 2 * kPi, 11.0), DomainError);
}

TEST_CASE("latents land in the declared ranges") {
  const auto spec = ManifoldSpec::torus();
  auto [phi, psi] = sample_latents(spec, 400, 3, 7);
  REQUIRE(phi.size() == 400);
  REQUIRE(psi.rows() == 400);
  REQUIRE(psi.cols() == 3);
  CHECK(phi.minCoeff() >= 0.0);
  CHECK(phi.maxCoeff() < 2 * kPi);
  CHECK(psi.minCoeff() >= 0.0);
  CHECK(psi.maxCoeff() < 2 * kPi);

  auto [phi2, psi2] = sample_latents(spec, 2, 1, 0);
  CHECK(phi2.size() == 2);
  CHECK(psi2.rows() == 2);
  CHECK(psi2.cols() == 1);
}

TEST_CASE("mean of cos(phi) matches the Monte Carlo bound") {
  const auto spec = ManifoldSpec::torus();
  auto [phi, psi] = sample_latents(spec, 10000, 1, 1);
  const double mean = phi.array().cos().mean();
  CHECK(std::abs(mean) < 3.0 / std::sqrt(2.0 * 10000));  // var(cos) = 1/2
}

TEST_CASE("degenerate sizes are configuration errors") {
  const auto spec = ManifoldSpec::torus();
  CHECK_THROWS_AS(sample_latents(spec, 1, 1, 0), ConfigError);
  CHECK_THROWS_AS(sample_latents(spec, 2, 0, 0), ConfigError);
  CHECK_THROWS_AS(ManifoldSpec::torus(-1.0, 5.0), ConfigError);
}

TEST_CASE("generated datasets have the documented shape") {
  const auto ds = generate_dataset(ManifoldSpec::torus(), 400, 3, 11);
  CHECK(ds.points.rows() == 1200);
  CHECK(ds.points.cols() == 3);
  CHECK(ds.has_latents());
}

TEST_CASE("clifford torus points sit on the sphere of radius sqrt(2)") {
  const auto ds = generate_dataset(ManifoldSpec::clifford_torus(), 100, 2, 5);
  for (int i = 0; i < ds.points.rows(); ++i) {
    CHECK(ds.points.row(i).norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("swiss roll 2 keeps x3 in the phi range") {
  const auto ds = generate_dataset(ManifoldSpec::swiss_roll2(), 300, 3, 9);
  CHECK(ds.points.col(2).minCoeff() >= 0.0);
  CHECK(ds.points.col(2).maxCoeff() < 10.0);
}

TEST_CASE("fiber property: x3 is constant across views of a torus sample") {
  const auto ds = generate_dataset(ManifoldSpec::torus(), 50, 4, 3);
  for (int i = 0; i < ds.m; ++i) {
    for (int j = 1; j < ds.n; ++j) {
      CHECK(ds.view(i, j)(2) == ds.view(i, 0)(2));  // same phi, exact bits
    }
  }
}

TEST_CASE("re-embedding stored latents reproduces stored points exactly") {
  const auto ds = generate_dataset(ManifoldSpec::swiss_roll1(), 40, 3, 21);
  for (int i = 0; i < ds.m; ++i) {
    for (int j = 0; j < ds.n; ++j) {
      const Eigen::VectorXd p =
          embed_point(*ds.spec, ds.latent_phi(i), ds.latent_psi(i, j));
      CHECK((p.transpose() - ds.view(i, j)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("identical seeds reproduce datasets bit for bit") {
  const auto a = generate_dataset(ManifoldSpec::torus(), 30, 2, 77);
  const auto b = generate_dataset(ManifoldSpec::torus(), 30, 2, 77);
  CHECK((a.points.array() == b.points.array()).all());
  CHECK((a.latent_phi.array() == b.latent_phi.array()).all());
  const auto c = generate_dataset(ManifoldSpec::torus(), 30, 2, 78);
  CHECK(!(a.points.array() == c.points.array()).all());
}

TEST_CASE("degenerate regressions pin every label") {
  const auto ds = generate_dataset(ManifoldSpec::torus(), 50, 2, 1);
  const auto all_pos = assign_labels(ds, [](double) { return 1.0; }, "one", 2);
  for (int y : all_pos.labels) CHECK(y == 1);
  const auto all_neg = assign_labels(ds, [](double) { return 0.0; }, "zero", 2);
  for (int y : all_neg.labels) CHECK(y == -1);
  // designated view is the representative feature
  CHECK((all_pos.features.row(0).array() == ds.view(0, 0).array()).all());
}

TEST_CASE("label marginal matches the mean of |sin| within 3 sigma") {
  const auto ds = generate_dataset(ManifoldSpec::torus(), 10000, 1, 13);
  const auto labeled = assign_labels(ds, sine_regression(1), "|sin|", 4);
  int pos = 0;
  for (int y : labeled.labels) pos += y == 1;
  const double p = 2.0 / kPi;
  const double sigma = std::sqrt(p * (1.0 - p) / 10000);
  CHECK(std::abs(pos / 10000.0 - p) < 3.0 * sigma);
}

TEST_CASE("regression outside [0,1] is a domain error") {
  const auto ds = generate_dataset(ManifoldSpec::torus(), 10, 2, 1);
  CHECK_THROWS_AS(assign_labels(ds, [](double) { return 1.5; }, "bad", 1),
                  DomainError);
}

TEST_CASE("sine_regression table values") {
  CHECK(sine_regression(1)(kPi / 2) == doctest::Approx(1.0));
  CHECK(sine_regression(2)(kPi / 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sine_regression(4)(kPi / 8) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sine_regression(0), ConfigError);
}

}  // TEST_SUITE
