#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qcmi/density.hpp"
#include "support.hpp"

using namespace qcmi;

TEST_SUITE("density") {

TEST_CASE("bandwidth rule") {
  CHECK(bandwidth_rule(1024, 1, 1) == doctest::Approx(0.5 * std::pow(1024.0, -1.0 / 7)).epsilon(1e-14));
  CHECK(bandwidth_rule(1024, 1, 1) == doctest::Approx(0.1856).epsilon(1e-3));
  CHECK(bandwidth_rule(128, 2, 1) == doctest::Approx(0.2906).epsilon(1e-3));
  CHECK_THROWS(bandwidth_rule(1, 1, 1));
}

TEST_CASE("single kernel peak") {
  for (int d = 1; d <= 3; ++d) {
    const KdeModel model(Matrix::Zero(1, d), 1.0);
    CHECK(model.density(Vector::Zero(d)) == doctest::Approx(std::pow(2 * std::numbers::pi, -d / 2.0)).epsilon(1e-14));
  }
}

TEST_CASE("uniform square center") {
  double acc = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const Matrix s = qcmi::test::uniform_matrix(rng, 10000, 2);
    const KdeModel model(s, bandwidth_rule(10000, 1, 1));
    acc += model.density(Eigen::Vector2d(0.5, 0.5));
  }
  CHECK(std::abs(acc / 5 - 1.0) < 0.15);
}

TEST_CASE("leave out removes one contribution") {
  // Two copies of the origin and one far point; query at the origin.
  Matrix s(3, 1);
  s << 0, 0, 10;
  const double h = 0.5;
  const KdeModel model(s, h);
  const double peak = 1.0 / (h * std::sqrt(2 * std::numbers::pi));
  const double far = peak * std::exp(-0.5 * 400.0);
  CHECK(model.density(Vector::Zero(1)) == doctest::Approx((2 * peak + far) / 3).epsilon(1e-14));
  CHECK(model.density(Vector::Zero(1), 0) == doctest::Approx((peak + far) / 2).epsilon(1e-14));
  CHECK(model.density(Vector::Zero(1), 1) == model.density(Vector::Zero(1), 0));
}

TEST_CASE("underflow is an error") {
  const KdeModel model(Matrix::Zero(4, 1), 0.01);
  CHECK_THROWS_AS(model.density(Vector::Constant(1, 1e3)), std::range_error);
}

TEST_CASE("Monte Carlo normalization") {
  Rng rng(21);
  Matrix s(2000, 2);
  for (Eigen::Index r = 0; r < s.rows(); ++r) s.row(r) << rng.normal(), rng.normal(0.0, 0.5);
  const KdeModel model(s, bandwidth_rule(2000, 1, 1));
  const Eigen::Vector2d lo(-7, -4), hi(7, 4);
  const double volume = (hi - lo).prod();
  double acc = 0.0;
  constexpr int kDraws = 100000;
  for (int t = 0; t < kDraws; ++t) {
    const Eigen::Vector2d u(rng.uniform(lo(0), hi(0)), rng.uniform(lo(1), hi(1)));
    acc += model.density(u);
  }
  CHECK(std::abs(acc / kDraws * volume - 1.0) < 0.02);
}

TEST_CASE("sample order does not change any evaluation") {
  Rng rng(8);
  const Matrix s = qcmi::test::uniform_matrix(rng, 500, 2);
  Matrix reversed = s.colwise().reverse();
  const KdeModel a(s, 0.1), b(reversed, 0.1);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Vector2d q(rng.uniform(), rng.uniform());
    CHECK(a.density(q) == b.density(q));
  }
  // Row 0 of `s` is row 499 of `reversed`.
  CHECK(a.density(s.row(0).transpose(), 0) == b.density(s.row(0).transpose(), 499));
}

}
