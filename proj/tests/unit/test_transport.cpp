#include <doctest.h>

#include <stdexcept>

#include <random>

#include "hyprec/transport.hpp"
#include "transport_oracle.hpp"

using namespace hyprec;

namespace {

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (double& x : v) s += (x = u(rng));
  for (double& x : v) x /= s;
  return v;
}

}  // namespace

TEST_CASE("point masses cost their distance") {
  Matrix c(1, 1);
  c(0, 0) = 2.5;
  CHECK(wasserstein1(std::vector<double>{1.0}, std::vector<double>{1.0}, c) == 2.5);
}

TEST_CASE("transport plan has the right marginals") {
  std::mt19937_64 rng(2);
  const auto mu = random_simplex(rng, 5);
  const auto nu = random_simplex(rng, 3);
  Matrix cost(5, 3);
  for (double& x : cost.data) x = std::uniform_int_distribution<int>(0, 3)(rng);
  const Matrix plan = transport_plan(mu, nu, cost);
  double total = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(plan(i, j) >= 0.0);
      row += plan(i, j);
      total += plan(i, j) * cost(i, j);
    }
    CHECK(row == doctest::Approx(mu[i]).epsilon(1e-12));
  }
  CHECK(total == doctest::Approx(wasserstein1(mu, nu, cost)).epsilon(1e-12));
}

TEST_CASE("simplex agrees with exhaustive basis enumeration") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + trial % 4, n = 1 + (trial / 4) % 4;
    const auto mu = random_simplex(rng, m);
    const auto nu = random_simplex(rng, n);
    Matrix cost(m, n);
    for (double& x : cost.data) x = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    CHECK(wasserstein1(mu, nu, cost) == doctest::Approx(testing::brute_force_w1(mu, nu, cost)).epsilon(1e-9));
  }
}

TEST_CASE("degenerate problems with ties terminate") {
  // Uniform masses and integer costs produce degenerate bases.
  const std::vector<double> mu(6, 1.0 / 6.0), nu(6, 1.0 / 6.0);
  Matrix cost(6, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) cost(i, j) = (i == j) ? 0.0 : 1.0 + static_cast<double>((i + j) % 2);
  }
  CHECK(wasserstein1(mu, nu, cost) == doctest::Approx(0.0));
}

TEST_CASE("input validation") {
  Matrix c(2, 2);
  CHECK_THROWS_AS(wasserstein1(std::vector<double>{0.5, 0.4}, std::vector<double>{0.5, 0.5}, c), std::invalid_argument);
  CHECK_THROWS_AS(wasserstein1(std::vector<double>{1.5, -0.5}, std::vector<double>{0.5, 0.5}, c), std::invalid_argument);
  CHECK_THROWS_AS(wasserstein1(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}, c), std::invalid_argument);
  const std::vector<double> big(5, 0.2);
  CHECK_THROWS_AS(wasserstein1(big, big, Matrix(5, 5), 4), std::invalid_argument);
}
