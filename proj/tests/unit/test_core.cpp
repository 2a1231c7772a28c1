#include <doctest.h>

#include <cmath>

#include "plap/core.hpp"
#include "plap/error.hpp"

using namespace plap;
using doctest::Approx;

TEST_CASE("phi_p closed forms") {
  CHECK(phi_p(2.0, 3.0) == Approx(4.0));
  CHECK(phi_p(0.0, 1.5) == 0.0);
  CHECK(phi_p(-0.5, 1.5) == Approx(-std::sqrt(0.5)).epsilon(1e-14));
  CHECK(phi_p_inv(4.0, 3.0) == Approx(2.0));
  CHECK(phi_p_inv(0.0, 2.7) == 0.0);
  CHECK(phi_p_inv(-1.0, 1.5) == Approx(-1.0));
  CHECK(phi_p_reg(1.0, 2.0, 0.1) == Approx(1.0));
  CHECK(phi_p_reg(0.0, 1.5, 0.01) == 0.0);
  CHECK(phi_p_reg(3.0, 3.0, 4.0) == Approx(15.0));
}

TEST_CASE("phi_p is odd, increasing and inverted by phi_p_inv") {
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.0}) {
    double prev = -INFINITY;
    for (int k = -60; k <= 60; ++k) {
      const double s = std::copysign(std::pow(10.0, std::abs(k) / 10.0), k) * (k == 0 ? 0.0 : 1.0);
      CHECK(phi_p(-s, p) == -phi_p(s, p));
      CHECK(phi_p(s, p) > prev);
      prev = phi_p(s, p);
      if (std::abs(s) >= 1e-6) CHECK(std::abs(phi_p_inv(phi_p(s, p), p) - s) <= 1e-12 * std::abs(s));
    }
  }
}

TEST_CASE("phi_p_reg converges to phi_p as eps vanishes") {
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.0})
    for (double s : {-5.0, -0.3, -1e-2, 1e-2, 0.7, 12.0})
      CHECK(std::abs(phi_p_reg(s, p, 1e-8) - phi_p(s, p)) <= 1e-6);
}

TEST_CASE("phi_p_reg_slope matches a difference quotient") {
  for (double p : {1.5, 2.5, 3.0})
    for (double s : {-2.0, -0.1, 0.0, 0.3, 1.7}) {
      const double h = 1e-6, eps = 0.05;
      const double fd = (phi_p_reg(s + h, p, eps) - phi_p_reg(s - h, p, eps)) / (2 * h);
      CHECK(phi_p_reg_slope(s, p, eps) == Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("grid validation and node reconstruction") {
  CHECK_THROWS_AS(Grid::uniform(1.0, 1.0, 5), InvalidArgument);
  CHECK_THROWS_AS(Grid::uniform(0.0, 1.0, 2), InvalidArgument);
  const Grid g = Grid::uniform(-2.0, 3.0, 11);
  CHECK(g.h == Approx(0.5));
  CHECK(g.x(4) == Approx(0.0));
  CHECK(g.nearest(0.26) == 5);
  CHECK_THROWS_AS(Profile(g, std::vector<double>(10, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(Profile(g, std::vector<double>(11, NAN)), InvalidArgument);
}

TEST_CASE("diff_forward on polynomials") {
  const Grid g = Grid::uniform(0.0, 1.0, 101);
  for (double d : diff_forward(Profile::sample(g, [](double) { return 3.0; }))) CHECK(d == 0.0);
  for (double d : diff_forward(Profile::sample(g, [](double x) { return x; }))) CHECK(d == Approx(1.0));
  const auto sq = diff_forward(Profile::sample(g, [](double x) { return x * x; }));
  for (int i = 0; i < 100; ++i) CHECK(sq[i] == Approx(2 * g.x(i) + g.h).epsilon(1e-10));
}

TEST_CASE("diff_central is exact on quadratics including the ends") {
  const Grid g = Grid::uniform(-1.0, 2.0, 31);
  const auto d = diff_central(Profile::sample(g, [](double x) { return x * x - x; }));
  for (int i = 0; i < g.n; ++i) CHECK(d[i] == Approx(2 * g.x(i) - 1).epsilon(1e-10));
}

TEST_CASE("quadrature") {
  const Grid g = Grid::uniform(0.0, 1.0, 101);
  CHECK(quad_trapezoid(Profile::sample(g, [](double) { return 1.0; })) == Approx(1.0));
  CHECK(quad_trapezoid(Profile::sample(g, [](double x) { return x; })) == Approx(0.5));
  const double q = quad_trapezoid(Profile::sample(g, [](double x) { return x * x; }));
  CHECK(std::abs(q - 1.0 / 3.0) <= 2e-5);
  const std::vector<double> cells(100, 2.0);
  CHECK(quad_midpoint(cells, g.h) == Approx(2.0));
  double tw = 0;
  for (double w : trapezoid_weights(g)) tw += w;
  CHECK(tw == Approx(1.0));
}

TEST_CASE("trapezoid rule is second order") {
  auto err = [](int n) {
    const Grid g = Grid::uniform(0.0, 1.0, n);
    return std::abs(quad_trapezoid(Profile::sample(g, [](double x) { return x * x; })) - 1.0 / 3.0);
  };
  const double ratio = err(51) / err(101);
  CHECK(ratio == Approx(4.0).epsilon(0.05));
}

TEST_CASE("lp_norm") {
  const Grid g = Grid::uniform(0.0, 1.0, 1001);
  CHECK(lp_norm(Profile::sample(g, [](double) { return 1.0; }), 2.0) == Approx(1.0));
  CHECK(lp_norm(Profile::zeros(g), 2.0) == 0.0);
  CHECK(std::abs(lp_norm(Profile::sample(g, [](double x) { return x; }), 3.0) - std::cbrt(0.25)) <= 1e-4);
  CHECK_THROWS_AS(lp_norm(Profile::zeros(g), 0.5), InvalidArgument);
}
