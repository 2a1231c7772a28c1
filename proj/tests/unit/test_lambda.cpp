#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "plap/bvp.hpp"
#include "plap/error.hpp"
#include "plap/lambda.hpp"
#include "plap/verify.hpp"

using namespace plap;

namespace {

lambda::LambdaParams params(double Lambda, double p = 2.0) {
  lambda::LambdaParams P;
  P.p = p;
  P.Lambda = Lambda;
  return P;
}

double overlap(const lambda::LambdaSolution& s, double p) {
  std::vector<double> w(s.u.size());
  for (int i = 0; i < s.u.size(); ++i) w[i] = std::pow(s.u[i], p) * std::pow(s.v[i], p);
  return quad_trapezoid(Profile(s.u.grid, w));
}

// Smallest eigenvalue of the symmetric tridiagonal matrix (2, -1)/h^2 by bisection on the
// Sturm sequence count.
double smallest_dirichlet_eigenvalue(int m, double h) {
  const double d = 2.0 / (h * h), e = -1.0 / (h * h);
  auto count_below = [&](double x) {
    int c = 0;
    double q = d - x;
    if (q < 0) ++c;
    for (int i = 1; i < m; ++i) {
      if (q == 0.0) q = 1e-300;
      q = d - x - e * e / q;
      if (q < 0) ++c;
    }
    return c;
  };
  double lo = 0.0, hi = 4.0 / (h * h);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (count_below(mid) >= 1 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(params(100.0).validate());
  CHECK_THROWS_AS(params(-5.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(params(1.0, 0.9).validate(), InvalidArgument);
  auto P = params(1.0);
  P.b = P.a;
  CHECK_THROWS_AS(P.validate(), InvalidArgument);
  P = params(1.0);
  P.alpha = -1.0;
  CHECK_THROWS_AS(P.validate(), InvalidArgument);
}

TEST_CASE("energy closed forms") {
  auto P = params(0.0);
  P.a = 0.0;
  const Grid g = Grid::uniform(0.0, 1.0, 101);
  CHECK(lambda::energy_lambda(Profile::zeros(g), Profile::zeros(g), P, 0.0) == 0.0);

  // Constant u with zero v: only the alpha term survives.
  const double c = 1.3;
  const Profile u = Profile::sample(g, [&](double) { return c; });
  CHECK(lambda::energy_lambda(u, Profile::zeros(g), P, 0.0) == doctest::Approx(std::pow(c, 4) / 4).epsilon(1e-12));

  // Linearity in Lambda.
  const Profile a = Profile::sample(g, [](double x) { return std::sin(std::numbers::pi * x); });
  const Profile b = Profile::sample(g, [](double x) { return x * (1 - x) * 4; });
  auto P10 = P;
  P10.Lambda = 10.0;
  std::vector<double> w(g.n);
  for (int i = 0; i < g.n; ++i) w[i] = a[i] * a[i] * b[i] * b[i];
  const double coupling = quad_trapezoid(Profile(g, w));
  CHECK(lambda::energy_lambda(a, b, P10, 1e-3) - lambda::energy_lambda(a, b, P, 1e-3) ==
        doctest::Approx(10.0 / 2.0 * coupling).epsilon(1e-10));
}

TEST_CASE("gradient against finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.05, 1.5);
  for (double p : {1.5, 2.0, 2.5}) {
    auto P = params(50.0, p);
    P.n = 31;
    const Grid g = Grid::uniform(P.a, P.b, P.n);
    for (int trial = 0; trial < 4; ++trial) {
      Profile u = Profile::zeros(g), v = Profile::zeros(g);
      for (int i = 1; i + 1 < g.n; ++i) {
        u[i] = dist(rng);
        v[i] = dist(rng);
      }
      CHECK(verify::gradient_fd_check_lambda(u, v, P, p < 2 ? 1e-2 : 1e-3) <= 1e-5);
    }
  }
}

TEST_CASE("decoupled problem at Lambda = 0") {
  const auto s = lambda::minimize_lambda(params(0.0));
  CHECK(sup_distance(s.u.values, s.v.values) <= 1e-6);
  CHECK(s.lambda1 == doctest::Approx(s.lambda2).epsilon(1e-8));
  CHECK(lp_norm(s.u, 2.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.u[0] == 0.0);
  CHECK(s.u[s.u.size() - 1] == 0.0);
}

TEST_CASE("principal eigenvalue from the multiplier identity") {
  auto P = params(0.0);
  P.alpha = P.beta = 0.0;
  P.a = 0.0;
  P.b = std::numbers::pi;
  P.n = 201;
  const auto s = lambda::minimize_lambda(P);
  const double h = P.b / (P.n - 1);
  const double oracle = smallest_dirichlet_eigenvalue(P.n - 2, h);
  CHECK(s.lambda1 == doctest::Approx(oracle).epsilon(1e-3));
  CHECK(s.lambda1 == doctest::Approx(1.0).epsilon(1e-3));

  // alpha shift: lambda1 moves by exactly d_alpha int u^{p+2}.
  auto Q = P;
  Q.alpha = 0.5;
  std::vector<double> w(s.u.size());
  for (int i = 0; i < s.u.size(); ++i) w[i] = std::pow(s.u[i], 4);
  const double shift = 0.5 * quad_trapezoid(Profile(s.u.grid, w));
  CHECK(lambda::multipliers(s.u, s.v, Q).first - lambda::multipliers(s.u, s.v, P).first ==
        doctest::Approx(shift).epsilon(1e-10));
}

TEST_CASE("segregation and residual self-check") {
  const auto s1 = lambda::minimize_lambda(params(1.0));
  const auto s100 = lambda::minimize_lambda(params(100.0));
  CHECK(overlap(s100, 2.0) < overlap(s1, 2.0));
  for (const auto* s : {&s1, &s100}) {
    CHECK(s->residual <= 10 * 1e-9);
    CHECK(s->T_Lambda > 0.0);
    for (int i = 0; i < s->u.size(); ++i) {
      CHECK(s->u[i] >= 0.0);
      CHECK(s->v[i] >= 0.0);
    }
    CHECK(lp_norm(s->v, 2.0) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("first integral drift refines with the mesh") {
  auto P = params(100.0);
  const auto a = lambda::minimize_lambda(P);
  P.n = 1601;
  const auto b = lambda::minimize_lambda(P);
  CHECK(b.T_drift < a.T_drift / 3.0);
  CHECK(b.T_Lambda == doctest::Approx(a.T_Lambda).epsilon(1e-3));
}

TEST_CASE("blow-up extraction") {
  const auto P = params(1000.0);
  const auto s = lambda::minimize_lambda(P);
  const auto b = lambda::blowup_extract(s, P);
  CHECK(b.root_count >= 1);
  CHECK(b.x_Lambda > P.a);
  CHECK(b.x_Lambda < P.b);
  CHECK(b.m_Lambda > 0.0);
  CHECK(b.scale_invariant == doctest::Approx(1000.0 * std::pow(b.m_Lambda, 4)));
  const int c = b.rescaled_u.grid.nearest(0.0);
  CHECK(b.rescaled_u[c] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(b.rescaled_v[c] == doctest::Approx(1.0).epsilon(1e-3));
  for (int i = 0; i < b.rescaled_u.size(); ++i) CHECK(b.rescaled_u[i] >= 0.0);

  // No sign change of u - v.
  lambda::LambdaSolution flat = s;
  flat.v = flat.u;
  for (int i = 1; i + 1 < flat.v.size(); ++i) flat.v.values[i] *= 0.5;
  CHECK_THROWS_AS(lambda::blowup_extract(flat, P), NoCrossing);
}

TEST_CASE("sweep trend") {
  const auto rep = lambda::lambda_sweep(params(100.0), {100.0, 1000.0, 10000.0});
  REQUIRE(rep.entries.size() == 3);
  const auto& e = rep.entries;
  for (int k = 0; k < 3; ++k) {
    CHECK(e[k].T_Lambda > 0.0);
    CHECK(std::abs(e[k].T_Lambda - e[0].T_Lambda) <= 0.5 * e[0].T_Lambda);
  }
  for (int k = 1; k < 3; ++k) {
    CHECK(e[k].edge_scale > e[k - 1].edge_scale);
    CHECK(e[k].rescaled_distance <= e[k - 1].rescaled_distance);
    CHECK(e[k].scale_invariant <= 1.5 * e[0].scale_invariant);
    CHECK(e[k].scale_invariant >= 0.5 * e[0].scale_invariant);
  }
  CHECK_THROWS_AS(lambda::lambda_sweep(params(100.0), {1000.0, 100.0}), InvalidArgument);
}
