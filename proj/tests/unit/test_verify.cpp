#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "plap/bvp.hpp"
#include "plap/error.hpp"
#include "plap/ivp.hpp"
#include "plap/verify.hpp"

using namespace plap;

namespace {

const SolutionPair& pair_p(double p) {
  static SolutionPair two, three;
  SolutionPair& s = p == 2.0 ? two : three;
  if (s.grid.n <= 3) {
    bvp::LimitProblem prob;
    prob.p = p;
    s = bvp::minimize_limit(prob);
  }
  return s;
}

SolutionPair reflected(const SolutionPair& s) {
  const int n = s.grid.n;
  Profile U = Profile::zeros(s.grid), V = Profile::zeros(s.grid);
  for (int i = 0; i < n; ++i) {
    U[i] = s.V[n - 1 - i];
    V[i] = s.U[n - 1 - i];
  }
  return SolutionPair::from_profiles(U, V, s.p);
}

}  // namespace

TEST_CASE("first integral of a converged pair") {
  const SolutionPair& s = pair_p(2.0);
  const auto fi = verify::first_integral(s);
  CHECK(fi.level > 0.0);
  CHECK(fi.drift <= 1e-3);
  CHECK(fi.window == doctest::Approx(4.0));

  // Reflection (U, V) -> (V(-x), U(-x)) maps F to F(-x) node for node.
  const auto fr = verify::first_integral(reflected(s));
  const int n = s.grid.n;
  for (int i = 1; i + 1 < n; ++i) CHECK(fr.F[i] == doctest::Approx(fi.F[n - 1 - i]).epsilon(1e-12));

  // Linear profiles without coupling: F = 1 + 1 - 0.
  const Grid g = Grid::uniform(-2.0, 2.0, 41);
  const auto lin = verify::first_integral(SolutionPair::from_profiles(
      Profile::sample(g, [](double x) { return x + 2.0; }), Profile::zeros(g), 2.0));
  CHECK(lin.level == doctest::Approx(1.0));
}

TEST_CASE("symmetry defect") {
  const SolutionPair& s = pair_p(2.0);
  CHECK(verify::symmetry_defect(s) == 0.0);
  SolutionPair t = s;
  t.V[100] += 0.25;
  CHECK(verify::symmetry_defect(t) == doctest::Approx(0.25));
}

TEST_CASE("monotonicity and asymptotes") {
  for (double p : {2.0, 3.0}) {
    const SolutionPair& s = pair_p(p);
    CHECK(verify::monotonicity_report(s).pass());
    const auto a = verify::asymptote_fit(s);
    const double target = std::pow(s.T_inf, 1.0 / p);
    CHECK(std::abs(a.slope_right - target) <= 1e-2 * target);
    CHECK(std::abs(std::pow(a.slope_right, p) - s.T_inf) <= 3e-2 * s.T_inf);
    CHECK(a.b1_hat == doctest::Approx(a.b2_hat).epsilon(1e-8));
  }
  // A decreasing U fails.
  const Grid g = Grid::uniform(-4.0, 4.0, 81);
  const auto bad = SolutionPair::from_profiles(Profile::sample(g, [](double x) { return 4.0 - x; }),
                                               Profile::sample(g, [](double x) { return 4.0 - x; }), 2.0);
  CHECK_FALSE(verify::monotonicity_report(bad).pass());
}

TEST_CASE("gaussian decay on the left window") {
  const auto d = verify::gaussian_decay_fit(pair_p(2.0));
  CHECK(d.r_squared >= 0.99);
  CHECK(d.decay_pass());
  CHECK(d.C_hat / d.c_hat <= 10.0);
  CHECK(d.s_hat > 0.0);

  // Exact Gaussian: fit recovers the rate.
  const Grid g = Grid::uniform(-8.0, 8.0, 801);
  const auto exact = SolutionPair::from_profiles(
      Profile::sample(g, [](double x) { return 0.7 * std::exp(-0.5 * x * x); }), Profile::zeros(g), 2.0);
  const auto e = verify::gaussian_decay_fit(exact);
  CHECK(e.s_hat == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(e.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(verify::gaussian_decay_fit(exact, -20.0, -19.0), WindowEmpty);
}

TEST_CASE("limits at the ends") {
  CHECK(verify::limits_report(pair_p(2.0)).pass());
  const Grid g = Grid::uniform(-8.0, 8.0, 161);
  const auto lin = SolutionPair::from_profiles(Profile::sample(g, [](double x) { return x; }),
                                               Profile::zeros(g), 2.0);
  CHECK(verify::limits_report(lin).max_product == 0.0);
  SolutionPair one = pair_p(2.0);
  for (int i = 0; i < one.grid.n; ++i) one.V[i] = 1.0;
  CHECK_FALSE(verify::limits_report(one).pass());
}

TEST_CASE("linearized operator") {
  const SolutionPair& s = pair_p(2.0);
  const auto op = verify::linearize(s);
  CHECK(op.dimension == 2 * (s.grid.n - 2));

  // p = 2: the principal part is the plain second difference.
  const double h2 = s.grid.h * s.grid.h;
  const int m = s.grid.n - 2;
  for (int r = 1; r + 1 < m; ++r) {
    CHECK(op.at(r, r - 1) == doctest::Approx(1.0 / h2));
    CHECK(op.at(r, r + 1) == doctest::Approx(1.0 / h2));
    CHECK(op.at(r, m + r) == doctest::Approx(op.at(m + r, r)));
  }

  CHECK(verify::operator_residual(op, verify::translation_mode(s)) <= 1e-3);
  CHECK(verify::operator_residual(op, verify::amplitude_mode(s)) > 1e-2);

  const auto op3 = verify::linearize(pair_p(3.0));
  CHECK(verify::operator_residual(op3, verify::translation_mode(pair_p(3.0))) <= 1e-3);
}

TEST_CASE("kernel check and row scaling") {
  const SolutionPair& s = pair_p(2.0);
  const auto op = verify::linearize(s);
  const auto k = verify::kernel_check(op, s);
  CHECK(k.pass);
  CHECK(k.gap >= 1e2);
  CHECK(k.cosine >= 0.99);

  auto scaled = op;
  for (int r = 0; r < op.dimension; r += 2)
    for (int c = 0; c < op.dimension; ++c) scaled.at(r, c) *= 1e3;
  const auto ks = verify::kernel_check(scaled, s);
  CHECK(ks.pass == k.pass);
  CHECK(ks.cosine == doctest::Approx(k.cosine).epsilon(1e-6));

  auto shifted = op;
  for (int r = 0; r < op.dimension; ++r) shifted.at(r, r) += 0.1 * op.zeroth_order_scale;
  CHECK_FALSE(verify::kernel_check(shifted, s).pass);
}

TEST_CASE("comparison principle") {
  const auto P = ivp::perron_construct(2.0, 6.0, 601);
  const Profile& W = P.y;
  const Profile a = Profile::sample(W.grid, [](double x) { return x * x; });

  Profile V = W;
  for (int i = 0; i < V.size(); ++i) V[i] *= 0.9;
  const auto r = verify::comparison_test(V, W, a, 0, 2.0, 1e-6);
  CHECK(r.pass);
  CHECK(r.max_excess <= 0.0);

  CHECK(verify::comparison_test(W, W, a, 0, 2.0, 1e-6).pass);

  // Swapping a strict pair: V is no longer below W at the start node.
  CHECK_THROWS_AS(verify::comparison_test(W, V, a, 0, 2.0, 1e-6), HypothesisViolated);

  Profile big = W;
  for (int i = 0; i < big.size(); ++i) big[i] *= 1.5;
  CHECK_THROWS_AS(verify::comparison_test(big, W, a, 0, 2.0, 1e-6), HypothesisViolated);

  // A convex growing profile is not a supersolution near the origin.
  const Profile grow = Profile::sample(W.grid, [](double x) { return std::exp(x); });
  CHECK_THROWS_AS(verify::comparison_test(V, grow, a, 0, 2.0), HypothesisViolated);
}
