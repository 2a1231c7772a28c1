#include <doctest.h>

#include <cmath>
#include <vector>

#include "plap/core.hpp"
#include "plap/error.hpp"
#include "plap/ivp.hpp"

using namespace plap;
using namespace plap::ivp;

namespace {

// Classical RK4 for y' = w, w' = x^2 y (the p = 2 equation), fixed step.
std::pair<double, double> rk4_linear(double y, double w, double x0, double x1, double h) {
  const int steps = static_cast<int>(std::llround((x1 - x0) / h));
  h = (x1 - x0) / steps;
  double x = x0;
  auto f = [](double xx, double yy, double ww) { return std::pair{ww, xx * xx * yy}; };
  for (int k = 0; k < steps; ++k) {
    auto [a1, b1] = f(x, y, w);
    auto [a2, b2] = f(x + h / 2, y + h / 2 * a1, w + h / 2 * b1);
    auto [a3, b3] = f(x + h / 2, y + h / 2 * a2, w + h / 2 * b2);
    auto [a4, b4] = f(x + h, y + h * a3, w + h * b3);
    y += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    w += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
    x += h;
  }
  return {y, w};
}

IvpSpec base(double p, double y0, double y1, double x_max) {
  IvpSpec s;
  s.p = p;
  s.y0 = y0;
  s.y1 = y1;
  s.x_max = x_max;
  return s;
}

}  // namespace

TEST_CASE("picard_map on constant data") {
  const Grid g = Grid::uniform(0.0, 0.1, 201);
  const Profile zero = Profile::zeros(g);
  CHECK(sup_norm(picard_map(zero, base(2, 0, 0, 1)).values) == 0.0);

  const Profile one = Profile::sample(g, [](double) { return 1.0; });
  const Profile t1 = picard_map(one, base(2, 1, 0, 1));
  const Profile t2 = picard_map(one, base(2, 1, 1, 1));
  CHECK(t1[0] == 1.0);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    CHECK(std::abs(t1[i] - (1 + std::pow(x, 4) / 12)) <= 1e-6);
    CHECK(std::abs(t2[i] - (1 + x + std::pow(x, 4) / 12)) <= 1e-6);
  }
}

TEST_CASE("picard_solve_local matches the fine-step oracle at p=2") {
  const IvpSpec s = base(2, 1, 0, 1);
  const PicardResult r = picard_solve_local(s, 0.3);
  CHECK(r.contraction_ratio <= 0.5);
  for (int i = 0; i < r.y.size(); i += 40) {
    const double x = r.y.grid.x(i);
    const double ref = i == 0 ? 1.0 : rk4_linear(1.0, 0.0, 0.0, x, 1e-5).first;
    CHECK(std::abs(r.y[i] - ref) <= 1e-6);
  }
}

TEST_CASE("picard_solve_local degenerate seed") {
  const PicardResult r = picard_solve_local(base(2, 0, 0, 1), 0.5);
  CHECK(r.iterations == 1);
  CHECK(r.y.max_abs() == 0.0);
}

TEST_CASE("picard fixed point in the singular case p=1.5") {
  const IvpSpec s = base(1.5, 1, 0, 1);
  const PicardResult r = picard_solve_auto(s, 0.5);
  CHECK(r.contraction_ratio < 0.9);
  const Profile again = picard_map(r.y, s);
  CHECK(sup_distance(again.values, r.y.values) <= 10 * s.tol);
}

TEST_CASE("ivp_solve degenerate and negated data") {
  const Trajectory z = ivp_solve(base(2, 0, 0, 3));
  CHECK(z.status == Status::identically_zero);
  for (double v : z.y) CHECK(v == 0.0);

  const Trajectory neg = ivp_solve(base(2, -1, 0, 2));
  CHECK(neg.status == Status::sign_classified_negative);
  for (double v : neg.y) CHECK(v <= 0.0);
}

TEST_CASE("ivp_solve p=2 matches the fine-step oracle") {
  const Trajectory t = ivp_solve(base(2, 1, 0, 2));
  CHECK(t.status == Status::reached_xmax);
  CHECK(t.nodes.back() == 2.0);
  const double ref = rk4_linear(1.0, 0.0, 0.0, 2.0, 1e-5).first;
  CHECK(std::abs(t.y.back() - ref) <= 1e-5 * ref);
  for (std::size_t i = 1; i < t.nodes.size(); ++i) {
    CHECK(t.nodes[i] > t.nodes[i - 1]);
    CHECK(t.y[i] >= t.y[i - 1]);
    CHECK(t.dy[i] >= t.dy[i - 1]);
  }
}

TEST_CASE("odd symmetry of ivp_solve") {
  for (double p : {1.5, 2.0, 3.0}) {
    const Trajectory a = ivp_solve(base(p, 0.7, -0.4, 2));
    const Trajectory b = ivp_solve(base(p, -0.7, 0.4, 2));
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
      CHECK(a.nodes[i] == b.nodes[i]);
      CHECK(a.y[i] == -b.y[i]);
      CHECK(a.dy[i] == -b.dy[i]);
    }
  }
}

TEST_CASE("phi_p(y') is nondecreasing while y > 0") {
  for (double p : {1.5, 2.0, 3.0}) {
    const Trajectory t = ivp_solve(base(p, 1.0, -0.5, 2.5));
    for (std::size_t i = 1; i < t.nodes.size(); ++i)
      if (t.y[i] > 0 && t.y[i - 1] > 0) CHECK(phi_p(t.dy[i], p) >= phi_p(t.dy[i - 1], p) - 1e-12);
  }
}

TEST_CASE("Picard window agrees with the regular integrator") {
  IvpSpec s = base(2, 1, 0.5, 1);
  const PicardResult r = picard_solve_local(s, 0.2, 2001);
  s.x_max = 0.2;
  const Trajectory t = ivp_solve(s);
  CHECK(std::abs(t.y.back() - r.y.values.back()) <= 1e-7);
}

TEST_CASE("shoot_decaying p=2") {
  const ShootResult a = shoot_decaying(2.0, -2.0, 10.0);
  const Trajectory& t = a.trajectory;
  CHECK(t.dy.front() == -2.0);
  CHECK(t.y.back() <= 1e-3);
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    CHECK(t.y[i] > 0.0);
    if (i > 0) CHECK(t.y[i] < t.y[i - 1]);
  }
  // Uniqueness: nearby initial values fall on opposite sides of the dichotomy.
  IvpSpec s = base(2.0, a.y0 * (1 - 1e-9), -2.0, 10.0);
  CHECK(classify(s) == Classification::went_negative);
  s.y0 = a.y0 * (1 + 1e-9);
  CHECK(classify(s) == Classification::turned_increasing);

  const ShootResult b = shoot_decaying(2.0, -4.0, 10.0);
  CHECK(std::abs(b.y0 - 2 * a.y0) <= 1e-3 * 2 * a.y0);
}

TEST_CASE("shoot_decaying rejects bad brackets") {
  CHECK_THROWS_AS(shoot_decaying(2.0, -2.0, 10.0, std::pair{10.0, 20.0}), BracketInvalid);
}

TEST_CASE("shoot_decaying p=3 residual") {
  const ShootResult r = shoot_decaying(3.0, -1.0, 6.0);
  const Trajectory& t = r.trajectory;
  for (std::size_t i = 1; i < t.nodes.size(); ++i) CHECK(t.y[i] < t.y[i - 1]);
  const Grid g = Grid::uniform(0.0, 4.0, 801);
  const Profile y = Profile::sample(g, [&](double x) { return t.value_at(x); });
  const auto res = discrete_residual(y, 3.0);
  CHECK(sup_norm(res) <= 1e-4);
}

TEST_CASE("scaled_decaying") {
  const Trajectory id = scaled_decaying({1.0, 1.0}, 2.0, 8.0);
  const ShootResult u = shoot_decaying(2.0, -1.0, 8.0);
  CHECK(std::abs(id.y.front() - u.y0) <= 1e-12);

  const Trajectory w = scaled_decaying({2.0, 2.0}, 2.0, 6.0);
  CHECK(w.dy.front() == doctest::Approx(-2.0));
  CHECK(w.y.front() == doctest::Approx(2.0 / std::sqrt(2.0) * u.y0));

  const double p = 1.5;
  const double beta = 1.0 / (1.0 + std::pow(2.0, 1.0 / (p - 1.0)));
  const Trajectory b = scaled_decaying({beta, 2.0}, p, 12.0);
  CHECK(b.dy.front() == doctest::Approx(-2.0));
  const Grid g = Grid::uniform(0.0, 6.0, 1201);
  const Profile y = Profile::sample(g, [&](double x) { return b.value_at(x); });
  CHECK(sup_norm(discrete_residual(y, p, std::pow(beta, p))) <= 1e-4);
}

TEST_CASE("perron subsolution and bracket") {
  CHECK(perron_subsolution(0.0) == 1.0);
  for (double p : {1.5, 2.0, 3.0}) {
    const Grid g = Grid::uniform(0.0, 6.0, 601);
    const auto r = discrete_residual(Profile::sample(g, perron_subsolution), p);
    for (int i = 1; i + 1 < g.n; ++i) CHECK(r[i] >= 0.0);
  }
  const PerronResult pr = perron_construct(2.0, 6.0, 1201);
  for (int i = 0; i < pr.y.size(); ++i) {
    CHECK(pr.y[i] >= perron_subsolution(pr.y.grid.x(i)));
    CHECK(pr.y[i] <= 1.0);
  }
}

TEST_CASE("perron and shooting agree") {
  const PerronResult pr = perron_construct(2.0, 6.0, 1201);
  const Profile& y = pr.y;
  const double h = y.grid.h;
  const double slope0 = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * h);
  const ShootResult s = shoot_decaying(2.0, slope0, 6.0);
  double worst = 0;
  for (int i = 0; i < y.size(); ++i) {
    const double x = y.grid.x(i);
    if (x > 4.0) break;
    worst = std::max(worst, std::abs(y[i] - s.trajectory.value_at(x)));
  }
  CHECK(worst <= 1e-3);
}
