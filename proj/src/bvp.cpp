#include "plap/bvp.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <sstream>

#include "plap/error.hpp"
#include "plap/ivp.hpp"
#include "plap/tridiag.hpp"
#include "plap/verify.hpp"

namespace plap::bvp {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kStageTol = 1e-8;  // convergence level of intermediate eps stages

double rho(double g, double p, double eps) {
  if (eps == 0.0) return std::pow(std::abs(g), p);
  return std::pow(g * g + eps * eps, 0.5 * p) - std::pow(eps, p);
}

double coupling_weight(double p) { return (p - 1.0) / p; }

// Curvature of rho / p at x, i.e. d/dx phi_reg(x); finite at x = 0 only when eps > 0.
double potential_curvature(double x, double p, double eps) {
  if (eps > 0.0) return phi_p_reg_slope(x, p, eps);
  return (p - 1.0) * std::pow(std::max(std::abs(x), 1e-100), p - 2.0);
}

double gradient_part(std::span<const double> u, double h, double p, double eps) {
  double e = 0.0;
  for (std::size_t c = 0; c + 1 < u.size(); ++c) e += h * rho((u[c + 1] - u[c]) / h, p, eps);
  return e / p;
}

// Tridiagonal Hessian of (scale/p) sum h rho(g) restricted to interior nodes,
// plus the supplied diagonal.
struct Tridiag {
  std::vector<double> lower, diag, upper;
};

Tridiag gradient_hessian(std::span<const double> u, double h, double p, double eps, double scale,
                         std::span<const double> extra_diag) {
  const int n = static_cast<int>(u.size());
  const int m = n - 2;
  std::vector<double> a(n - 1);
  for (int c = 0; c < n - 1; ++c) a[c] = scale * phi_p_reg_slope((u[c + 1] - u[c]) / h, p, eps) / h;
  Tridiag t{std::vector<double>(m), std::vector<double>(m), std::vector<double>(m)};
  for (int k = 0; k < m; ++k) {
    const int i = k + 1;
    t.lower[k] = -a[i - 1];
    t.upper[k] = -a[i];
    t.diag[k] = a[i - 1] + a[i] + extra_diag[k];
  }
  return t;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Interior-unknown formulation shared by the symmetric and the free problem.
struct Objective {
  std::function<double(const std::vector<double>&)> energy;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
  std::function<double(const std::vector<double>&)> residual;  // sup-norm of the EL residual
  std::function<std::vector<double>(const std::vector<double>&, const std::vector<double>&)> precondition;
};

struct StageResult {
  int iterations = 0;
  double residual = 0.0;
  double energy = 0.0;
};

StageResult descend(const Objective& obj, std::vector<double>& x, double tol, int max_iter,
                    MinimizeTrace* trace, int stage) {
  StageResult r;
  double e = obj.energy(x);
  double res = obj.residual(x);
  for (int it = 0; it < max_iter; ++it) {
    if (res <= tol) {
      r.residual = res;
      r.energy = e;
      return r;
    }
    const std::vector<double> g = obj.gradient(x);
    std::vector<double> d = obj.precondition(x, g);
    for (double& v : d) v = -v;
    const double slope = dot(g, d);
    if (!(slope < 0.0)) throw LineSearchFailure("preconditioned direction is not a descent direction");

    double t = 1.0;
    bool accepted = false;
    std::vector<double> xn(x.size());
    for (int k = 0; k < 60 && !accepted; ++k, t *= 0.5) {
      for (std::size_t i = 0; i < x.size(); ++i) xn[i] = x[i] + t * d[i];
      const double en = obj.energy(xn);
      if (!std::isfinite(en)) continue;
      if (en <= e + kArmijo * t * slope) {
        accepted = true;
        e = en;
        res = obj.residual(xn);
      } else if (std::abs(en - e) <= 64.0 * DBL_EPSILON * std::max(std::abs(e), std::abs(en))) {
        // Energy differences are below roundoff: fall back to the residual.
        const double rn = obj.residual(xn);
        if (rn < res) {
          accepted = true;
          e = en;
          res = rn;
        }
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "backtracking failed at residual " << res << " (eps floor may be too small)";
      throw LineSearchFailure(os.str());
    }
    x.swap(xn);
    ++r.iterations;
    if (trace) {
      trace->energy.push_back(e);
      trace->stage.push_back(stage);
    }
  }
  if (res <= tol) {
    r.residual = res;
    r.energy = e;
    return r;
  }
  std::ostringstream os;
  os << "no convergence after " << max_iter << " iterations (residual " << res << ")";
  throw MaxIterations(os.str());
}

std::vector<double> with_boundary(const std::vector<double>& interior, double left, double right) {
  std::vector<double> u(interior.size() + 2);
  u.front() = left;
  u.back() = right;
  std::copy(interior.begin(), interior.end(), u.begin() + 1);
  return u;
}

std::vector<double> mirror(std::span<const double> u) { return {u.rbegin(), u.rend()}; }

void finalize(SolutionPair& pair) {
  pair.T_inf = verify::first_integral(pair).level;
  try {
    const verify::AsymptoticsReport a = verify::asymptote_fit(pair);
    pair.b1 = a.b1_hat;
    pair.b2 = a.b2_hat;
  } catch (const WindowTooSmall&) {
  }
}

}  // namespace

void LimitProblem::validate() const {
  if (!(p > 1.0)) throw InvalidArgument("limit problem requires p > 1");
  if (!(R > 0.0)) throw InvalidArgument("limit problem requires R > 0");
  if (n < 11 || n % 2 == 0) throw InvalidArgument("limit problem requires an odd node count n >= 11");
  if (!(tol > 0.0)) throw InvalidArgument("limit problem requires tol > 0");
  if (eps_schedule.empty()) throw InvalidArgument("eps schedule must not be empty");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    if (!(eps_schedule[k] >= 0.0)) throw InvalidArgument("eps values must be nonnegative");
    if (k > 0 && !(eps_schedule[k] < eps_schedule[k - 1]))
      throw InvalidArgument("eps schedule must be strictly decreasing");
  }
  if (max_iter <= 0) throw InvalidArgument("max_iter must be positive");
}

double energy_limit(const Profile& U, double p, double eps) {
  const Grid& g = U.grid;
  const auto w = trapezoid_weights(g);
  double coupling = 0.0;
  for (int i = 0; i < g.n; ++i)
    coupling += w[i] * rho(U[i], p, eps) * rho(U[g.n - 1 - i], p, eps);
  return 2.0 * gradient_part(U.values, g.h, p, eps) + coupling_weight(p) * coupling;
}

Profile energy_gradient(const Profile& U, double p, double eps) {
  const Grid& g = U.grid;
  const int n = g.n;
  std::vector<double> flux(n - 1);
  for (int c = 0; c < n - 1; ++c) flux[c] = phi_p_reg((U[c + 1] - U[c]) / g.h, p, eps);
  std::vector<double> out(n, 0.0);
  for (int i = 1; i < n - 1; ++i) {
    out[i] = 2.0 * (flux[i - 1] - flux[i]) +
             2.0 * (p - 1.0) * g.h * phi_p_reg(U[i], p, eps) * rho(U[n - 1 - i], p, eps);
  }
  return Profile(g, std::move(out));
}

double energy_pair(const Profile& U, const Profile& V, double p, double eps) {
  const Grid& g = U.grid;
  const auto w = trapezoid_weights(g);
  double coupling = 0.0;
  for (int i = 0; i < g.n; ++i)
    coupling += w[i] * rho(U[i], p, eps) * rho(V[i], p, eps);
  return gradient_part(U.values, g.h, p, eps) + gradient_part(V.values, g.h, p, eps) +
         coupling_weight(p) * coupling;
}

std::pair<Profile, Profile> energy_pair_gradient(const Profile& U, const Profile& V, double p,
                                                 double eps) {
  const Grid& g = U.grid;
  const int n = g.n;
  std::vector<double> gu(n, 0.0), gv(n, 0.0);
  for (int i = 1; i < n - 1; ++i) {
    const double fu = phi_p_reg((U[i] - U[i - 1]) / g.h, p, eps) - phi_p_reg((U[i + 1] - U[i]) / g.h, p, eps);
    const double fv = phi_p_reg((V[i] - V[i - 1]) / g.h, p, eps) - phi_p_reg((V[i + 1] - V[i]) / g.h, p, eps);
    gu[i] = fu + (p - 1.0) * g.h * phi_p_reg(U[i], p, eps) * rho(V[i], p, eps);
    gv[i] = fv + (p - 1.0) * g.h * phi_p_reg(V[i], p, eps) * rho(U[i], p, eps);
  }
  return {Profile(g, std::move(gu)), Profile(g, std::move(gv))};
}

std::vector<double> el_residual(const Profile& U, const Profile& V, double p, double eps) {
  const Grid& g = U.grid;
  std::vector<double> r(g.n, 0.0);
  for (int i = 1; i + 1 < g.n; ++i) {
    const double fl = phi_p_reg((U[i] - U[i - 1]) / g.h, p, eps);
    const double fr = phi_p_reg((U[i + 1] - U[i]) / g.h, p, eps);
    r[i] = (fr - fl) / g.h - (p - 1.0) * phi_p_reg(U[i], p, eps) * rho(V[i], p, eps);
  }
  return r;
}

SolutionPair minimize_limit(const LimitProblem& prob, MinimizeTrace* trace) {
  prob.validate();
  if (!prob.enforce_symmetry) return solve_free_pair(prob, trace);
  const double p = prob.p;
  const Grid g = Grid::uniform(-prob.R, prob.R, prob.n);
  const int n = g.n;
  const int m = n - 2;

  std::vector<double> x(m);
  for (int k = 0; k < m; ++k) x[k] = std::max(g.x(k + 1), 0.0);

  double eps = prob.eps_schedule.front();
  auto full = [&](const std::vector<double>& xi) {
    return Profile(g, with_boundary(xi, 0.0, prob.R));
  };
  Objective obj;
  obj.energy = [&](const std::vector<double>& xi) { return energy_limit(full(xi), p, eps); };
  obj.gradient = [&](const std::vector<double>& xi) {
    const Profile gr = energy_gradient(full(xi), p, eps);
    return std::vector<double>(gr.values.begin() + 1, gr.values.end() - 1);
  };
  obj.residual = [&](const std::vector<double>& xi) {
    const Profile gr = energy_gradient(full(xi), p, eps);
    return sup_norm(gr.values) / (2.0 * g.h);
  };
  obj.precondition = [&](const std::vector<double>& xi, const std::vector<double>& gr) {
    const std::vector<double> u = with_boundary(xi, 0.0, prob.R);
    std::vector<double> extra(m);
    for (int k = 0; k < m; ++k) {
      const int i = k + 1;
      extra[k] = 2.0 * (p - 1.0) * g.h * potential_curvature(u[i], p, eps) * rho(u[n - 1 - i], p, eps);
    }
    const Tridiag t = gradient_hessian(u, g.h, p, eps, 2.0, extra);
    return detail::solve_tridiagonal(t.lower, t.diag, t.upper, gr);
  };

  StageResult last;
  int total = 0;
  for (std::size_t s = 0; s < prob.eps_schedule.size(); ++s) {
    eps = prob.eps_schedule[s];
    const bool final_stage = s + 1 == prob.eps_schedule.size();
    const double stage_tol = final_stage ? prob.tol : std::max(prob.tol, kStageTol);
    last = descend(obj, x, stage_tol, prob.max_iter, trace, static_cast<int>(s));
    total += last.iterations;
  }

  Profile U = full(x);
  Profile V(g, mirror(U.values));
  SolutionPair pair = SolutionPair::from_profiles(std::move(U), std::move(V), p);
  pair.grad_norm = last.residual;
  pair.energy = last.energy;
  pair.iterations = total;
  finalize(pair);
  return pair;
}

SolutionPair solve_free_pair(const LimitProblem& prob, MinimizeTrace* trace) {
  prob.validate();
  const double p = prob.p;
  const Grid g = Grid::uniform(-prob.R, prob.R, prob.n);
  const int n = g.n;
  const int m = n - 2;

  // Asymmetric start so that symmetry is not inherited from the initial guess.
  std::vector<double> x(2 * m);
  for (int k = 0; k < m; ++k) {
    x[k] = std::max(g.x(k + 1), 0.0);
    x[m + k] = 0.5 * (prob.R - g.x(k + 1));
  }
  auto split = [&](const std::vector<double>& xi) {
    std::vector<double> a(xi.begin(), xi.begin() + m), b(xi.begin() + m, xi.end());
    return std::pair{Profile(g, with_boundary(a, 0.0, prob.R)), Profile(g, with_boundary(b, prob.R, 0.0))};
  };

  double eps = prob.eps_schedule.front();
  Objective obj;
  obj.energy = [&](const std::vector<double>& xi) {
    auto [U, V] = split(xi);
    return energy_pair(U, V, p, eps);
  };
  obj.gradient = [&](const std::vector<double>& xi) {
    auto [U, V] = split(xi);
    auto [gu, gv] = energy_pair_gradient(U, V, p, eps);
    std::vector<double> out(2 * m);
    std::copy(gu.values.begin() + 1, gu.values.end() - 1, out.begin());
    std::copy(gv.values.begin() + 1, gv.values.end() - 1, out.begin() + m);
    return out;
  };
  obj.residual = [&](const std::vector<double>& xi) {
    auto [U, V] = split(xi);
    auto [gu, gv] = energy_pair_gradient(U, V, p, eps);
    return std::max(sup_norm(gu.values), sup_norm(gv.values)) / g.h;
  };
  obj.precondition = [&](const std::vector<double>& xi, const std::vector<double>& gr) {
    auto [U, V] = split(xi);
    std::vector<double> eu(m), ev(m);
    for (int k = 0; k < m; ++k) {
      const int i = k + 1;
      const double c = (p - 1.0) * g.h;
      eu[k] = c * potential_curvature(U[i], p, eps) * rho(V[i], p, eps);
      ev[k] = c * potential_curvature(V[i], p, eps) * rho(U[i], p, eps);
    }
    const Tridiag tu = gradient_hessian(U.values, g.h, p, eps, 1.0, eu);
    const Tridiag tv = gradient_hessian(V.values, g.h, p, eps, 1.0, ev);
    std::vector<double> ru(gr.begin(), gr.begin() + m), rv(gr.begin() + m, gr.end());
    const auto su = detail::solve_tridiagonal(tu.lower, tu.diag, tu.upper, ru);
    const auto sv = detail::solve_tridiagonal(tv.lower, tv.diag, tv.upper, rv);
    std::vector<double> out(2 * m);
    std::copy(su.begin(), su.end(), out.begin());
    std::copy(sv.begin(), sv.end(), out.begin() + m);
    return out;
  };

  StageResult last;
  int total = 0;
  for (std::size_t s = 0; s < prob.eps_schedule.size(); ++s) {
    eps = prob.eps_schedule[s];
    const bool final_stage = s + 1 == prob.eps_schedule.size();
    const double stage_tol = final_stage ? prob.tol : std::max(prob.tol, kStageTol);
    last = descend(obj, x, stage_tol, prob.max_iter, trace, static_cast<int>(s));
    total += last.iterations;
  }

  auto [U, V] = split(x);
  SolutionPair pair = SolutionPair::from_profiles(std::move(U), std::move(V), p);
  pair.grad_norm = last.residual;
  pair.energy = last.energy;
  pair.iterations = total;
  finalize(pair);
  return pair;
}

ContinuationReport continue_in_R(double p, const std::vector<double>& R_list, double w, double h,
                                 double tol) {
  if (R_list.empty()) throw InvalidArgument("R list must not be empty");
  for (std::size_t k = 0; k < R_list.size(); ++k) {
    if (k > 0 && !(R_list[k] > R_list[k - 1])) throw InvalidArgument("R list must be increasing");
  }
  if (!(w > 0.0) || !(w < R_list.front())) throw InvalidArgument("window must satisfy 0 < w < min R");
  ContinuationReport rep;
  std::vector<double> prev;
  for (double R : R_list) {
    LimitProblem prob;
    prob.p = p;
    prob.R = R;
    prob.n = 2 * static_cast<int>(std::lround(R / h)) + 1;
    prob.tol = tol;
    SolutionPair pair = minimize_limit(prob);
    const Grid& g = pair.grid;
    std::vector<double> window;
    double excess = INFINITY;
    for (int i = 0; i < g.n; ++i) {
      const double x = g.x(i);
      if (std::abs(x) > w + 1e-9 * h) continue;
      window.push_back(pair.U[i]);
      excess = std::min(excess, pair.U[i] - std::max(x, 0.0));
    }
    const verify::FirstIntegral fi = verify::first_integral(pair, w);
    rep.R.push_back(R);
    rep.drift.push_back(fi.drift);
    rep.min_excess.push_back(excess);
    if (!prev.empty()) rep.distances.push_back(sup_distance(prev, window));
    prev = std::move(window);
    rep.pairs.push_back(std::move(pair));
  }
  return rep;
}

Profile barrier_profile(const Grid& g, double p) {
  const double beta = p >= 2.0 ? 1.0 : 1.0 / (1.0 + std::pow(2.0, 1.0 / (p - 1.0)));
  const double x_far = std::max(g.b, 1.0);
  const ivp::Trajectory bar = ivp::scaled_decaying({beta, 2.0}, p, x_far);
  const double v0 = bar.y.front();
  return Profile::sample(g, [&](double x) { return x >= 0.0 ? bar.value_at(x) : v0 - 2.0 * x; });
}

BarrierReport barrier_check(const SolutionPair& pair, double p) {
  const Profile bar = barrier_profile(pair.grid, p);
  BarrierReport r;
  r.max_violation = -INFINITY;
  for (int i = 0; i < pair.grid.n; ++i) r.max_violation = std::max(r.max_violation, pair.V[i] - bar[i]);
  r.pass = r.max_violation <= r.slack;
  return r;
}

}  // namespace plap::bvp
