#include "plap/lambda.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

// Boost 1.74's pchip header calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "plap/bvp.hpp"
#include "plap/error.hpp"
#include "plap/tridiag.hpp"

namespace plap::lambda {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kValueFloor = 1e-100;
constexpr double kStageTol = 1e-7;

double rho(double g, double p, double eps) {
  if (eps == 0.0) return std::pow(std::abs(g), p);
  return std::pow(g * g + eps * eps, 0.5 * p) - std::pow(eps, p);
}

double pw(double x, double e) { return std::pow(std::abs(x), e); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Retraction onto the constraint set: nonnegative part then unit L^p norm.
void retract(Profile& f, double p) {
  for (double& x : f.values) x = std::abs(x);
  const double nrm = lp_norm(f, p);
  if (!(nrm > 0.0)) throw LineSearchFailure("profile collapsed to zero");
  for (double& x : f.values) x /= nrm;
}

double norm_defect(const Profile& u, const Profile& v, double p) {
  return std::max(std::abs(lp_norm(u, p) - 1.0), std::abs(lp_norm(v, p) - 1.0));
}

struct Block {
  std::vector<double> grad;  // interior
  std::vector<double> normal;
  std::vector<double> dir;
};

// Residual of the constrained Euler-Lagrange equation for one component:
// g_i / w_i - lambda phi_p(u_i), lambda = sum g_i u_i.
double block_residual(const Profile& u, const Profile& gr, double p) {
  const Grid& g = u.grid;
  double lam = 0.0;
  for (int i = 1; i + 1 < g.n; ++i) lam += gr[i] * u[i];
  double r = 0.0;
  for (int i = 1; i + 1 < g.n; ++i) r = std::max(r, std::abs(gr[i] / g.h - lam * phi_p(u[i], p)));
  return r;
}

}  // namespace

void LambdaParams::validate() const {
  if (!(p > 1.0)) throw InvalidArgument("Lambda system requires p > 1");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw InvalidArgument("Lambda system requires alpha, beta >= 0");
  if (!(Lambda >= 0.0)) throw InvalidArgument("Lambda system requires Lambda >= 0");
  if (!(b > a)) throw InvalidArgument("Lambda system requires b > a");
  if (n < 5) throw InvalidArgument("Lambda system requires n >= 5");
  if (!(tol > 0.0)) throw InvalidArgument("Lambda system requires tol > 0");
  if (eps_schedule.empty()) throw InvalidArgument("eps schedule must not be empty");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    if (!(eps_schedule[k] >= 0.0)) throw InvalidArgument("eps values must be nonnegative");
    if (k > 0 && !(eps_schedule[k] < eps_schedule[k - 1]))
      throw InvalidArgument("eps schedule must be strictly decreasing");
  }
  if (max_iter <= 0) throw InvalidArgument("max_iter must be positive");
}

double energy_lambda(const Profile& u, const Profile& v, const LambdaParams& P, double eps) {
  const Grid& g = u.grid;
  const double p = P.p;
  double grad = 0.0;
  for (int c = 0; c + 1 < g.n; ++c) {
    grad += g.h * rho((u[c + 1] - u[c]) / g.h, p, eps);
    grad += g.h * rho((v[c + 1] - v[c]) / g.h, p, eps);
  }
  const auto w = trapezoid_weights(g);
  double su = 0, sv = 0, suv = 0;
  for (int i = 0; i < g.n; ++i) {
    su += w[i] * pw(u[i], p + 2);
    sv += w[i] * pw(v[i], p + 2);
    suv += w[i] * pw(u[i], p) * pw(v[i], p);
  }
  return grad / p + (P.alpha * su + P.beta * sv) / (p + 2) + P.Lambda / p * suv;
}

std::pair<Profile, Profile> energy_lambda_gradient(const Profile& u, const Profile& v,
                                                   const LambdaParams& P, double eps) {
  const Grid& g = u.grid;
  const double p = P.p;
  const auto w = trapezoid_weights(g);
  std::vector<double> gu(g.n, 0.0), gv(g.n, 0.0);
  for (int i = 1; i + 1 < g.n; ++i) {
    gu[i] = phi_p_reg((u[i] - u[i - 1]) / g.h, p, eps) - phi_p_reg((u[i + 1] - u[i]) / g.h, p, eps) +
            w[i] * (P.alpha * pw(u[i], p) * u[i] + P.Lambda * phi_p(u[i], p) * pw(v[i], p));
    gv[i] = phi_p_reg((v[i] - v[i - 1]) / g.h, p, eps) - phi_p_reg((v[i + 1] - v[i]) / g.h, p, eps) +
            w[i] * (P.beta * pw(v[i], p) * v[i] + P.Lambda * phi_p(v[i], p) * pw(u[i], p));
  }
  return {Profile(g, std::move(gu)), Profile(g, std::move(gv))};
}

std::pair<double, double> multipliers(const Profile& u, const Profile& v, const LambdaParams& P) {
  const double p = P.p;
  const Grid& g = u.grid;
  const auto du = diff_forward(u);
  const auto dv = diff_forward(v);
  std::vector<double> cu(du.size()), cv(dv.size());
  for (std::size_t c = 0; c < du.size(); ++c) {
    cu[c] = pw(du[c], p);
    cv[c] = pw(dv[c], p);
  }
  const auto w = trapezoid_weights(g);
  double su = 0, sv = 0, suv = 0;
  for (int i = 0; i < g.n; ++i) {
    su += w[i] * pw(u[i], p + 2);
    sv += w[i] * pw(v[i], p + 2);
    suv += w[i] * pw(u[i], p) * pw(v[i], p);
  }
  return {quad_midpoint(cu, g.h) + P.alpha * su + P.Lambda * suv,
          quad_midpoint(cv, g.h) + P.beta * sv + P.Lambda * suv};
}

TProfile t_lambda_profile(const Profile& u, const Profile& v, double lambda1, double lambda2,
                          const LambdaParams& P) {
  const double p = P.p;
  const Grid& g = u.grid;
  const auto du = diff_central(u);
  const auto dv = diff_central(v);
  std::vector<double> T(g.n);
  for (int i = 0; i < g.n; ++i) {
    T[i] = (p - 1.0) * (pw(du[i], p) + pw(dv[i], p)) - P.Lambda * pw(u[i], p) * pw(v[i], p) -
           p * P.alpha * pw(u[i], p + 2) / (p + 2) - p * P.beta * pw(v[i], p + 2) / (p + 2) +
           lambda1 * pw(u[i], p) + lambda2 * pw(v[i], p);
  }
  TProfile out;
  std::vector<double> inner(T.begin() + 1, T.end() - 1);
  std::vector<double> sorted = inner;
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  out.level = sorted[mid];
  if (sorted.size() % 2 == 0)
    out.level = 0.5 * (out.level + *std::max_element(sorted.begin(), sorted.begin() + mid));
  const double denom = std::max(std::abs(out.level), 1e-300);
  for (double t : inner) out.drift = std::max(out.drift, std::abs(t - out.level) / denom);
  out.T = Profile(g, std::move(T));
  return out;
}

LambdaSolution minimize_lambda(const LambdaParams& P, LambdaTrace* trace) {
  P.validate();
  const double p = P.p;
  const Grid g = Grid::uniform(P.a, P.b, P.n);
  const int n = g.n;
  const int m = n - 2;

  auto left = [&](double x) { return (x - P.a) * (P.b - x) * (P.b - x); };
  auto right = [&](double x) { return (x - P.a) * (x - P.a) * (P.b - x); };
  Profile u = Profile::sample(g, P.u_left ? std::function<double(double)>(left) : right);
  Profile v = Profile::sample(g, P.u_left ? std::function<double(double)>(right) : left);
  u[0] = u[n - 1] = v[0] = v[n - 1] = 0.0;
  retract(u, p);
  retract(v, p);
  const auto w = trapezoid_weights(g);

  LambdaSolution sol;
  double eps = P.eps_schedule.front();
  auto residual = [&](const Profile& a, const Profile& b) {
    auto [ga, gb] = energy_lambda_gradient(a, b, P, eps);
    return std::max(block_residual(a, ga, p), block_residual(b, gb, p));
  };

  // Projected preconditioned direction for one component: d = -P^{-1} g + mu P^{-1} n with
  // mu chosen so that n . d = 0 (n is the gradient of the constraint).
  auto direction = [&](const Profile& a, const Profile& b, const Profile& ga, double coef) {
    std::vector<double> lower(m), diag(m), upper(m), gr(m), nr(m);
    std::vector<double> cell(n - 1);
    for (int c = 0; c < n - 1; ++c) cell[c] = phi_p_reg_slope((a[c + 1] - a[c]) / g.h, p, eps) / g.h;
    for (int k = 0; k < m; ++k) {
      const int i = k + 1;
      const double ai = std::max(std::abs(a[i]), kValueFloor);
      lower[k] = -cell[i - 1];
      upper[k] = -cell[i];
      diag[k] = cell[i - 1] + cell[i] +
                w[i] * ((p + 1.0) * coef * pw(a[i], p) + P.Lambda * (p - 1.0) * std::pow(ai, p - 2.0) * pw(b[i], p));
      gr[k] = ga[i];
      nr[k] = p * w[i] * phi_p(a[i], p);
    }
    const auto pg = detail::solve_tridiagonal(lower, diag, upper, gr);
    const auto pn = detail::solve_tridiagonal(lower, diag, upper, nr);
    const double nn = dot(nr, pn);
    const double mu = nn > 0.0 ? dot(nr, pg) / nn : 0.0;
    // Tangential gradient r = g - mu n; the direction is -P^{-1} r and the slope r . d
    // is computed from r directly to avoid cancellation near convergence.
    Block blk;
    blk.normal = nr;
    blk.grad.resize(m);
    blk.dir.resize(m);
    for (int k = 0; k < m; ++k) {
      blk.grad[k] = gr[k] - mu * nr[k];
      blk.dir[k] = -pg[k] + mu * pn[k];
    }
    return blk;
  };

  double e = 0.0, res = 0.0;
  for (std::size_t s = 0; s < P.eps_schedule.size(); ++s) {
    eps = P.eps_schedule[s];
    const bool final_stage = s + 1 == P.eps_schedule.size();
    const double stage_tol = final_stage ? P.tol : std::max(P.tol, kStageTol);
    e = energy_lambda(u, v, P, eps);
    res = residual(u, v);
    int it = 0;
    for (; it < P.max_iter && res > stage_tol; ++it) {
      auto [gu, gv] = energy_lambda_gradient(u, v, P, eps);
      const Block bu = direction(u, v, gu, P.alpha);
      const Block bv = direction(v, u, gv, P.beta);
      const double slope = dot(bu.grad, bu.dir) + dot(bv.grad, bv.dir);
      if (!(slope < 0.0)) throw LineSearchFailure("projected direction is not a descent direction");
      double t = 1.0;
      bool accepted = false;
      Profile un = u, vn = v;
      for (int k = 0; k < 60 && !accepted; ++k, t *= 0.5) {
        for (int j = 0; j < m; ++j) {
          un[j + 1] = u[j + 1] + t * bu.dir[j];
          vn[j + 1] = v[j + 1] + t * bv.dir[j];
        }
        retract(un, p);
        retract(vn, p);
        const double en = energy_lambda(un, vn, P, eps);
        if (en <= e + kArmijo * t * slope) {
          accepted = true;
          e = en;
          res = residual(un, vn);
        } else if (std::abs(en - e) <= 64.0 * DBL_EPSILON * std::max(std::abs(e), std::abs(en))) {
          const double rn = residual(un, vn);
          if (rn < res) {
            accepted = true;
            e = en;
            res = rn;
          }
        }
      }
      if (!accepted) {
        std::ostringstream os;
        os << "backtracking failed at residual " << res;
        throw LineSearchFailure(os.str());
      }
      u = std::move(un);
      v = std::move(vn);
      if (trace) {
        trace->energy.push_back(e);
        trace->stage.push_back(static_cast<int>(s));
        trace->norm_defect.push_back(norm_defect(u, v, p));
      }
    }
    sol.iterations += it;
    if (res > stage_tol) {
      std::ostringstream os;
      os << "no convergence after " << P.max_iter << " iterations (residual " << res << ")";
      throw MaxIterations(os.str());
    }
  }

  sol.u = u;
  sol.v = v;
  sol.residual = res;
  sol.energy = e;
  std::tie(sol.lambda1, sol.lambda2) = multipliers(u, v, P);
  const TProfile tp = t_lambda_profile(u, v, sol.lambda1, sol.lambda2, P);
  sol.T_Lambda = tp.level;
  sol.T_drift = tp.drift;
  return sol;
}

BlowupReport blowup_extract(const LambdaSolution& sol, const LambdaParams& P, double window,
                            int samples) {
  const Grid& g = sol.u.grid;
  const double p = P.p;
  BlowupReport r;
  double best = INFINITY;
  for (int i = 1; i + 2 < g.n; ++i) {
    const double d0 = sol.u[i] - sol.v[i];
    const double d1 = sol.u[i + 1] - sol.v[i + 1];
    if (!(d0 == 0.0 || d0 * d1 < 0.0)) continue;
    ++r.root_count;
    const double t = d0 == 0.0 ? 0.0 : d0 / (d0 - d1);
    const double x = g.x(i) + t * g.h;
    const double val = sol.u[i] + t * (sol.u[i + 1] - sol.u[i]);
    if (val < best) {
      best = val;
      r.x_Lambda = x;
      r.m_Lambda = val;
    }
  }
  if (r.root_count == 0 || !(r.m_Lambda > 0.0)) throw NoCrossing("u - v does not change sign inside the interval");

  r.scale_invariant = P.Lambda * std::pow(r.m_Lambda, 2.0 * p);
  const double edge = std::min(r.x_Lambda - P.a, P.b - r.x_Lambda);
  r.edge_scale = std::pow(P.Lambda, 1.0 / (2.0 * p)) * edge;
  r.edge_scale_sqrt = std::sqrt(P.Lambda) * edge;

  const double y_lo = std::max((P.a - r.x_Lambda) / r.m_Lambda, -window);
  const double y_hi = std::min((P.b - r.x_Lambda) / r.m_Lambda, window);
  const Grid yg = Grid::uniform(y_lo, y_hi, samples);
  using boost::math::interpolators::pchip;
  auto xs = g.nodes();
  pchip<std::vector<double>> iu(std::vector<double>(xs), std::vector<double>(sol.u.values));
  pchip<std::vector<double>> iv(std::move(xs), std::vector<double>(sol.v.values));
  const double x_Lambda = r.x_Lambda, m = r.m_Lambda;
  auto at = [&](auto& f, double y) {
    const double x = std::clamp(x_Lambda + m * y, P.a, P.b);
    return std::max(f(x), 0.0) / m;
  };
  r.rescaled_u = Profile::sample(yg, [&](double y) { return at(iu, y); });
  r.rescaled_v = Profile::sample(yg, [&](double y) { return at(iv, y); });
  return r;
}

double rescaled_distance(const BlowupReport& blow, const SolutionPair& limit, double p,
                         double y_window) {
  const Grid& lg = limit.grid;
  const int c = lg.nearest(0.0);
  const double U0 = limit.U[c];
  const double C = blow.scale_invariant / (p - 1.0);
  const double k = std::pow(C, 1.0 / p);
  auto lin = [&](const Profile& f, double x) {
    const double s = std::clamp((x - lg.a) / lg.h, 0.0, lg.n - 1.0);
    const int i = std::min(static_cast<int>(s), lg.n - 2);
    const double t = s - i;
    return (1 - t) * f[i] + t * f[i + 1];
  };
  const Grid& yg = blow.rescaled_u.grid;
  // The limit U increases across the interface; match it with whichever rescaled
  // component increases.
  const int mid = yg.nearest(0.0);
  const bool u_rises = blow.rescaled_u[mid + 1] > blow.rescaled_v[mid + 1];
  const Profile& rise = u_rises ? blow.rescaled_u : blow.rescaled_v;
  const Profile& fall = u_rises ? blow.rescaled_v : blow.rescaled_u;
  double d = 0.0;
  for (int i = 0; i < yg.n; ++i) {
    const double y = yg.x(i);
    if (std::abs(y) > y_window) continue;
    const double x = k * y / U0;
    const double Uh = lin(limit.U, x) / U0;
    const double Vh = lin(limit.V, x) / U0;
    d = std::max({d, std::abs(rise[i] - Uh), std::abs(fall[i] - Vh)});
  }
  return d;
}

SweepReport lambda_sweep(const LambdaParams& base, const std::vector<double>& Lambdas,
                         const SolutionPair& limit, double y_window) {
  for (std::size_t k = 1; k < Lambdas.size(); ++k)
    if (Lambdas[k] < Lambdas[k - 1]) throw InvalidArgument("Lambda list must be nondecreasing");
  SweepReport rep;
  for (double L : Lambdas) {
    LambdaParams P = base;
    P.Lambda = L;
    const LambdaSolution sol = minimize_lambda(P);
    const BlowupReport b = blowup_extract(sol, P);
    SweepEntry e;
    e.Lambda = L;
    e.lambda1 = sol.lambda1;
    e.lambda2 = sol.lambda2;
    e.T_Lambda = sol.T_Lambda;
    e.T_drift = sol.T_drift;
    e.m_Lambda = b.m_Lambda;
    e.x_Lambda = b.x_Lambda;
    e.scale_invariant = b.scale_invariant;
    e.edge_scale = b.edge_scale;
    e.edge_scale_sqrt = b.edge_scale_sqrt;
    e.rescaled_distance = rescaled_distance(b, limit, P.p, y_window);
    e.iterations = sol.iterations;
    for (double d : diff_forward(sol.u)) e.max_slope = std::max(e.max_slope, std::abs(d));
    for (double d : diff_forward(sol.v)) e.max_slope = std::max(e.max_slope, std::abs(d));
    rep.entries.push_back(e);
  }
  return rep;
}

SweepReport lambda_sweep(const LambdaParams& base, const std::vector<double>& Lambdas) {
  bvp::LimitProblem prob;
  prob.p = base.p;
  prob.R = 8.0;
  prob.n = 801;
  return lambda_sweep(base, Lambdas, bvp::minimize_limit(prob));
}

}  // namespace plap::lambda
