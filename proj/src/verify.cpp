#include "plap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <lapacke.h>

#include "plap/bvp.hpp"
#include "plap/error.hpp"
#include "plap/lambda.hpp"

namespace plap::verify {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  return m;
}

double pw(double x, double e) { return std::pow(std::abs(x), e); }

}  // namespace

FirstIntegral first_integral(const SolutionPair& pair, double window) {
  const Grid& g = pair.grid;
  const double p = pair.p;
  const auto du = diff_central(pair.U);
  const auto dv = diff_central(pair.V);
  std::vector<double> F(g.n);
  for (int i = 0; i < g.n; ++i)
    F[i] = pw(du[i], p) + pw(dv[i], p) - pw(pair.U[i], p) * pw(pair.V[i], p);

  FirstIntegral out;
  out.window = window > 0.0 ? window : 0.5 * std::max(std::abs(g.a), std::abs(g.b));
  const double center = 0.5 * (g.a + g.b);
  std::vector<double> inside;
  for (int i = 1; i + 1 < g.n; ++i)
    if (std::abs(g.x(i) - center) <= out.window + 1e-9 * g.h) inside.push_back(F[i]);
  out.level = median(inside);
  const double denom = std::max(std::abs(out.level), 1e-12);
  for (double f : inside) out.drift = std::max(out.drift, std::abs(f - out.level) / denom);
  out.F = Profile(g, std::move(F));
  return out;
}

double symmetry_defect(const SolutionPair& pair) {
  const int n = pair.grid.n;
  double d = 0.0;
  for (int i = 0; i < n; ++i) d = std::max(d, std::abs(pair.V[i] - pair.U[n - 1 - i]));
  return d;
}

MonotonicityReport monotonicity_report(const SolutionPair& pair) {
  const Grid& g = pair.grid;
  MonotonicityReport r;
  r.min_u_step = INFINITY;
  r.max_v_step = -INFINITY;
  r.min_u_curvature = INFINITY;
  double min_v_curvature = INFINITY;
  const auto du = diff_forward(pair.U);
  const auto dv = diff_forward(pair.V);
  for (int c = 0; c + 1 < g.n; ++c) {
    r.min_u_step = std::min(r.min_u_step, du[c]);
    r.max_v_step = std::max(r.max_v_step, dv[c]);
    r.max_slope_sum = std::max(r.max_slope_sum, std::abs(du[c]) + std::abs(dv[c]));
    if (c > 0) {
      r.min_u_curvature = std::min(r.min_u_curvature, (du[c] - du[c - 1]) / g.h);
      min_v_curvature = std::min(min_v_curvature, (dv[c] - dv[c - 1]) / g.h);
    }
  }
  r.u_increasing = r.min_u_step >= -1e-8;
  r.v_decreasing = r.max_v_step <= 1e-8;
  r.u_convex = r.min_u_curvature >= -1e-6;
  r.v_convex = min_v_curvature >= -1e-6;
  return r;
}

AsymptoticsReport asymptote_fit(const SolutionPair& pair, double T_inf) {
  const Grid& g = pair.grid;
  const double R = g.b;
  const double lo = 0.5 * R;
  const double hi = R - 1.0;
  std::vector<int> right, left;
  for (int i = 1; i + 1 < g.n; ++i) {
    const double x = g.x(i);
    if (x >= lo - 1e-9 * g.h && x <= hi + 1e-9 * g.h) right.push_back(i);
    if (-x >= lo - 1e-9 * g.h && -x <= hi + 1e-9 * g.h) left.push_back(i);
  }
  if (right.size() < 3 || left.size() < 3) {
    std::ostringstream os;
    os << "asymptote window [R/2, R-1] has fewer than 3 nodes for R=" << R;
    throw WindowTooSmall(os.str());
  }
  const auto du = diff_central(pair.U);
  const auto dv = diff_central(pair.V);
  AsymptoticsReport r;
  for (int i : right) r.slope_right += du[i];
  r.slope_right /= right.size();
  for (int i : left) r.slope_left += dv[i];
  r.slope_left /= left.size();
  for (int i : right) r.b1_hat += pair.U[i] - r.slope_right * g.x(i);
  r.b1_hat /= right.size();
  for (int i : left) r.b2_hat += pair.V[i] - r.slope_left * g.x(i);
  r.b2_hat /= left.size();

  const double level = T_inf > 0.0 ? T_inf : first_integral(pair).level;
  const double s = std::pow(std::max(level, 0.0), 1.0 / pair.p);
  r.approach_decreasing = true;
  r.approach_min_excess = INFINITY;
  double prev = INFINITY;
  for (int i : right) {
    const double e = pair.U[i] - s * g.x(i);
    if (e > prev + 1e-8) r.approach_decreasing = false;
    prev = e;
    r.approach_min_excess = std::min(r.approach_min_excess, e - r.b1_hat);
  }
  return r;
}

AsymptoticsReport gaussian_decay_fit(const SolutionPair& pair, double x_lo, double x_hi) {
  const Grid& g = pair.grid;
  const auto du = diff_central(pair.U);
  std::vector<int> idx;
  for (int i = 1; i + 1 < g.n; ++i) {
    const double x = g.x(i);
    if (x >= x_lo - 1e-9 * g.h && x <= x_hi + 1e-9 * g.h && pair.U[i] > 1e-300 && x != 0.0)
      idx.push_back(i);
  }
  if (idx.size() < 3) throw WindowEmpty("decay window holds fewer than 3 usable nodes");

  // log U = c - s x^2
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = idx.size();
  for (int i : idx) {
    const double X = g.x(i) * g.x(i);
    const double Y = std::log(pair.U[i]);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
  }
  const double den = k * sxx - sx * sx;
  const double slope = (k * sxy - sx * sy) / den;
  const double c = (sy - slope * sx) / k;
  double ss_res = 0, ss_tot = 0;
  const double ymean = sy / k;
  for (int i : idx) {
    const double X = g.x(i) * g.x(i);
    const double Y = std::log(pair.U[i]);
    ss_res += (Y - c - slope * X) * (Y - c - slope * X);
    ss_tot += (Y - ymean) * (Y - ymean);
  }
  AsymptoticsReport r;
  r.nodes_used = static_cast<int>(idx.size());
  r.s_hat = -slope;
  r.r_squared = ss_tot > 0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 0.0;
  r.k_hat = INFINITY;
  r.K_hat = -INFINITY;
  r.c_hat = INFINITY;
  r.C_hat = -INFINITY;
  for (int i : idx) {
    const double x = g.x(i);
    const double ratio = -(std::log(pair.U[i]) - c) / (x * x);
    r.k_hat = std::min(r.k_hat, ratio);
    r.K_hat = std::max(r.K_hat, ratio);
    const double d = du[i] / (std::abs(x) * pair.U[i]);
    r.c_hat = std::min(r.c_hat, d);
    r.C_hat = std::max(r.C_hat, d);
  }
  r.m_hat = INFINITY;
  r.M_hat = -INFINITY;
  for (int i : idx) {
    const double x2 = g.x(i) * g.x(i);
    r.m_hat = std::min(r.m_hat, pair.U[i] * std::exp(r.K_hat * x2));
    r.M_hat = std::max(r.M_hat, pair.U[i] * std::exp(r.k_hat * x2));
  }
  return r;
}

LimitsReport limits_report(const SolutionPair& pair, double threshold) {
  const Grid& g = pair.grid;
  const double p = pair.p;
  const auto du = diff_central(pair.U);
  const auto dv = diff_central(pair.V);
  LimitsReport r;
  r.threshold = threshold;
  const int k = std::min(5, g.n - 2);
  for (int j = 1; j <= k; ++j) {
    for (int i : {j, g.n - 1 - j}) {
      const double U = pair.U[i], V = pair.V[i];
      r.max_product = std::max({r.max_product, pw(U, p - 1) * pw(V, p), pw(U, p) * pw(V, p - 1)});
    }
    const int l = j, rr = g.n - 1 - j;
    r.max_value = std::max({r.max_value, std::abs(pair.U[l]), std::abs(du[l]), std::abs(pair.V[rr]),
                            std::abs(dv[rr])});
  }
  return r;
}

std::vector<double> LinearizedOperator::apply(const std::vector<double>& x) const {
  std::vector<double> y(dimension, 0.0);
  for (int r = 0; r < dimension; ++r) {
    const double* row = &matrix[static_cast<std::size_t>(r) * dimension];
    double s = 0.0;
    for (int c = 0; c < dimension; ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

LinearizedOperator linearize(const SolutionPair& pair, const LinearizeOptions& opts) {
  const Grid& g = pair.grid;
  const double p = pair.p;
  const int n = g.n;
  const int m = n - 2;
  LinearizedOperator op;
  op.dimension = 2 * m;
  op.grid = g;
  op.boundary = opts.boundary;
  op.matrix.assign(static_cast<std::size_t>(op.dimension) * op.dimension, 0.0);

  constexpr double kDegenerate = 1e-12;
  std::vector<double> au(n - 1), av(n - 1);
  for (int c = 0; c < n - 1; ++c) {
    const double gu = (pair.U[c + 1] - pair.U[c]) / g.h;
    const double gv = (pair.V[c + 1] - pair.V[c]) / g.h;
    if (std::abs(gu) < kDegenerate) ++op.degenerate_cells;
    if (std::abs(gv) < kDegenerate) ++op.degenerate_cells;
    const double e = std::max(opts.eps, opts.eps == 0.0 ? kDegenerate : 0.0);
    au[c] = phi_p_reg_slope(gu, p, e) / (p - 1.0);
    av[c] = phi_p_reg_slope(gv, p, e) / (p - 1.0);
  }
  const double h2 = g.h * g.h;
  const bool mixed = opts.boundary == LinearBoundary::mixed;
  for (int k = 0; k < m; ++k) {
    const int i = k + 1;
    const double U = std::abs(pair.U[i]);
    const double V = std::abs(pair.V[i]);
    const double du = (p - 1.0) * (U > 0 ? std::pow(U, p - 2.0) : 0.0) * std::pow(V, p);
    const double dv = (p - 1.0) * (V > 0 ? std::pow(V, p - 2.0) : 0.0) * std::pow(U, p);
    const double cross = p * std::pow(U, p - 1.0) * std::pow(V, p - 1.0);
    op.zeroth_order_scale = std::max({op.zeroth_order_scale, du + cross, dv + cross});

    // phi row: flux a_{i-1}(phi_i - phi_{i-1}) on the left, a_i(phi_{i+1} - phi_i) on the right.
    const bool phi_right_flux = !(mixed && i == n - 2);  // zero flux at the growing end of U
    double diag = -au[i - 1] / h2 - du;
    if (k > 0) op.at(k, k - 1) = au[i - 1] / h2;
    if (phi_right_flux) {
      diag -= au[i] / h2;
      if (k + 1 < m) op.at(k, k + 1) = au[i] / h2;
    }
    op.at(k, k) = diag;
    op.at(k, m + k) = -cross;

    // psi row: zero flux at the growing (left) end of V.
    const int r = m + k;
    const bool psi_left_flux = !(mixed && i == 1);
    double dg = -av[i] / h2 - dv;
    if (k + 1 < m) op.at(r, r + 1) = av[i] / h2;
    if (psi_left_flux) {
      dg -= av[i - 1] / h2;
      if (k > 0) op.at(r, r - 1) = av[i - 1] / h2;
    }
    op.at(r, r) = dg;
    op.at(r, k) = -cross;
  }
  if (op.zeroth_order_scale <= 0.0) op.zeroth_order_scale = 1.0;
  return op;
}

std::vector<double> translation_mode(const SolutionPair& pair) {
  const int m = pair.grid.n - 2;
  const auto du = diff_central(pair.U);
  const auto dv = diff_central(pair.V);
  std::vector<double> t(2 * m);
  for (int k = 0; k < m; ++k) {
    t[k] = du[k + 1];
    t[m + k] = dv[k + 1];
  }
  return t;
}

std::vector<double> amplitude_mode(const SolutionPair& pair) {
  const int m = pair.grid.n - 2;
  std::vector<double> t(2 * m);
  for (int k = 0; k < m; ++k) {
    t[k] = pair.U[k + 1];
    t[m + k] = pair.V[k + 1];
  }
  return t;
}

double operator_residual(const LinearizedOperator& op, const std::vector<double>& x) {
  const std::vector<double> y = op.apply(x);
  const double nx = sup_norm(x);
  if (nx == 0.0) return 0.0;
  return sup_norm(y) / (nx * op.zeroth_order_scale);
}

KernelReport kernel_check(const LinearizedOperator& op, const SolutionPair& pair,
                          const KernelOptions& opts) {
  const int d = op.dimension;
  std::vector<double> a = op.matrix;
  for (int r = 0; r < d; ++r) {
    double* row = &a[static_cast<std::size_t>(r) * d];
    double mx = 0.0;
    for (int c = 0; c < d; ++c) mx = std::max(mx, std::abs(row[c]));
    if (mx > 0.0)
      for (int c = 0; c < d; ++c) row[c] /= mx;
  }
  std::vector<double> s(d), vt(static_cast<std::size_t>(d) * d), superb(std::max(1, d - 1));
  double dummy = 0.0;
  const lapack_int info = LAPACKE_dgesvd(LAPACK_ROW_MAJOR, 'N', 'A', d, d, a.data(), d, s.data(),
                                         &dummy, 1, vt.data(), d, superb.data());
  if (info != 0) {
    std::ostringstream os;
    os << "singular value decomposition failed (info=" << info << ")";
    throw NoConvergence(os.str());
  }
  KernelReport r;
  r.sigma1 = s[d - 1];
  r.sigma2 = d > 1 ? s[d - 2] : s[d - 1];
  r.gap = r.sigma2 / std::max(r.sigma1, 1e-300);

  const std::vector<double> t = translation_mode(pair);
  const double* v = &vt[static_cast<std::size_t>(d - 1) * d];
  const Grid& g = pair.grid;
  const int m = g.n - 2;
  const double lim = g.b - opts.margin;
  double dot = 0, nv = 0, nt = 0;
  for (int k = 0; k < m; ++k) {
    if (std::abs(g.x(k + 1)) > lim) continue;
    for (int idx : {k, m + k}) {
      dot += v[idx] * t[idx];
      nv += v[idx] * v[idx];
      nt += t[idx] * t[idx];
    }
  }
  r.cosine = (nv > 0 && nt > 0) ? std::abs(dot) / std::sqrt(nv * nt) : 0.0;
  r.pass = r.gap >= opts.gap && r.cosine >= opts.cosine;
  return r;
}

ComparisonResult comparison_test(const Profile& V, const Profile& W, const Profile& a_weight, int x0,
                                 double p, double residual_tol) {
  const Grid& g = V.grid;
  if (W.grid.n != g.n || a_weight.grid.n != g.n) throw InvalidArgument("comparison profiles must share a grid");
  if (x0 < 0 || x0 >= g.n - 1) throw InvalidArgument("comparison start node out of range");
  auto residual = [&](const Profile& y, int i) {
    const double fl = phi_p((y[i] - y[i - 1]) / g.h, p);
    const double fr = phi_p((y[i + 1] - y[i]) / g.h, p);
    return (fr - fl) / g.h - (p - 1.0) * a_weight[i] * phi_p(y[i], p);
  };
  ComparisonResult r;
  r.sub_residual_min = INFINITY;
  r.super_residual_max = -INFINITY;
  for (int i = std::max(1, x0); i + 1 < g.n; ++i) {
    r.sub_residual_min = std::min(r.sub_residual_min, residual(V, i));
    r.super_residual_max = std::max(r.super_residual_max, residual(W, i));
  }
  if (r.sub_residual_min < -residual_tol) throw HypothesisViolated("first argument is not a subsolution");
  if (r.super_residual_max > residual_tol) throw HypothesisViolated("second argument is not a supersolution");
  const double dV = (V[x0 + 1] - V[x0]) / g.h;
  const double dW = (W[x0 + 1] - W[x0]) / g.h;
  const bool value_ok = V[x0] <= W[x0] + 1e-12 * std::max(1.0, std::abs(W[x0]));
  const bool slope_ok = std::abs(dV - dW) <= 1e-12 * std::max(1.0, std::abs(dW));
  if (!value_ok && !slope_ok) throw HypothesisViolated("profiles are not matched at the start node");
  r.max_excess = -INFINITY;
  for (int i = x0; i < g.n; ++i) r.max_excess = std::max(r.max_excess, V[i] - W[i]);
  r.pass = r.max_excess <= 1e-8;
  return r;
}

namespace {

template <class Energy>
double fd_compare(std::vector<Profile*> vars, const std::vector<const Profile*>& grads, Energy energy) {
  double worst = 0.0, scale = 0.0;
  for (const Profile* gr : grads) scale = std::max(scale, gr->max_abs());
  if (scale == 0.0) scale = 1.0;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    Profile& x = *vars[k];
    for (int i = 1; i + 1 < x.size(); ++i) {
      const double x0 = x[i];
      const double step = 1e-6 * (1.0 + std::abs(x0));
      x[i] = x0 + step;
      const double ep = energy();
      x[i] = x0 - step;
      const double em = energy();
      x[i] = x0;
      const double fd = (ep - em) / (2.0 * step);
      worst = std::max(worst, std::abs((*grads[k])[i] - fd) / scale);
    }
  }
  return worst;
}

}  // namespace

double gradient_fd_check_limit(const Profile& U, double p, double eps) {
  Profile x = U;
  const Profile g = bvp::energy_gradient(U, p, eps);
  return fd_compare({&x}, {&g}, [&] { return bvp::energy_limit(x, p, eps); });
}

double gradient_fd_check_pair(const Profile& U, const Profile& V, double p, double eps) {
  Profile x = U, y = V;
  const auto [gu, gv] = bvp::energy_pair_gradient(U, V, p, eps);
  return fd_compare({&x, &y}, {&gu, &gv}, [&] { return bvp::energy_pair(x, y, p, eps); });
}

double gradient_fd_check_lambda(const Profile& u, const Profile& v, const lambda::LambdaParams& params,
                                double eps) {
  Profile x = u, y = v;
  const auto [gu, gv] = lambda::energy_lambda_gradient(u, v, params, eps);
  return fd_compare({&x, &y}, {&gu, &gv}, [&] { return lambda::energy_lambda(x, y, params, eps); });
}

}  // namespace plap::verify
