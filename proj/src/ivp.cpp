#include "plap/ivp.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "plap/error.hpp"
#include "plap/tridiag.hpp"

namespace plap::ivp {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kTiny = 1e-300;
constexpr double kHandover = 1e-3;  // leave a Picard window once |y'| exceeds this fraction of the amplitude

double amplitude(double y, double dy) { return std::max(std::abs(y), std::abs(dy)); }

bool degenerate_slope(double y, double dy) {
  return std::abs(dy) < kSlopeSwitch * amplitude(y, dy);
}

using State = std::array<double, 2>;

struct FirstOrderSystem {
  double p;
  double weight;
  void operator()(const State& s, State& ds, double x) const {
    ds[0] = phi_p_inv(s[1], p);
    ds[1] = (p - 1.0) * weight * std::pow(x, p) * phi_p(s[0], p);
  }
};

// Event callback: 0 keeps going, any other value stops at the node that raised it.
using EventFn = std::function<int(double x, double y, double dy)>;

struct RunResult {
  Trajectory traj;
  int event = 0;
};

void fill_zero(Trajectory& t, double x, double x_max, double step) {
  const int extra = std::max(1, static_cast<int>(std::ceil((x_max - x) / step)));
  const double h = (x_max - x) / extra;
  for (int k = 1; k <= extra; ++k) {
    t.nodes.push_back(k == extra ? x_max : x + k * h);
    t.y.push_back(0.0);
    t.dy.push_back(0.0);
  }
}

RunResult integrate(const IvpSpec& spec, const EventFn& event) {
  RunResult out;
  Trajectory& t = out.traj;
  const double range = spec.x_max - spec.x0;
  const double min_step = 1e-12 * range;

  double x = spec.x0;
  double y = spec.y0;
  double dy = spec.y1;
  t.nodes.push_back(x);
  t.y.push_back(y);
  t.dy.push_back(dy);

  auto push = [&](double xn, double yn, double dyn) -> bool {
    t.nodes.push_back(xn);
    t.y.push_back(yn);
    t.dy.push_back(dyn);
    if (std::abs(yn) > kBlowUpGuard || !std::isfinite(yn) || !std::isfinite(dyn)) {
      t.nodes.pop_back();
      t.y.pop_back();
      t.dy.pop_back();
      t.status = Status::blow_up_detected;
      return false;
    }
    if (event) {
      out.event = event(xn, yn, dyn);
      if (out.event != 0) return false;
    }
    return true;
  };

  const FirstOrderSystem sys{spec.p, spec.weight};
  double dt = std::min(spec.step, range);

  while (x < spec.x_max) {
    if (amplitude(y, dy) < kTiny) {
      fill_zero(t, x, spec.x_max, spec.step);
      t.status = Status::identically_zero;
      return out;
    }

    if (degenerate_slope(y, dy)) {
      IvpSpec local = spec;
      local.x0 = x;
      local.y0 = y;
      local.y1 = dy;
      local.x_max = spec.x_max;
      PicardResult pr;
      try {
        pr = picard_solve_auto(local, std::min(0.5, spec.x_max - x));
      } catch (const NoContraction& e) {
        throw StepUnderflow(std::string("Picard window collapsed: ") + e.what());
      }
      const Grid& g = pr.y.grid;
      bool go_on = true;
      for (int i = 1; i < g.n && go_on; ++i) {
        const double xn = (i == g.n - 1) ? g.b : g.x(i);
        go_on = push(xn, pr.y[i], pr.dy[i]);
        x = xn;
        y = pr.y[i];
        dy = pr.dy[i];
        if (std::abs(dy) >= kHandover * amplitude(y, dy)) break;
      }
      if (!go_on) return out;
      dt = std::min(dt, spec.step);
      continue;
    }

    // Regular zone: adaptive Dormand-Prince on (y, phi_p(y')).
    auto stepper = odeint::make_controlled(kTiny, spec.tol, odeint::runge_kutta_dopri5<State>());
    State s{y, phi_p(dy, spec.p)};
    bool restart = false;
    while (x < spec.x_max && !restart) {
      double step = std::min({dt, spec.step, spec.x_max - x});
      const bool last = step >= spec.x_max - x;
      double xt = x;
      State trial = s;
      const auto res = stepper.try_step(sys, trial, xt, step);
      if (res == odeint::fail) {
        dt = step;
        if (dt < min_step) {
          std::ostringstream os;
          os << "adaptive step " << dt << " fell below " << min_step << " at x=" << x;
          throw StepUnderflow(os.str());
        }
        continue;
      }
      dt = step;
      s = trial;
      x = last ? spec.x_max : xt;
      y = s[0];
      dy = phi_p_inv(s[1], spec.p);
      if (!push(x, y, dy)) return out;
      if (degenerate_slope(y, dy) || amplitude(y, dy) < kTiny) restart = true;
    }
  }

  bool nonpositive = true;
  for (double v : t.y)
    if (v > 0.0) nonpositive = false;
  if (nonpositive) t.status = Status::sign_classified_negative;
  return out;
}

double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x,
               bool derivative) {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  if (!derivative) {
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  }
  const double g00 = 6 * s * s - 6 * s;
  const double g10 = 3 * s * s - 4 * s + 1;
  const double g01 = -g00;
  const double g11 = 3 * s * s - 2 * s;
  return (g00 * y0 + g01 * y1) / h + g10 * d0 + g11 * d1;
}

}  // namespace

void IvpSpec::validate() const {
  if (!(p > 1.0)) throw InvalidArgument("ivp requires p > 1");
  if (!(x0 >= 0.0)) throw InvalidArgument("ivp requires x0 >= 0");
  if (!(x_max > x0)) throw InvalidArgument("ivp requires x_max > x0");
  if (!(step > 0.0)) throw InvalidArgument("ivp requires step > 0");
  if (!(tol > 0.0)) throw InvalidArgument("ivp requires tol > 0");
  if (!(weight >= 0.0)) throw InvalidArgument("ivp requires weight >= 0");
  if (!std::isfinite(y0) || !std::isfinite(y1)) throw InvalidArgument("ivp initial data must be finite");
}

const char* status_name(Status s) {
  switch (s) {
    case Status::reached_xmax: return "reached_xmax";
    case Status::identically_zero: return "identically_zero";
    case Status::blow_up_detected: return "blow_up_detected";
    case Status::sign_classified_negative: return "sign_classified_negative";
  }
  return "unknown";
}

double Trajectory::value_at(double x) const {
  if (nodes.empty()) return 0.0;
  if (x <= nodes.front()) return y.front();
  if (x >= nodes.back()) return y.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
  return hermite(nodes[i], nodes[i + 1], y[i], y[i + 1], dy[i], dy[i + 1], x, false);
}

double Trajectory::slope_at(double x) const {
  if (nodes.empty()) return 0.0;
  if (x <= nodes.front()) return dy.front();
  if (x >= nodes.back()) return dy.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
  return hermite(nodes[i], nodes[i + 1], y[i], y[i + 1], dy[i], dy[i + 1], x, true);
}

namespace {

// Returns T(y) and its derivative on y's grid.
std::pair<std::vector<double>, std::vector<double>> picard_apply(const Profile& y,
                                                                 const IvpSpec& spec) {
  const Grid& g = y.grid;
  const double p = spec.p;
  std::vector<double> f(g.n);
  for (int i = 0; i < g.n; ++i)
    f[i] = (p - 1.0) * spec.weight * std::pow(g.x(i), p) * phi_p(y[i], p);
  std::vector<double> ty(g.n), dty(g.n);
  const double z0 = phi_p(spec.y1, p);
  double inner = 0.0;
  dty[0] = spec.y1;
  ty[0] = spec.y0;
  for (int i = 1; i < g.n; ++i) {
    inner += 0.5 * g.h * (f[i - 1] + f[i]);
    dty[i] = phi_p_inv(z0 + inner, p);
    ty[i] = ty[i - 1] + 0.5 * g.h * (dty[i - 1] + dty[i]);
  }
  return {std::move(ty), std::move(dty)};
}

}  // namespace

Profile picard_map(const Profile& y, const IvpSpec& spec) {
  return Profile(y.grid, picard_apply(y, spec).first);
}

PicardResult picard_solve_local(const IvpSpec& spec, double delta, int nodes) {
  if (!(delta > 0.0)) throw InvalidArgument("Picard window requires delta > 0");
  const Grid g = Grid::uniform(spec.x0, spec.x0 + delta, std::max(nodes, 3));
  PicardResult r;
  r.delta = delta;
  Profile y = Profile::sample(g, [&](double x) { return spec.y0 + spec.y1 * (x - spec.x0); });

  double prev = -1.0;
  int bad = 0;
  constexpr int kMaxIter = 1000;
  for (int it = 1; it <= kMaxIter; ++it) {
    auto [ty, dty] = picard_apply(y, spec);
    const double diff = sup_distance(ty, y.values);
    const double scale = std::max(sup_norm(ty), kTiny);
    y.values = std::move(ty);
    r.dy = std::move(dty);
    r.iterations = it;
    if (diff <= spec.tol * scale || diff == 0.0) {
      r.y = y;
      return r;
    }
    if (prev > 100.0 * DBL_EPSILON * scale) {
      const double ratio = diff / prev;
      r.contraction_ratio = std::max(r.contraction_ratio, ratio);
      bad = ratio >= 1.0 ? bad + 1 : 0;
      if (bad >= 3) {
        std::ostringstream os;
        os << "Picard map is not contracting on a window of length " << delta;
        throw NoContraction(os.str());
      }
    }
    prev = diff;
  }
  throw NoContraction("Picard iteration did not reach the tolerance");
}

PicardResult picard_solve_auto(const IvpSpec& spec, double delta0, int nodes) {
  double delta = delta0;
  const double floor = 1e-14 * (1.0 + spec.x0);
  while (delta > floor) {
    try {
      return picard_solve_local(spec, delta, nodes);
    } catch (const NoContraction&) {
      delta *= 0.5;
    }
  }
  throw NoContraction("no contracting Picard window found");
}

Trajectory ivp_solve(const IvpSpec& spec) {
  spec.validate();
  return integrate(spec, nullptr).traj;
}

Classification classify(const IvpSpec& spec, Trajectory* out) {
  spec.validate();
  RunResult r = integrate(spec, [](double, double y, double dy) {
    if (y < 0.0) return 1;
    if (dy > 0.0) return 2;
    return 0;
  });
  Classification c = Classification::reached_end;
  if (r.event == 1) c = Classification::went_negative;
  else if (r.event == 2 || r.traj.status == Status::blow_up_detected) c = Classification::turned_increasing;
  if (out) *out = std::move(r.traj);
  return c;
}

namespace {

struct Segment {
  Trajectory traj;
  int bisections = 0;
};

// Bisects on a scalar parameter t in [lo, hi] where make(t) builds the initial data.
// lo must classify went_negative and hi turned_increasing.
template <class Make>
Segment bisect_segment(Make make, double lo, double hi, double rel_tol, double keep_until) {
  Segment seg;
  Trajectory mid_traj;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Classification c = classify(make(mid), &mid_traj);
    ++seg.bisections;
    if (c == Classification::reached_end) break;
    if (c == Classification::went_negative) lo = mid;
    else hi = mid;
    if (std::abs(hi - lo) <= rel_tol * std::abs(mid)) {
      classify(make(0.5 * (lo + hi)), &mid_traj);
      break;
    }
  }
  // Keep the part that is still shadowing the decaying solution.
  Trajectory& t = mid_traj;
  std::size_t cut = t.nodes.size() - 1;
  const double y_start = t.y.front();
  for (std::size_t i = 1; i < t.nodes.size(); ++i) {
    if (t.y[i] <= keep_until * y_start) {
      cut = i;
      break;
    }
  }
  // Drop a tail that already left the decaying branch.
  while (cut > 0 && (t.y[cut] <= 0.0 || t.dy[cut] >= 0.0)) --cut;
  if (cut == 0) throw NoConvergence("shooting segment made no progress");
  t.nodes.resize(cut + 1);
  t.y.resize(cut + 1);
  t.dy.resize(cut + 1);
  seg.traj = std::move(t);
  return seg;
}

IvpSpec shoot_spec(double p, double x0, double y0, double y1, double x_far, const ShootOptions& o) {
  IvpSpec s;
  s.p = p;
  s.x0 = x0;
  s.y0 = y0;
  s.y1 = y1;
  s.x_max = x_far;
  s.step = o.step;
  s.tol = 1e-12;
  s.weight = o.weight;
  return s;
}

}  // namespace

ShootResult shoot_decaying(double p, double y1, double x_far, std::pair<double, double> bracket,
                           const ShootOptions& opts) {
  if (!(p > 1.0)) throw InvalidArgument("shooting requires p > 1");
  if (!(y1 < 0.0)) throw InvalidArgument("shooting requires a negative initial slope");
  if (!(x_far > 0.0)) throw InvalidArgument("shooting requires x_far > 0");
  auto [lo, hi] = bracket;
  if (!(lo > 0.0) || !(hi > lo)) throw BracketInvalid("bracket must satisfy 0 < lo < hi");

  auto first = [&](double y0) { return shoot_spec(p, 0.0, y0, y1, x_far, opts); };
  const Classification c_lo = classify(first(lo));
  const Classification c_hi = classify(first(hi));
  if (c_lo == c_hi || c_lo != Classification::went_negative ||
      c_hi != Classification::turned_increasing) {
    throw BracketInvalid("bracket endpoints do not straddle the decaying solution");
  }

  ShootResult out;
  Segment seg = bisect_segment(first, lo, hi, opts.tol, opts.restart_decay);
  out.y0 = seg.traj.y.front();
  out.bisections += seg.bisections;
  out.segments = 1;
  Trajectory& t = out.trajectory;
  t = std::move(seg.traj);

  while (t.nodes.back() < x_far) {
    const double xs = t.nodes.back();
    const double ys = t.y.back();
    const double ds = t.dy.back();
    auto next = [&](double slope) { return shoot_spec(p, xs, ys, slope, x_far, opts); };
    // Slope bracket [s_lo, s_hi] with s_lo steep enough to go negative, s_hi = 0 turns up.
    double s_lo = 4.0 * ds;
    for (int k = 0; k < 60 && classify(next(s_lo)) != Classification::went_negative; ++k) s_lo *= 2.0;
    Segment s = bisect_segment(next, s_lo, 0.0, opts.tol, opts.restart_decay);
    out.bisections += s.bisections;
    ++out.segments;
    for (std::size_t i = 1; i < s.traj.nodes.size(); ++i) {
      t.nodes.push_back(s.traj.nodes[i]);
      t.y.push_back(s.traj.y[i]);
      t.dy.push_back(s.traj.dy[i]);
    }
    if (out.segments > 10000) throw NoConvergence("marching shooting did not reach x_far");
  }
  t.status = Status::reached_xmax;
  if (!(t.y.back() <= opts.decay_floor * out.y0)) {
    std::ostringstream os;
    os << "shooting trajectory did not decay: y(x_far)/y0 = " << t.y.back() / out.y0;
    throw NoConvergence(os.str());
  }
  return out;
}

ShootResult shoot_decaying(double p, double y1, double x_far, const ShootOptions& opts) {
  if (!(y1 < 0.0)) throw InvalidArgument("shooting requires a negative initial slope");
  auto cls = [&](double y0) { return classify(shoot_spec(p, 0.0, y0, y1, x_far, opts)); };
  double lo = 0.1 * std::abs(y1);
  double hi = std::abs(y1);
  for (int k = 0; k < 200 && cls(lo) != Classification::went_negative; ++k) lo *= 0.5;
  for (int k = 0; k < 200 && cls(hi) != Classification::turned_increasing; ++k) hi *= 2.0;
  return shoot_decaying(p, y1, x_far, {lo, hi}, opts);
}

void ScaledShootingSpec::validate() const {
  if (!(beta > 0.0)) throw InvalidArgument("scaled shooting requires beta > 0");
  if (!(gamma > 0.0)) throw InvalidArgument("scaled shooting requires gamma > 0");
}

Trajectory scaled_decaying(const ScaledShootingSpec& spec, double p, double x_far) {
  spec.validate();
  const double s = std::sqrt(spec.beta);
  const ShootResult unit = shoot_decaying(p, -1.0, s * x_far);
  Trajectory w;
  const Trajectory& u = unit.trajectory;
  w.nodes.reserve(u.nodes.size());
  for (std::size_t i = 0; i < u.nodes.size(); ++i) {
    w.nodes.push_back(u.nodes[i] / s);
    w.y.push_back(spec.gamma / s * u.y[i]);
    w.dy.push_back(spec.gamma * u.dy[i]);
  }
  w.nodes.back() = x_far;
  w.status = u.status;
  return w;
}

double perron_subsolution(double x) { return std::exp(-(x * x + 2.0 * x)); }

std::vector<double> discrete_residual(const Profile& y, double p, double weight) {
  const Grid& g = y.grid;
  std::vector<double> r(g.n, 0.0);
  for (int i = 1; i + 1 < g.n; ++i) {
    const double fl = phi_p((y[i] - y[i - 1]) / g.h, p);
    const double fr = phi_p((y[i + 1] - y[i]) / g.h, p);
    r[i] = (fr - fl) / g.h - (p - 1.0) * weight * std::pow(g.x(i), p) * phi_p(y[i], p);
  }
  return r;
}

PerronResult perron_construct(double p, double R, int n, int max_iter, double tol) {
  if (!(p > 1.0)) throw InvalidArgument("Perron construction requires p > 1");
  if (!(R > 0.0)) throw InvalidArgument("Perron construction requires R > 0");
  const Grid g = Grid::uniform(0.0, R, n);
  Profile sub = Profile::sample(g, perron_subsolution);
  Profile y = sub;
  PerronResult out;

  // Frozen-coefficient relaxation: each sweep solves the linear problem
  // (a_c (y_{i+1}-y_i) - a_{c-1}(y_i - y_{i-1}))/h^2 = b_i y_i with a, b taken
  // from the previous iterate, then clamps into [w2, 1].
  constexpr double kSlopeFloor = 1e-12;
  constexpr double kValueFloor = 1e-300;
  const int m = n - 2;
  std::vector<double> lower(m), diag(m), upper(m), rhs(m), a(n - 1);
  double relax = 1.0;
  double prev_update = INFINITY;
  for (int it = 1; it <= max_iter; ++it) {
    for (int c = 0; c < n - 1; ++c) {
      const double s = std::max(std::abs((y[c + 1] - y[c]) / g.h), kSlopeFloor);
      a[c] = std::pow(s, p - 2.0);
    }
    const double h2 = g.h * g.h;
    for (int k = 0; k < m; ++k) {
      const int i = k + 1;
      const double yi = std::max(std::abs(y[i]), kValueFloor);
      const double b = (p - 1.0) * std::pow(g.x(i), p) * std::pow(yi, p - 2.0);
      lower[k] = -a[i - 1] / h2;
      upper[k] = -a[i] / h2;
      diag[k] = (a[i - 1] + a[i]) / h2 + b;
      rhs[k] = 0.0;
    }
    rhs.front() += a[0] / h2 * 1.0;
    rhs.back() += a[n - 2] / h2 * sub[n - 1];
    const std::vector<double> sol = detail::solve_tridiagonal(lower, diag, upper, rhs);

    double update = 0.0;
    bool clamped = false;
    double theta = relax;
    Profile next = y;
    next[0] = 1.0;
    next[n - 1] = sub[n - 1];
    for (int k = 0; k < m; ++k) {
      double v = sol[k];
      if (v < sub[k + 1] || v > 1.0) clamped = true;
      v = std::clamp(v, sub[k + 1], 1.0);
      v = y[k + 1] + theta * (v - y[k + 1]);
      update = std::max(update, std::abs(v - y[k + 1]));
      next[k + 1] = v;
    }
    y = std::move(next);
    // Frozen coefficients overshoot for p > 2; damp when the update stops shrinking.
    if (update > prev_update && relax > 1.0 / 64) relax *= 0.5;
    prev_update = update;
    out.iterations = it;
    out.update = update;
    out.clamp_active = clamped;
    if (update <= tol) {
      out.residual = sup_norm(discrete_residual(y, p));
      out.y = std::move(y);
      return out;
    }
  }
  std::ostringstream os;
  os << "Perron relaxation did not converge in " << max_iter << " sweeps (last update "
     << out.update << ")";
  throw NoConvergence(os.str());
}

}  // namespace plap::ivp
