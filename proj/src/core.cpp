#include "plap/core.hpp"

#include <algorithm>
#include <sstream>

#include "plap/error.hpp"

namespace plap {

Grid Grid::uniform(double a, double b, int n) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
    std::ostringstream os;
    os << "grid requires finite b > a (got a=" << a << ", b=" << b << ")";
    throw InvalidArgument(os.str());
  }
  if (n < 3) throw InvalidArgument("grid requires n >= 3 nodes");
  return Grid{a, b, n, (b - a) / (n - 1)};
}

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = x(i);
  return xs;
}

int Grid::nearest(double xq) const {
  const long i = std::lround((xq - a) / h);
  return static_cast<int>(std::clamp<long>(i, 0, n - 1));
}

Profile::Profile(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.n)
    throw InvalidArgument("profile length does not match grid node count");
  for (double x : values)
    if (!std::isfinite(x)) throw InvalidArgument("profile contains a non-finite value");
}

Profile Profile::sample(const Grid& g, const std::function<double(double)>& f) {
  std::vector<double> v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = f(g.x(i));
  return Profile(g, std::move(v));
}

double Profile::max_abs() const { return sup_norm(values); }

void Exponent::validate() const {
  if (!(p > 1.0)) throw InvalidArgument("exponent requires p > 1");
  if (!(eps >= 0.0)) throw InvalidArgument("regularization requires eps >= 0");
}

double phi_p(double s, double p) {
  if (s == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(s), p - 1.0), s);
}

double phi_p_inv(double z, double p) {
  if (z == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(z), 1.0 / (p - 1.0)), z);
}

double phi_p_reg(double s, double p, double eps) {
  if (eps == 0.0) return phi_p(s, p);
  return std::pow(s * s + eps * eps, 0.5 * (p - 2.0)) * s;
}

double phi_p_reg_slope(double s, double p, double eps) {
  const double q = s * s + eps * eps;
  if (q == 0.0) return p == 2.0 ? 1.0 : (p > 2.0 ? 0.0 : INFINITY);
  return std::pow(q, 0.5 * (p - 4.0)) * ((p - 1.0) * s * s + eps * eps);
}

std::vector<double> diff_forward(const Profile& f) {
  const int n = f.size();
  std::vector<double> d(n - 1);
  for (int i = 0; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i]) / f.grid.h;
  return d;
}

std::vector<double> diff_central(const Profile& f) {
  const int n = f.size();
  const double h = f.grid.h;
  std::vector<double> d(n);
  for (int i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

double quad_trapezoid(const Profile& f) {
  const int n = f.size();
  double s = 0.5 * (f[0] + f[n - 1]);
  for (int i = 1; i + 1 < n; ++i) s += f[i];
  return s * f.grid.h;
}

double quad_midpoint(std::span<const double> cells, double h) {
  double s = 0.0;
  for (double c : cells) s += c;
  return s * h;
}

std::vector<double> trapezoid_weights(const Grid& g) {
  std::vector<double> w(g.n, g.h);
  w.front() = w.back() = 0.5 * g.h;
  return w;
}

double lp_norm(const Profile& f, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm requires p >= 1");
  std::vector<double> a(f.size());
  for (int i = 0; i < f.size(); ++i) a[i] = std::pow(std::abs(f[i]), p);
  return std::pow(quad_trapezoid(Profile(f.grid, std::move(a))), 1.0 / p);
}

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace plap
