#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace plap {

/// Uniform mesh on [a, b] with n nodes; node i sits at a + i*h.
struct Grid {
  double a = 0.0;
  double b = 1.0;
  int n = 3;
  double h = 0.5;

  /// Throws InvalidArgument unless b > a and n >= 3.
  static Grid uniform(double a, double b, int n);

  double x(int i) const { return a + i * h; }
  std::vector<double> nodes() const;
  /// Index of the node closest to x (clamped to [0, n-1]).
  int nearest(double x) const;
};

/// A real function sampled on the nodes of a Grid.
struct Profile {
  Grid grid;
  std::vector<double> values;

  Profile() = default;
  /// Throws InvalidArgument on length mismatch or non-finite entries.
  Profile(const Grid& g, std::vector<double> v);

  static Profile sample(const Grid& g, const std::function<double(double)>& f);
  static Profile zeros(const Grid& g) { return Profile(g, std::vector<double>(g.n, 0.0)); }

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
  double max_abs() const;
};

struct Exponent {
  double p = 2.0;
  double eps = 0.0;

  /// Throws InvalidArgument unless p > 1 and eps >= 0.
  void validate() const;
};

// s -> |s|^{p-2} s, extended by 0 at s = 0.
double phi_p(double s, double p);
// Inverse of phi_p: z -> |z|^{1/(p-1)-1} z.
double phi_p_inv(double z, double p);
// (s^2 + eps^2)^{(p-2)/2} s; equals phi_p when eps = 0.
double phi_p_reg(double s, double p, double eps);
// d/ds phi_p_reg(s, p, eps) = (s^2+eps^2)^{(p-4)/2} ((p-1) s^2 + eps^2).
double phi_p_reg_slope(double s, double p, double eps);

/// Cell difference quotients (f_{i+1} - f_i) / h, length n-1.
std::vector<double> diff_forward(const Profile& f);
/// Central differences at interior nodes, one-sided second order at the ends.
std::vector<double> diff_central(const Profile& f);

double quad_trapezoid(const Profile& f);
double quad_midpoint(std::span<const double> cells, double h);
/// Trapezoid weights of the grid (h, with h/2 at the two ends).
std::vector<double> trapezoid_weights(const Grid& g);

/// (integral |f|^p)^{1/p} by the trapezoid rule.
double lp_norm(const Profile& f, double p);

double sup_norm(std::span<const double> v);
double sup_distance(std::span<const double> a, std::span<const double> b);

}  // namespace plap
