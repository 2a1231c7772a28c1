#pragma once

// Variational construction of the limit pair on [-R, R]: minimization of
//   (1/p) int |U'|^p + (1/p) int |V'|^p + ((p-1)/p) int |U|^p |V|^p
// with U(-R) = 0, U(R) = R, V(-R) = R, V(R) = 0, whose Euler-Lagrange system is
//   |U'|^{p-2} U'' = U^{p-1} V^p,  |V'|^{p-2} V'' = V^{p-1} U^p.
// For eps > 0 every power |s|^p is replaced by (s^2 + eps^2)^{p/2} - eps^p, which keeps the
// discrete energy smooth at flat slopes and, for p < 2, at vanishing values.

#include <vector>

#include "plap/core.hpp"
#include "plap/pair.hpp"

namespace plap::bvp {

struct LimitProblem {
  double p = 2.0;
  double R = 8.0;
  int n = 801;
  std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-6};
  double tol = 1e-10;
  bool enforce_symmetry = true;
  int max_iter = 20000;  // per eps stage

  /// Throws InvalidArgument.
  void validate() const;
};

/// Discrete energy of U with V(x) := U(-x) (V_i = U_{n-1-i}).
double energy_limit(const Profile& U, double p, double eps);
/// Gradient of energy_limit with respect to every node; boundary entries are 0.
Profile energy_gradient(const Profile& U, double p, double eps);

/// Discrete energy of an unconstrained pair.
double energy_pair(const Profile& U, const Profile& V, double p, double eps);
/// Gradients (dE/dU, dE/dV); boundary entries are 0.
std::pair<Profile, Profile> energy_pair_gradient(const Profile& U, const Profile& V, double p,
                                                 double eps);

/// Euler-Lagrange residual at interior nodes:
///   (phi_reg(U'_{i+1/2}) - phi_reg(U'_{i-1/2}))/h - (p-1) phi_reg(U_i) rho(V_i).
std::vector<double> el_residual(const Profile& U, const Profile& V, double p, double eps);

struct MinimizeTrace {
  std::vector<double> energy;  // energy after every accepted step
  std::vector<int> stage;      // eps stage index of each entry
};

SolutionPair minimize_limit(const LimitProblem& prob, MinimizeTrace* trace = nullptr);
SolutionPair solve_free_pair(const LimitProblem& prob, MinimizeTrace* trace = nullptr);

struct ContinuationReport {
  std::vector<double> R;
  std::vector<double> distances;      // sup-distance of U between consecutive R on the window
  std::vector<double> drift;          // first-integral drift on the window, per R
  std::vector<double> min_excess;     // min over the window of U - x^+, per R
  std::vector<SolutionPair> pairs;
};

/// Solves at each R with spacing h and compares on [-w, w].
ContinuationReport continue_in_R(double p, const std::vector<double>& R_list, double w,
                                 double h = 0.02, double tol = 1e-10);

struct BarrierReport {
  bool pass = false;
  double max_violation = 0.0;  // max_i (V_i - Vbar(x_i)), may be negative
  double slack = 1e-6;
};

/// Compares V against the explicit supersolution built from the decaying ODE solution.
BarrierReport barrier_check(const SolutionPair& pair, double p);
/// The barrier itself, sampled on the pair's grid.
Profile barrier_profile(const Grid& g, double p);

}  // namespace plap::bvp
