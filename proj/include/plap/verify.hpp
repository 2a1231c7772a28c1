#pragma once

// Certification diagnostics over limit pairs: first integral, symmetry,
// monotonicity, asymptotics, decay, linearized kernel, comparison principle.

#include <string>
#include <vector>

#include "plap/core.hpp"
#include "plap/pair.hpp"

namespace plap::lambda {
struct LambdaParams;
}

namespace plap::verify {

struct FirstIntegral {
  Profile F;          // |U'|^p + |V'|^p - U^p V^p, central differences
  double level = 0;   // median of F over |x| <= window
  double drift = 0;   // max |F - level| / max(|level|, 1e-12) over |x| <= window
  double window = 0;
};

/// window <= 0 selects R/2.
FirstIntegral first_integral(const SolutionPair& pair, double window = 0.0);

/// max_i |V_i - U_{n-1-i}|.
double symmetry_defect(const SolutionPair& pair);

struct MonotonicityReport {
  bool u_increasing = false;  // forward differences of U >= -1e-8
  bool v_decreasing = false;  // forward differences of V <= 1e-8
  bool u_convex = false;      // second differences of U >= -1e-6
  bool v_convex = false;
  double max_slope_sum = 0;   // max |U'| + |V'|
  double min_u_step = 0;
  double max_v_step = 0;
  double min_u_curvature = 0;
  bool pass() const { return u_increasing && v_decreasing && u_convex && std::isfinite(max_slope_sum); }
};

MonotonicityReport monotonicity_report(const SolutionPair& pair);

struct AsymptoticsReport {
  // tails
  double slope_right = 0;
  double slope_left = 0;
  double b1_hat = 0;
  double b2_hat = 0;
  bool approach_decreasing = false;  // U - T^{1/p} x nonincreasing on the right window
  double approach_min_excess = 0;    // min over the window of (U - T^{1/p} x) - b1_hat
  // Gaussian side
  double s_hat = 0;  // fitted decay rate: log U ~ c - s_hat x^2
  double k_hat = 0;
  double K_hat = 0;
  double m_hat = 0;
  double M_hat = 0;
  double c_hat = 0;
  double C_hat = 0;
  double r_squared = 0;
  int nodes_used = 0;
  bool decay_pass() const {
    return r_squared >= 0.99 && c_hat > 0 && c_hat <= C_hat && std::isfinite(C_hat);
  }
};

/// Tail slopes and intercepts on [R/2, R-1] (mirror for V). T_inf <= 0 uses the pair's own level.
/// Throws WindowTooSmall.
AsymptoticsReport asymptote_fit(const SolutionPair& pair, double T_inf = -1.0);

/// Least-squares fit of log U against x^2 on [x_lo, x_hi]. Throws WindowEmpty.
AsymptoticsReport gaussian_decay_fit(const SolutionPair& pair, double x_lo = -6.0, double x_hi = -3.0);

struct LimitsReport {
  double max_product = 0;  // U^{p-1}V^p, U^p V^{p-1} near both ends
  double max_value = 0;    // U, |U'| at the left end and V, |V'| at the right end
  double threshold = 1e-3;
  bool pass() const { return max_product <= threshold && max_value <= threshold; }
};

LimitsReport limits_report(const SolutionPair& pair, double threshold = 1e-3);

enum class LinearBoundary {
  mixed,      // Dirichlet at each component's decaying end, zero flux at its growing end
  dirichlet,  // zero Dirichlet at both truncated ends
};

struct LinearizedOperator {
  int dimension = 0;
  std::vector<double> matrix;  // row-major, dimension x dimension
  Grid grid;
  LinearBoundary boundary = LinearBoundary::mixed;
  int degenerate_cells = 0;
  double zeroth_order_scale = 0;  // max row sum of the zeroth-order coefficients

  double& at(int r, int c) { return matrix[static_cast<std::size_t>(r) * dimension + c]; }
  double at(int r, int c) const { return matrix[static_cast<std::size_t>(r) * dimension + c]; }
  std::vector<double> apply(const std::vector<double>& x) const;
};

struct LinearizeOptions {
  double eps = 1e-6;  // regularization the pair was solved with
  LinearBoundary boundary = LinearBoundary::mixed;
};

/// Jacobian of the discrete system, divided by (p-1):
///   (|U'|^{p-2} phi')' - (p-1) U^{p-2} V^p phi - p U^{p-1} V^{p-1} psi
///   (|V'|^{p-2} psi')' - (p-1) V^{p-2} U^p psi - p U^{p-1} V^{p-1} phi
LinearizedOperator linearize(const SolutionPair& pair, const LinearizeOptions& opts = {});

/// Interior samples of (U', V') stacked, central differences.
std::vector<double> translation_mode(const SolutionPair& pair);
/// Interior samples of (U, V) stacked.
std::vector<double> amplitude_mode(const SolutionPair& pair);

/// ||A x||_inf / (||x||_inf * zeroth_order_scale).
double operator_residual(const LinearizedOperator& op, const std::vector<double>& x);

struct KernelOptions {
  double gap = 1e2;
  double cosine = 0.99;
  double margin = 2.0;  // alignment window |x| <= R - margin
};

struct KernelReport {
  double sigma1 = 0;
  double sigma2 = 0;
  double gap = 0;
  double cosine = 0;
  bool pass = false;
};

/// Two smallest singular values of the row-equilibrated operator and alignment of
/// the least singular vector with (U', V').
KernelReport kernel_check(const LinearizedOperator& op, const SolutionPair& pair,
                          const KernelOptions& opts = {});

struct ComparisonResult {
  bool pass = false;
  double max_excess = 0;  // max_{i >= x0} V_i - W_i
  double sub_residual_min = 0;
  double super_residual_max = 0;
};

/// Discrete comparison for phi_p(y')' = (p-1) a(x) phi_p(y): V subsolution, W supersolution,
/// matched at node x0. Throws HypothesisViolated.
ComparisonResult comparison_test(const Profile& V, const Profile& W, const Profile& a_weight, int x0,
                                 double p, double residual_tol = 1e-8);

/// Normwise relative deviation max_i |g_i - fd_i| / ||g||_inf of the analytic gradient
/// against central differences with step 1e-6 (1 + |value|).
double gradient_fd_check_limit(const Profile& U, double p, double eps);
double gradient_fd_check_pair(const Profile& U, const Profile& V, double p, double eps);
double gradient_fd_check_lambda(const Profile& u, const Profile& v, const lambda::LambdaParams& params,
                                double eps);

}  // namespace plap::verify
