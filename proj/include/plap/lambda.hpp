#pragma once

// Finite-Lambda system on ]a, b[: minimization of
//   (1/p) int |u'|^p + (1/p) int |v'|^p + alpha int |u|^{p+2}/(p+2) + beta int |v|^{p+2}/(p+2)
//   + (Lambda/p) int |u|^p |v|^p
// under int |u|^p = int |v|^p = 1, Dirichlet data at a and b.

#include <vector>

#include "plap/core.hpp"
#include "plap/pair.hpp"

namespace plap::lambda {

struct LambdaParams {
  double p = 2.0;
  double alpha = 1.0;
  double beta = 1.0;
  double Lambda = 100.0;
  double a = -1.0;
  double b = 1.0;
  int n = 801;
  std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-6};
  double tol = 1e-9;
  int max_iter = 20000;  // per eps stage
  bool u_left = true;    // u starts as the left bump, v as the right one

  /// Throws InvalidArgument.
  void validate() const;
};

struct LambdaSolution {
  Profile u;
  Profile v;
  double lambda1 = 0;
  double lambda2 = 0;
  double T_Lambda = 0;
  double T_drift = 0;
  double residual = 0;  // sup-norm of the constrained Euler-Lagrange residual
  double energy = 0;
  int iterations = 0;
};

double energy_lambda(const Profile& u, const Profile& v, const LambdaParams& params, double eps);
/// Gradients with respect to every node; boundary entries are 0.
std::pair<Profile, Profile> energy_lambda_gradient(const Profile& u, const Profile& v,
                                                   const LambdaParams& params, double eps);

struct LambdaTrace {
  std::vector<double> energy;
  std::vector<int> stage;
  std::vector<double> norm_defect;  // max(|lp(u)-1|, |lp(v)-1|) after each step
};

LambdaSolution minimize_lambda(const LambdaParams& params, LambdaTrace* trace = nullptr);

/// lambda1 = int |u'|^p + alpha int u^{p+2} + Lambda int u^p v^p, and the mirror formula.
std::pair<double, double> multipliers(const Profile& u, const Profile& v, const LambdaParams& params);

struct TProfile {
  Profile T;
  double level = 0;
  double drift = 0;
};

/// Pointwise first integral
///   (p-1)(|u'|^p + |v'|^p) - Lambda u^p v^p - p alpha u^{p+2}/(p+2) - p beta v^{p+2}/(p+2)
///   + lambda1 u^p + lambda2 v^p
/// with its median and relative drift over interior nodes.
TProfile t_lambda_profile(const Profile& u, const Profile& v, double lambda1, double lambda2,
                          const LambdaParams& params);

struct BlowupReport {
  double x_Lambda = 0;
  double m_Lambda = 0;
  double scale_invariant = 0;  // Lambda m^{2p}
  double edge_scale = 0;       // Lambda^{1/(2p)} min(x - a, b - x)
  double edge_scale_sqrt = 0;  // Lambda^{1/2} min(x - a, b - x)
  int root_count = 0;
  Profile rescaled_u;
  Profile rescaled_v;
};

/// Interface point, common value and profiles rescaled by y = (x - x_Lambda)/m on [-window, window]
/// (clipped to the interval). Throws NoCrossing.
BlowupReport blowup_extract(const LambdaSolution& sol, const LambdaParams& params,
                            double window = 10.0, int samples = 801);

struct SweepEntry {
  double Lambda = 0;
  double lambda1 = 0;
  double lambda2 = 0;
  double T_Lambda = 0;
  double T_drift = 0;
  double m_Lambda = 0;
  double x_Lambda = 0;
  double scale_invariant = 0;
  double edge_scale = 0;
  double edge_scale_sqrt = 0;
  double rescaled_distance = 0;
  double max_slope = 0;  // max |u'|, |v'|
  int iterations = 0;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
};

/// Sup-distance on |y| <= y_window between the rescaled profiles and the limit pair, brought to
/// unit value at the origin and to the coupling constant Lambda m^{2p}/(p-1).
double rescaled_distance(const BlowupReport& blow, const SolutionPair& limit, double p,
                         double y_window = 2.0);

SweepReport lambda_sweep(const LambdaParams& base, const std::vector<double>& Lambdas,
                         const SolutionPair& limit, double y_window = 2.0);
/// Same, solving the limit pair on [-8, 8] first.
SweepReport lambda_sweep(const LambdaParams& base, const std::vector<double>& Lambdas);

}  // namespace plap::lambda
