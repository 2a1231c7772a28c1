#pragma once

// Initial-value, shooting and sub/supersolution machinery for the scalar
// equation |y'|^{p-2} y'' = w x^p |y|^{p-2} y on x >= x0, written as the
// first-order system y' = phi_p^{-1}(z), z' = (p-1) w x^p phi_p(y).

#include <string>
#include <utility>
#include <vector>

#include "plap/core.hpp"

namespace plap::ivp {

inline constexpr double kSlopeSwitch = 1e-6;
inline constexpr double kBlowUpGuard = 1e15;

struct IvpSpec {
  double p = 2.0;
  double x0 = 0.0;
  double y0 = 1.0;
  double y1 = 0.0;
  double x_max = 1.0;
  double step = 1e-2;  // initial and maximal step of the adaptive integrator
  double tol = 1e-12;
  double weight = 1.0;  // coefficient w in front of x^p

  void validate() const;
};

enum class Status {
  reached_xmax = 0,
  identically_zero = 1,
  blow_up_detected = 2,
  sign_classified_negative = 3,
};

const char* status_name(Status s);

struct Trajectory {
  std::vector<double> nodes;
  std::vector<double> y;
  std::vector<double> dy;
  Status status = Status::reached_xmax;

  int size() const { return static_cast<int>(nodes.size()); }
  /// Cubic Hermite interpolation from (y, dy); constant extrapolation outside.
  double value_at(double x) const;
  double slope_at(double x) const;
};

/// One application of the fixed-point map
///   T(y)(x) = y0 + int_{x0}^x phi_p^{-1}( phi_p(y1) + int_{x0}^t (p-1) w s^p phi_p(y(s)) ds ) dt
/// by nested trapezoid quadrature on y's grid (which must start at spec.x0).
Profile picard_map(const Profile& y, const IvpSpec& spec);

struct PicardResult {
  Profile y;
  std::vector<double> dy;  // phi_p^{-1} of the inner integral, i.e. T(y)'
  int iterations = 0;
  double contraction_ratio = 0.0;
  double delta = 0.0;
};

/// Fixed point of picard_map on [x0, x0 + delta]. Throws NoContraction when the
/// observed ratio of successive updates stays >= 1 for 3 iterations.
PicardResult picard_solve_local(const IvpSpec& spec, double delta, int nodes = 401);

/// picard_solve_local starting at delta0 and halving on NoContraction.
PicardResult picard_solve_auto(const IvpSpec& spec, double delta0 = 0.5, int nodes = 401);

/// Global solve on [x0, x_max]. Throws StepUnderflow.
Trajectory ivp_solve(const IvpSpec& spec);

enum class Classification { reached_end, went_negative, turned_increasing };

/// Integrates until y < 0, y' > 0 or x_end, whichever happens first.
Classification classify(const IvpSpec& spec, Trajectory* out = nullptr);

struct ShootResult {
  double y0 = 0.0;
  Trajectory trajectory;
  int bisections = 0;
  int segments = 0;
};

struct ShootOptions {
  double tol = 1e-13;          // relative bracket width
  double decay_floor = 1e-3;   // required y(x_far) / y0 bound
  double restart_decay = 1e-3; // restart the shooting when y dropped by this factor
  double weight = 1.0;
  double step = 1e-2;
};

/// Positive decaying solution with y'(0) = y1 < 0 on [0, x_far], by bisection
/// on y0 within `bracket` (lo must go negative, hi must turn increasing).
/// Throws BracketInvalid.
ShootResult shoot_decaying(double p, double y1, double x_far, std::pair<double, double> bracket,
                           const ShootOptions& opts = {});

/// shoot_decaying with a bracket found by expanding around |y1|.
ShootResult shoot_decaying(double p, double y1, double x_far, const ShootOptions& opts = {});

struct ScaledShootingSpec {
  double beta = 1.0;
  double gamma = 1.0;
  void validate() const;
};

/// Decaying solution of |W'|^{p-2} W'' = beta^p x^p W^{p-1}, W'(0) = -gamma on [0, x_far],
/// obtained from the unit solution by W(x) = (gamma/s) W1(s x), s = sqrt(beta).
Trajectory scaled_decaying(const ScaledShootingSpec& spec, double p, double x_far);

/// w2(x) = exp(-(x^2 + 2x)), the explicit subsolution on [0, inf).
double perron_subsolution(double x);

struct PerronResult {
  Profile y;
  int iterations = 0;
  double update = 0.0;    // last sup-norm update
  double residual = 0.0;  // sup-norm of the discrete equation residual
  bool clamp_active = false;
};

/// Discrete residual (phi_p(y')' - (p-1) w x^p phi_p(y)) at interior nodes (0 at the ends).
std::vector<double> discrete_residual(const Profile& y, double p, double weight = 1.0);

/// Solution of |y'|^{p-2}y'' = x^p y^{p-1} on [0, R], y(0) = 1, y(R) = w2(R),
/// built between the subsolution w2 and the supersolution 1. Throws NoConvergence.
PerronResult perron_construct(double p, double R, int n, int max_iter = 2000, double tol = 1e-12);

}  // namespace plap::ivp
