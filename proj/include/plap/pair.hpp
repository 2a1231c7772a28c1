#pragma once

#include <cmath>
#include <limits>

#include "plap/core.hpp"

namespace plap {

/// Converged limit profiles (U, V) on [-R, R].
struct SolutionPair {
  Grid grid;
  Profile U;
  Profile V;
  double p = 2.0;
  double R = 0.0;
  double T_inf = std::numeric_limits<double>::quiet_NaN();
  double b1 = std::numeric_limits<double>::quiet_NaN();
  double b2 = std::numeric_limits<double>::quiet_NaN();
  double grad_norm = std::numeric_limits<double>::quiet_NaN();  // sup-norm of the discrete EL residual
  double energy = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;

  /// Pair built from arrays on a grid; R is taken as grid.b.
  static SolutionPair from_profiles(Profile U, Profile V, double p);
};

inline SolutionPair SolutionPair::from_profiles(Profile U, Profile V, double p) {
  SolutionPair s;
  s.grid = U.grid;
  s.R = U.grid.b;
  s.p = p;
  s.U = std::move(U);
  s.V = std::move(V);
  return s;
}

}  // namespace plap
