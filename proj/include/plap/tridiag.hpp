#pragma once

#include <vector>

namespace plap::detail {

// Thomas algorithm for lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
// lower[0] and upper[n-1] are ignored. Intended for diagonally dominant / SPD systems.
inline std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper,
                                             std::vector<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  double d = diag[0];
  c[0] = n > 1 ? upper[0] / d : 0.0;
  rhs[0] /= d;
  for (std::size_t i = 1; i < n; ++i) {
    d = diag[i] - lower[i] * c[i - 1];
    if (i + 1 < n) c[i] = upper[i] / d;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / d;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

}  // namespace plap::detail
