#pragma once

// Certification of a limit pair: runs the verify diagnostics against fixed thresholds
// and collects one entry per check.

#include <string>
#include <utility>
#include <vector>

#include "plap/io.hpp"
#include "plap/pair.hpp"

namespace plap::certify {

struct Thresholds {
  double drift = 1e-3;          // first-integral drift on |x| <= R/2
  double symmetry = 1e-2;       // defect relative to max U
  double slope = 1e-2;          // |slope_right - level^{1/p}| relative
  double intercepts = 2e-2;     // |b1 - b2| relative to |b1|
  double decay_r2 = 0.99;
  double decay_ratio = 10.0;    // C_hat / c_hat
  double limits = 1e-3;
  double barrier = 1e-6;
  double kernel_gap = 1e2;
  double kernel_cosine = 0.99;
  double kernel_residual = 1e-3;
  double nonnegativity = 1e-10;
};

struct Check {
  std::string name;
  bool pass = false;
  std::vector<std::pair<std::string, double>> values;
  double threshold = 0;
  std::string statement;  // the property being checked
  std::string error;      // set when the check could not run
};

/// Check names in report order.
const std::vector<std::string>& check_names();

/// Runs the selected checks (all when `only` is empty). Throws InvalidArgument on unknown names.
std::vector<Check> run(const SolutionPair& pair, const std::vector<std::string>& only = {},
                       const Thresholds& t = {});

io::Json to_json(const std::vector<Check>& checks);

}  // namespace plap::certify
