#include "plap/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "plap/bvp.hpp"
#include "plap/error.hpp"
#include "plap/verify.hpp"

namespace plap::certify {

namespace {

struct Spec {
  const char* name;
  const char* statement;
  std::function<void(const SolutionPair&, const Thresholds&, Check&)> body;
};

const std::vector<Spec>& specs() {
  static const std::vector<Spec> all = {
      {"nonnegativity", "U >= 0 and V >= 0 at every node",
       [](const SolutionPair& s, const Thresholds& t, Check& c) {
         double lo = 0.0;
         for (int i = 0; i < s.grid.n; ++i) lo = std::min({lo, s.U[i], s.V[i]});
         c.values = {{"min_value", lo}};
         c.threshold = t.nonnegativity;
         c.pass = lo >= -t.nonnegativity;
       }},
      {"first_integral", "|U'|^p + |V'|^p - U^p V^p is constant",
       [](const SolutionPair& s, const Thresholds& t, Check& c) {
         const auto fi = verify::first_integral(s);
         c.values = {{"level", fi.level}, {"drift", fi.drift}, {"window", fi.window}};
         c.threshold = t.drift;
         c.pass = fi.level > 0.0 && fi.drift <= t.drift;
       }},
      {"symmetry", "V(x) = U(-x)",
       [](const SolutionPair& s, const Thresholds& t, Check& c) {
         const double d = verify::symmetry_defect(s);
         const double rel = d / std::max(s.U.max_abs(), 1e-300);
         c.values = {{"defect", d}, {"relative_defect", rel}};
         c.threshold = t.symmetry;
         c.pass = rel <= t.symmetry;
       }},
      {"monotonicity", "U' > 0, V' < 0 and U'' >= 0",
       [](const SolutionPair& s, const Thresholds&, Check& c) {
         const auto m = verify::monotonicity_report(s);
         c.values = {{"min_u_step", m.min_u_step},
                     {"max_v_step", m.max_v_step},
                     {"min_u_curvature", m.min_u_curvature},
                     {"max_slope_sum", m.max_slope_sum}};
         c.threshold = 0.0;
         c.pass = m.pass();
       }},
      {"slope", "U'(+inf) = T^{1/p}",
       [](const SolutionPair& s, const Thresholds& t, Check& c) {
         const auto fi = verify::first_integral(s);
         const auto a = verify::asymptote_fit(s, fi.level);
         const double target = std::pow(fi.level, 1.0 / s.p);
         const double rel = std::abs(a.slope_right - target) / target;
         c.values = {{"slope_right", a.slope_right}, {"target", target}, {"relative_error", rel}};
         c.threshold = t.slope;
         c.pass = rel <= t.slope;
       }},
      {"intercepts", "both asymptotes share the intercept",
       [](const SolutionPair& s, const Thresholds& t, Check& c) {
         const auto a = verify::asymptote_fit(s);
         const double rel = std::abs(a.b1_hat - a.b2_hat) / std::max(std::abs(a.b1_hat), 1e-300);
         c.values = {{"b1", a.b1_hat}, {"b2", a.b2_hat}, {"relative_difference", rel}};
         c.threshold = t.intercepts;
         c.pass = rel <= t.intercepts;
       }},
      {"gaussian_decay", "m exp(-K x^2) <= U(x) <= M exp(-k x^2) on the left",
       [](const SolutionPair& s, const Thresholds& t, Check& c) {
         const auto d = verify::gaussian_decay_fit(s);
         const double ratio = d.C_hat / d.c_hat;
         c.values = {{"r_squared", d.r_squared}, {"s_hat", d.s_hat}, {"c_hat", d.c_hat},
                     {"C_hat", d.C_hat},         {"ratio", ratio},   {"nodes_used", double(d.nodes_used)}};
         c.threshold = t.decay_r2;
         c.pass = d.r_squared >= t.decay_r2 && d.c_hat > 0.0 && ratio <= t.decay_ratio;
       }},
      {"limits", "U, U' and the mixed products vanish at the decaying ends",
       [](const SolutionPair& s, const Thresholds& t, Check& c) {
         const auto l = verify::limits_report(s, t.limits);
         c.values = {{"max_product", l.max_product}, {"max_value", l.max_value}};
         c.threshold = t.limits;
         c.pass = l.pass();
       }},
      {"barrier", "V lies below the explicit supersolution",
       [](const SolutionPair& s, const Thresholds& t, Check& c) {
         const auto b = bvp::barrier_check(s, s.p);
         c.values = {{"max_violation", b.max_violation}};
         c.threshold = t.barrier;
         c.pass = b.max_violation <= t.barrier;
       }},
      {"kernel", "the linearized kernel is spanned by (U', V')",
       [](const SolutionPair& s, const Thresholds& t, Check& c) {
         const auto op = verify::linearize(s);
         verify::KernelOptions ko;
         ko.gap = t.kernel_gap;
         ko.cosine = t.kernel_cosine;
         const auto k = verify::kernel_check(op, s, ko);
         const double res = verify::operator_residual(op, verify::translation_mode(s));
         c.values = {{"sigma1", k.sigma1}, {"sigma2", k.sigma2}, {"gap", k.gap},
                     {"cosine", k.cosine}, {"translation_residual", res}};
         c.threshold = t.kernel_gap;
         c.pass = k.pass && res <= t.kernel_residual;
       }},
  };
  return all;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : specs()) v.emplace_back(s.name);
    return v;
  }();
  return names;
}

std::vector<Check> run(const SolutionPair& pair, const std::vector<std::string>& only, const Thresholds& t) {
  for (const auto& name : only)
    if (std::find(check_names().begin(), check_names().end(), name) == check_names().end())
      throw InvalidArgument("unknown check '" + name + "'");
  std::vector<Check> out;
  for (const auto& s : specs()) {
    if (!only.empty() && std::find(only.begin(), only.end(), s.name) == only.end()) continue;
    Check c;
    c.name = s.name;
    c.statement = s.statement;
    try {
      s.body(pair, t, c);
    } catch (const Error& e) {
      c.pass = false;
      c.error = e.kind() + ": " + e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

io::Json to_json(const std::vector<Check>& checks) {
  io::Json list = io::Json::array();
  int passed = 0;
  for (const auto& c : checks) {
    io::Json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    io::Json vals = io::Json::object();
    for (const auto& [k, v] : c.values) vals[k] = io::number(v);
    j["values"] = std::move(vals);
    j["threshold"] = io::number(c.threshold);
    j["statement"] = c.statement;
    if (!c.error.empty()) j["error"] = c.error;
    list.push_back(std::move(j));
    passed += c.pass;
  }
  io::Json j;
  j["format_version"] = io::kFormatVersion;
  j["passed"] = passed;
  j["failed"] = static_cast<int>(checks.size()) - passed;
  j["checks"] = std::move(list);
  return j;
}

}  // namespace plap::certify
