// plap command-line tool.
//
// Option precedence: command-line flag > [command] table of --config > top-level keys of
// --config > built-in default. Exit codes: 0 ok, 1 configuration error, 2 solver error,
// 3 certification failure.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <toml.hpp>

#include "plap/bvp.hpp"
#include "plap/certify.hpp"
#include "plap/error.hpp"
#include "plap/io.hpp"
#include "plap/ivp.hpp"
#include "plap/lambda.hpp"

#ifndef PLAP_VERSION
#define PLAP_VERSION "0"
#endif

namespace fs = std::filesystem;
using plap::io::Json;

namespace {

enum Exit { kOk = 0, kConfig = 1, kSolver = 2, kCertify = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// options bound to variables, so config files can fill what the flags left out

struct Binding {
  std::string key;
  CLI::Option* opt = nullptr;
  std::function<void(const Json&)> set;
  std::function<Json()> get;
};

struct Command {
  std::string name;
  CLI::App* app = nullptr;
  std::vector<Binding> bindings;

  template <class T>
  CLI::Option* bind(const std::string& key, T& var, const std::string& help) {
    CLI::Option* opt = app->add_option("--" + key, var, help)->capture_default_str();
    if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<std::string>>)
      opt->delimiter(',');
    bindings.push_back({key, opt, [&var, key](const Json& j) {
                          try {
                            var = j.get<T>();
                          } catch (const std::exception&) {
                            throw ConfigError("config key '" + key + "' has the wrong type");
                          }
                        },
                        [&var] { return Json(var); }});
    return opt;
  }

  // Fills unset options from the config document.
  void apply(const Json& cfg) const {
    for (const auto& b : bindings) {
      if (b.opt->count() > 0) continue;
      if (cfg.contains(name) && cfg[name].is_object() && cfg[name].contains(b.key))
        b.set(cfg[name][b.key]);
      else if (cfg.contains(b.key) && !cfg[b.key].is_object())
        b.set(cfg[b.key]);
    }
  }

  Json echo() const {
    Json j = Json::object();
    for (const auto& b : bindings) j[b.key] = b.get();
    return j;
  }
};

Json toml_to_json(const toml::node& node) {
  if (auto t = node.as_table()) {
    Json j = Json::object();
    for (auto&& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
    return j;
  }
  if (auto a = node.as_array()) {
    Json j = Json::array();
    for (auto&& v : *a) j.push_back(toml_to_json(v));
    return j;
  }
  if (auto v = node.as_floating_point()) return v->get();
  if (auto v = node.as_integer()) return v->get();
  if (auto v = node.as_boolean()) return v->get();
  if (auto v = node.as_string()) return v->get();
  throw ConfigError("unsupported value type in TOML config");
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
  if (fs::path(path).extension() == ".json") {
    try {
      return plap::io::read_json(path);
    } catch (const plap::Error& e) {
      throw ConfigError(e.what());
    }
  }
  try {
    return toml_to_json(toml::parse_file(path));
  } catch (const toml::parse_error& e) {
    throw ConfigError("cannot parse " + path + ": " + std::string(e.description()));
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// run context: output directory and manifest

struct Run {
  std::string command;
  fs::path out;
  Json config = Json::object();
  Json stages = Json::object();
  Json certification;
  Json notes = Json::array();
  std::string started = utc_now();

  void write_manifest(int code, const std::string& status, const std::string& kind = "",
                      const std::string& message = "") const {
    Json m;
    m["format_version"] = plap::io::kFormatVersion;
    m["tool"] = "plap";
    m["version"] = PLAP_VERSION;
    m["command"] = command;
    m["config"] = config;
    m["started"] = started;
    m["finished"] = utc_now();
    m["status"] = status;
    m["exit_code"] = code;
    if (!kind.empty()) m["error"] = Json{{"kind", kind}, {"message", message}};
    m["stages"] = stages;
    if (!certification.is_null()) m["certification"] = certification;
    if (!notes.empty()) m["notes"] = notes;
    try {
      plap::io::write_json(out / "manifest.json", m);
    } catch (const std::exception& e) {
      std::cerr << "plap: cannot write manifest: " << e.what() << '\n';
    }
  }
};

fs::path default_out(const std::string& command) {
  const char* env = std::getenv("PLAP_OUTPUT_DIR");
  return fs::path(env && *env ? env : "plap_out") / command;
}

// ---------------------------------------------------------------------------
// commands

struct LimitArgs {
  double p = 2.0, R = 8.0, tol = 1e-10;
  int n = 801;
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4, 1e-6};
  bool free = false;

  void add(Command& c) {
    c.bind("p", p, "exponent p > 1");
    c.bind("R", R, "half-width of the interval [-R, R]");
    c.bind("n", n, "odd node count, at least 11");
    c.bind("tol", tol, "gradient tolerance at the last eps stage");
    c.bind("eps", eps, "decreasing regularization schedule");
    c.bind("free", free, "solve for U and V without the reflection constraint");
  }

  plap::bvp::LimitProblem problem() const {
    plap::bvp::LimitProblem prob;
    prob.p = p;
    prob.R = R;
    prob.n = n;
    prob.tol = tol;
    prob.eps_schedule = eps;
    prob.enforce_symmetry = !free;
    prob.validate();
    return prob;
  }
};

plap::SolutionPair solve_limit(const LimitArgs& a, Run& run) {
  const auto prob = a.problem();
  plap::bvp::MinimizeTrace trace;
  const auto pair = prob.enforce_symmetry ? plap::bvp::minimize_limit(prob, &trace)
                                          : plap::bvp::solve_free_pair(prob, &trace);
  Json per_stage = Json::array();
  for (std::size_t k = 0; k < prob.eps_schedule.size(); ++k)
    per_stage.push_back(std::count(trace.stage.begin(), trace.stage.end(), static_cast<int>(k)));
  run.stages["limit"] = {{"iterations", pair.iterations}, {"steps_per_eps", per_stage},
                         {"grad_norm", plap::io::number(pair.grad_norm)}};
  return pair;
}

int cmd_solve_limit(const LimitArgs& a, Run& run) {
  const auto pair = solve_limit(a, run);
  plap::io::write_pair_csv(run.out / "pair.csv", pair);
  plap::io::write_json(run.out / "pair.json", plap::io::pair_sidecar(pair));
  std::cout << "T_inf " << plap::io::format_number(pair.T_inf) << '\n';
  return kOk;
}

struct LambdaArgs {
  double p = 2.0, alpha = 1.0, beta = 1.0, Lambda = 100.0, a = -1.0, b = 1.0, tol = 1e-9;
  int n = 801;
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4, 1e-6};

  void add(Command& c, bool with_lambda) {
    c.bind("p", p, "exponent p > 1");
    c.bind("alpha", alpha, "self-interaction of u");
    c.bind("beta", beta, "self-interaction of v");
    if (with_lambda) c.bind("Lambda", Lambda, "coupling strength");
    c.bind("a", a, "left end of the interval");
    c.bind("b", b, "right end of the interval");
    c.bind("n", n, "node count");
    c.bind("tol", tol, "projected gradient tolerance");
    c.bind("eps", eps, "decreasing regularization schedule");
  }

  plap::lambda::LambdaParams params() const {
    plap::lambda::LambdaParams P;
    P.p = p;
    P.alpha = alpha;
    P.beta = beta;
    P.Lambda = Lambda;
    P.a = a;
    P.b = b;
    P.n = n;
    P.tol = tol;
    P.eps_schedule = eps;
    P.validate();
    return P;
  }
};

Json blowup_json(const plap::lambda::LambdaSolution& sol, const plap::lambda::LambdaParams& P) {
  try {
    const auto b = plap::lambda::blowup_extract(sol, P);
    return {{"x_Lambda", b.x_Lambda},
            {"m_Lambda", b.m_Lambda},
            {"scale_invariant", b.scale_invariant},
            {"edge_scale", b.edge_scale},
            {"root_count", b.root_count}};
  } catch (const plap::NoCrossing& e) {
    return {{"error", e.kind() + ": " + e.what()}};
  }
}

int cmd_solve_lambda(const LambdaArgs& a, Run& run) {
  const auto P = a.params();
  run.notes.push_back("u starts as the left bump and v as the right one; this selects one of the two mirror-image minimizers");
  const auto sol = plap::lambda::minimize_lambda(P);
  run.stages["lambda"] = {{"iterations", sol.iterations}, {"residual", sol.residual}};
  plap::io::write_lambda_csv(run.out / "lambda.csv", sol);
  Json j;
  j["format_version"] = plap::io::kFormatVersion;
  j["p"] = P.p;
  j["alpha"] = P.alpha;
  j["beta"] = P.beta;
  j["Lambda"] = P.Lambda;
  j["a"] = P.a;
  j["b"] = P.b;
  j["n"] = P.n;
  j["lambda1"] = sol.lambda1;
  j["lambda2"] = sol.lambda2;
  j["T_Lambda"] = sol.T_Lambda;
  j["T_drift"] = sol.T_drift;
  j["residual"] = sol.residual;
  j["energy"] = sol.energy;
  j["blowup"] = blowup_json(sol, P);
  plap::io::write_json(run.out / "lambda.json", j);
  std::cout << "T_Lambda " << plap::io::format_number(sol.T_Lambda) << '\n';
  return kOk;
}

struct SweepArgs {
  LambdaArgs base;
  std::vector<double> Lambdas{100.0, 1000.0, 10000.0};
  double limit_R = 8.0, window = 2.0;
  int limit_n = 801;

  void add(Command& c) {
    base.add(c, false);
    c.bind("Lambdas", Lambdas, "nondecreasing list of coupling strengths");
    c.bind("limit-R", limit_R, "half-width for the reference limit pair");
    c.bind("limit-n", limit_n, "node count for the reference limit pair");
    c.bind("window", window, "half-width of the comparison window in blow-up variables");
  }
};

int cmd_sweep_lambda(const SweepArgs& a, Run& run) {
  if (a.Lambdas.empty()) throw plap::InvalidArgument("Lambdas must not be empty");
  for (std::size_t k = 0; k < a.Lambdas.size(); ++k) {
    auto P = a.base.params();
    P.Lambda = a.Lambdas[k];
    P.validate();
    if (k > 0 && a.Lambdas[k] < a.Lambdas[k - 1]) throw plap::InvalidArgument("Lambdas must be nondecreasing");
  }
  LimitArgs la;
  la.p = a.base.p;
  la.R = a.limit_R;
  la.n = a.limit_n;
  const auto limit = solve_limit(la, run);

  Json entries = Json::array();
  Json iters = Json::array();
  bool failed = false;
  for (std::size_t k = 0; k < a.Lambdas.size(); ++k) {
    auto P = a.base.params();
    P.Lambda = a.Lambdas[k];
    try {
      const auto sol = plap::lambda::minimize_lambda(P);
      const auto b = plap::lambda::blowup_extract(sol, P);
      plap::lambda::SweepReport one;
      one.entries.push_back({P.Lambda, sol.lambda1, sol.lambda2, sol.T_Lambda, sol.T_drift, b.m_Lambda,
                             b.x_Lambda, b.scale_invariant, b.edge_scale, b.edge_scale_sqrt,
                             plap::lambda::rescaled_distance(b, limit, P.p, a.window), 0.0, sol.iterations});
      entries.push_back(plap::io::sweep_json(one)["entries"][0]);
      plap::io::write_lambda_csv(run.out / ("lambda_" + std::to_string(k) + ".csv"), sol);
      iters.push_back(sol.iterations);
    } catch (const plap::Error& e) {
      failed = true;
      entries.push_back({{"Lambda", P.Lambda}, {"error", e.kind() + ": " + e.what()}});
      iters.push_back(nullptr);
      std::cerr << "plap: Lambda " << P.Lambda << ": " << e.kind() << ": " << e.what() << '\n';
    }
  }
  run.stages["sweep"] = {{"iterations", iters}};
  plap::io::write_json(run.out / "sweep.json",
                       Json{{"format_version", plap::io::kFormatVersion}, {"entries", entries}});
  if (failed) throw plap::NoConvergence("one or more sweep entries failed");
  return kOk;
}

struct OdeArgs {
  double p = 2.0, x0 = 0.0, y0 = 1.0, y1 = 0.0, xmax = 2.0, step = 1e-2, tol = 1e-12, weight = 1.0;
  double xfar = 6.0, R = 6.0;
  int n = 601;
};

int cmd_ode(const std::string& action, const OdeArgs& a, Run& run) {
  if (action == "solve") {
    plap::ivp::IvpSpec spec;
    spec.p = a.p;
    spec.x0 = a.x0;
    spec.y0 = a.y0;
    spec.y1 = a.y1;
    spec.x_max = a.xmax;
    spec.step = a.step;
    spec.tol = a.tol;
    spec.weight = a.weight;
    spec.validate();
    const auto t = plap::ivp::ivp_solve(spec);
    plap::io::write_trajectory_csv(run.out / "trajectory.csv", t);
    run.stages["ode"] = {{"status", plap::ivp::status_name(t.status)}, {"nodes", t.size()}};
    std::cout << "status " << plap::ivp::status_name(t.status) << '\n';
    return kOk;
  }
  if (action == "shoot") {
    if (!(a.p > 1.0)) throw plap::InvalidArgument("ode requires p > 1");
    if (!(a.y1 < 0.0)) throw plap::InvalidArgument("shooting requires y1 < 0");
    if (!(a.xfar > 0.0)) throw plap::InvalidArgument("shooting requires xfar > 0");
    plap::ivp::ShootOptions opts;
    opts.weight = a.weight;
    const auto r = plap::ivp::shoot_decaying(a.p, a.y1, a.xfar, opts);
    plap::io::write_trajectory_csv(run.out / "trajectory.csv", r.trajectory);
    run.stages["ode"] = {{"y0", r.y0}, {"bisections", r.bisections}, {"segments", r.segments}};
    std::cout << "y0 " << plap::io::format_number(r.y0) << '\n';
    return kOk;
  }
  // perron
  const auto r = plap::ivp::perron_construct(a.p, a.R, a.n);
  plap::io::write_profile_csv(run.out / "perron.csv", r.y);
  run.stages["ode"] = {{"iterations", r.iterations}, {"residual", r.residual}, {"update", r.update}};
  std::cout << "iterations " << r.iterations << '\n';
  return kOk;
}

struct CertifyArgs {
  LimitArgs limit;
  std::string pair_path;
  std::string sidecar_path;
  std::vector<std::string> checks;
};

int cmd_certify(const CertifyArgs& a, Run& run) {
  for (const auto& c : a.checks)
    if (std::find(plap::certify::check_names().begin(), plap::certify::check_names().end(), c) ==
        plap::certify::check_names().end())
      throw plap::InvalidArgument("unknown check '" + c + "'");
  plap::SolutionPair pair;
  if (!a.pair_path.empty()) {
    if (!(a.limit.p > 1.0)) throw plap::InvalidArgument("certify requires p > 1");
    try {
      pair = plap::io::read_pair_csv(a.pair_path, a.limit.p);
    } catch (const plap::IoError& e) {
      throw plap::InvalidArgument(e.what());
    }
    fs::path side = a.sidecar_path;
    if (side.empty()) side = fs::path(a.pair_path).replace_extension(".json");
    if (fs::exists(side)) plap::io::apply_sidecar(pair, plap::io::read_json(side));
    pair.p = a.limit.p;
  } else {
    pair = solve_limit(a.limit, run);
  }
  const auto checks = plap::certify::run(pair, a.checks);
  const Json report = plap::certify::to_json(checks);
  plap::io::write_json(run.out / "certification.json", report);
  run.certification = {{"passed", report["passed"]}, {"failed", report["failed"]}};
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << '\n';
    if (!c.pass) {
      ok = false;
      std::cerr << "plap: check failed: " << c.name << (c.error.empty() ? "" : " (" + c.error + ")") << '\n';
    }
  }
  return ok ? kOk : kCertify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solvers and certification for the p-Laplacian segregation limit system"};
  app.set_version_flag("--version", PLAP_VERSION);
  app.require_subcommand(1);
  std::string config_path, out_flag;
  app.add_option("--config", config_path, "TOML or JSON configuration file");
  app.add_option("--out", out_flag, "output directory (default $PLAP_OUTPUT_DIR/<command>)");
  int seed = 0;
  app.add_option("--seed", seed, "seed for randomized checks");

  std::vector<Command> commands;
  commands.reserve(16);
  auto add_cmd = [&](const std::string& name, const std::string& help) -> Command& {
    commands.push_back({name, app.add_subcommand(name, help), {}});
    commands.back().app->fallthrough();
    return commands.back();
  };

  LimitArgs limit;
  limit.add(add_cmd("solve-limit", "solve the limit pair on [-R, R]"));

  LambdaArgs lam;
  lam.add(add_cmd("solve-lambda", "solve the constrained system at one coupling strength"), true);

  SweepArgs sweep;
  sweep.add(add_cmd("sweep-lambda", "solve a list of coupling strengths and report the blow-up trend"));

  OdeArgs ode;
  Command& ode_cmd = add_cmd("ode", "initial value problems of the decay equation");
  ode_cmd.app->require_subcommand(1);
  std::string ode_action;
  for (const char* act : {"solve", "shoot", "perron"}) {
    commands.push_back({std::string("ode-") + act, ode_cmd.app->add_subcommand(act), {}});
    Command& c = commands.back();
    c.app->fallthrough();
    c.app->callback([&ode_action, act] { ode_action = act; });
    c.bind("p", ode.p, "exponent p > 1");
    c.bind("weight", ode.weight, "weight w in w x^p");
    if (std::string(act) == "solve") {
      c.bind("x0", ode.x0, "initial point");
      c.bind("y0", ode.y0, "y(x0)");
      c.bind("y1", ode.y1, "y'(x0)");
      c.bind("xmax", ode.xmax, "end of the integration interval");
      c.bind("step", ode.step, "maximal step");
      c.bind("tol", ode.tol, "relative tolerance");
    } else if (std::string(act) == "shoot") {
      c.bind("y1", ode.y1, "y'(0) < 0");
      c.bind("xfar", ode.xfar, "end of the shooting interval");
    } else {
      c.bind("R", ode.R, "right end");
      c.bind("n", ode.n, "node count");
    }
  }

  CertifyArgs cert;
  Command& cert_cmd = add_cmd("certify", "run the certification checks on a pair");
  cert.limit.add(cert_cmd);
  cert_cmd.bind("pair", cert.pair_path, "pair CSV (x,U,V); solves afresh when absent");
  cert_cmd.bind("sidecar", cert.sidecar_path, "JSON sidecar of the pair (default: pair path with .json)");
  cert_cmd.bind("checks", cert.checks, "comma-separated subset of checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  // The innermost selected command.
  const Command* active = nullptr;
  for (const auto& c : commands)
    if (c.app->parsed() && c.name != "ode") active = &c;
  if (!active) return kConfig;

  Run run;
  run.command = active->name;
  run.out = out_flag.empty() ? default_out(active->name) : fs::path(out_flag);

  auto fail = [&](int code, const std::string& status, const std::string& kind, const std::string& msg) {
    std::cerr << "plap: " << kind << ": " << msg << '\n';
    run.config = active->echo();
    run.write_manifest(code, status, kind, msg);
    return code;
  };

  try {
    const Json cfg = load_config(config_path);
    if (cfg.contains("seed") && cfg["seed"].is_number_integer() && seed == 0) seed = cfg["seed"].get<int>();
    active->apply(cfg);
    if (out_flag.empty() && cfg.contains("output_dir") && cfg["output_dir"].is_string())
      run.out = fs::path(cfg["output_dir"].get<std::string>());
  } catch (const ConfigError& e) {
    return fail(kConfig, "config_error", "ConfigError", e.what());
  }
  run.config = active->echo();
  run.config["seed"] = seed;
  run.config["output_dir"] = run.out.string();

  int code = kOk;
  try {
    fs::create_directories(run.out);
    if (run.command == "solve-limit")
      code = cmd_solve_limit(limit, run);
    else if (run.command == "solve-lambda")
      code = cmd_solve_lambda(lam, run);
    else if (run.command == "sweep-lambda")
      code = cmd_sweep_lambda(sweep, run);
    else if (run.command == "certify")
      code = cmd_certify(cert, run);
    else
      code = cmd_ode(ode_action, ode, run);
  } catch (const plap::InvalidArgument& e) {
    return fail(kConfig, "config_error", e.kind(), e.what());
  } catch (const plap::Error& e) {
    return fail(kSolver, "solver_error", e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail(kSolver, "solver_error", "Exception", e.what());
  }
  run.write_manifest(code, code == kOk ? "ok" : "certification_failed");
  return code;
}
