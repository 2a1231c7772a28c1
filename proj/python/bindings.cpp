#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "plap/bvp.hpp"
#include "plap/certify.hpp"
#include "plap/core.hpp"
#include "plap/error.hpp"
#include "plap/ivp.hpp"
#include "plap/lambda.hpp"
#include "plap/verify.hpp"

namespace py = pybind11;
using namespace plap;

namespace {

py::array_t<double> array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Profile profile(const Grid& g, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 1 || a.shape(0) != g.n) throw InvalidArgument("array length does not match the grid");
  return Profile(g, std::vector<double>(a.data(), a.data() + g.n));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Solvers and diagnostics for the p-Laplacian segregation limit system";

  // Translators run in reverse registration order, so the subclass is matched first.
  auto& base = py::register_exception<Error>(m, "PlapError");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());

  m.def("phi_p", &phi_p, py::arg("s"), py::arg("p"));
  m.def("phi_p_inv", &phi_p_inv, py::arg("z"), py::arg("p"));

  py::class_<Grid>(m, "Grid")
      .def(py::init(&Grid::uniform), py::arg("a"), py::arg("b"), py::arg("n"))
      .def_readonly("a", &Grid::a)
      .def_readonly("b", &Grid::b)
      .def_readonly("n", &Grid::n)
      .def_readonly("h", &Grid::h)
      .def("nodes", [](const Grid& g) { return array(g.nodes()); });

  py::class_<bvp::LimitProblem>(m, "LimitProblem")
      .def(py::init<>())
      .def_readwrite("p", &bvp::LimitProblem::p)
      .def_readwrite("R", &bvp::LimitProblem::R)
      .def_readwrite("n", &bvp::LimitProblem::n)
      .def_readwrite("eps_schedule", &bvp::LimitProblem::eps_schedule)
      .def_readwrite("tol", &bvp::LimitProblem::tol)
      .def_readwrite("enforce_symmetry", &bvp::LimitProblem::enforce_symmetry)
      .def_readwrite("max_iter", &bvp::LimitProblem::max_iter)
      .def("validate", &bvp::LimitProblem::validate);

  py::class_<SolutionPair>(m, "SolutionPair")
      .def_static(
          "from_arrays",
          [](const Grid& g, py::array_t<double> U, py::array_t<double> V, double p) {
            return SolutionPair::from_profiles(profile(g, U), profile(g, V), p);
          },
          py::arg("grid"), py::arg("U"), py::arg("V"), py::arg("p"))
      .def_readonly("grid", &SolutionPair::grid)
      .def_property_readonly("x", [](const SolutionPair& s) { return array(s.grid.nodes()); })
      .def_property_readonly("U", [](const SolutionPair& s) { return array(s.U.values); })
      .def_property_readonly("V", [](const SolutionPair& s) { return array(s.V.values); })
      .def_readonly("p", &SolutionPair::p)
      .def_readonly("R", &SolutionPair::R)
      .def_readonly("T_inf", &SolutionPair::T_inf)
      .def_readonly("b1", &SolutionPair::b1)
      .def_readonly("b2", &SolutionPair::b2)
      .def_readonly("grad_norm", &SolutionPair::grad_norm)
      .def_readonly("energy", &SolutionPair::energy)
      .def_readonly("iterations", &SolutionPair::iterations);

  m.def("minimize_limit", [](const bvp::LimitProblem& p) { return bvp::minimize_limit(p); }, py::arg("problem"));
  m.def("solve_free_pair", [](const bvp::LimitProblem& p) { return bvp::solve_free_pair(p); }, py::arg("problem"));
  m.def(
      "barrier_check",
      [](const SolutionPair& s) {
        const auto r = bvp::barrier_check(s, s.p);
        return py::make_tuple(r.pass, r.max_violation);
      },
      py::arg("pair"));

  m.def(
      "first_integral",
      [](const SolutionPair& s, double window) {
        const auto f = verify::first_integral(s, window);
        return py::dict(py::arg("F") = array(f.F.values), py::arg("level") = f.level, py::arg("drift") = f.drift,
                        py::arg("window") = f.window);
      },
      py::arg("pair"), py::arg("window") = 0.0);
  m.def("symmetry_defect", &verify::symmetry_defect, py::arg("pair"));
  m.def("check_names", &certify::check_names);
  m.def(
      "certify_json",
      [](const SolutionPair& s, const std::vector<std::string>& checks) {
        return certify::to_json(certify::run(s, checks)).dump(2);
      },
      py::arg("pair"), py::arg("checks") = std::vector<std::string>{});

  py::class_<ivp::IvpSpec>(m, "IvpSpec")
      .def(py::init<>())
      .def_readwrite("p", &ivp::IvpSpec::p)
      .def_readwrite("x0", &ivp::IvpSpec::x0)
      .def_readwrite("y0", &ivp::IvpSpec::y0)
      .def_readwrite("y1", &ivp::IvpSpec::y1)
      .def_readwrite("x_max", &ivp::IvpSpec::x_max)
      .def_readwrite("step", &ivp::IvpSpec::step)
      .def_readwrite("tol", &ivp::IvpSpec::tol)
      .def_readwrite("weight", &ivp::IvpSpec::weight);

  m.def(
      "ivp_solve",
      [](const ivp::IvpSpec& spec) {
        const auto t = ivp::ivp_solve(spec);
        return py::dict(py::arg("x") = array(t.nodes), py::arg("y") = array(t.y), py::arg("dy") = array(t.dy),
                        py::arg("status") = std::string(ivp::status_name(t.status)));
      },
      py::arg("spec"));
  m.def(
      "shoot_decaying",
      [](double p, double y1, double x_far) {
        const auto r = ivp::shoot_decaying(p, y1, x_far);
        return py::dict(py::arg("y0") = r.y0, py::arg("x") = array(r.trajectory.nodes),
                        py::arg("y") = array(r.trajectory.y), py::arg("bisections") = r.bisections);
      },
      py::arg("p"), py::arg("y1"), py::arg("x_far") = 6.0);
  m.def(
      "perron_construct",
      [](double p, double R, int n) {
        const auto r = ivp::perron_construct(p, R, n);
        return py::dict(py::arg("x") = array(r.y.grid.nodes()), py::arg("y") = array(r.y.values),
                        py::arg("iterations") = r.iterations, py::arg("residual") = r.residual);
      },
      py::arg("p"), py::arg("R") = 6.0, py::arg("n") = 601);

  py::class_<lambda::LambdaParams>(m, "LambdaParams")
      .def(py::init<>())
      .def_readwrite("p", &lambda::LambdaParams::p)
      .def_readwrite("alpha", &lambda::LambdaParams::alpha)
      .def_readwrite("beta", &lambda::LambdaParams::beta)
      .def_readwrite("Lambda", &lambda::LambdaParams::Lambda)
      .def_readwrite("a", &lambda::LambdaParams::a)
      .def_readwrite("b", &lambda::LambdaParams::b)
      .def_readwrite("n", &lambda::LambdaParams::n)
      .def_readwrite("eps_schedule", &lambda::LambdaParams::eps_schedule)
      .def_readwrite("tol", &lambda::LambdaParams::tol);

  m.def(
      "minimize_lambda",
      [](const lambda::LambdaParams& P) {
        const auto s = lambda::minimize_lambda(P);
        return py::dict(py::arg("x") = array(s.u.grid.nodes()), py::arg("u") = array(s.u.values),
                        py::arg("v") = array(s.v.values), py::arg("lambda1") = s.lambda1,
                        py::arg("lambda2") = s.lambda2, py::arg("T_Lambda") = s.T_Lambda,
                        py::arg("T_drift") = s.T_drift, py::arg("residual") = s.residual,
                        py::arg("iterations") = s.iterations);
      },
      py::arg("params"));
  m.def(
      "lambda_sweep",
      [](const lambda::LambdaParams& P, const std::vector<double>& Lambdas) {
        py::list out;
        for (const auto& e : lambda::lambda_sweep(P, Lambdas).entries)
          out.append(py::dict(py::arg("Lambda") = e.Lambda, py::arg("T_Lambda") = e.T_Lambda,
                              py::arg("m_Lambda") = e.m_Lambda, py::arg("x_Lambda") = e.x_Lambda,
                              py::arg("scale_invariant") = e.scale_invariant, py::arg("edge_scale") = e.edge_scale,
                              py::arg("rescaled_distance") = e.rescaled_distance));
        return out;
      },
      py::arg("params"), py::arg("Lambdas"));
}
