#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fatkpp/cauchy_solver.hpp"
#include "fatkpp/config.hpp"
#include "fatkpp/errors.hpp"
#include "fatkpp/experiments.hpp"
#include "fatkpp/grid.hpp"
#include "fatkpp/hj_solver.hpp"
#include "fatkpp/kernel.hpp"
#include "fatkpp/mutation.hpp"
#include "fatkpp/propagation.hpp"
#include "fatkpp/svg_plot.hpp"

namespace py = pybind11;
using namespace fatkpp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v) {
  Array a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

Field to_field(const Grid1D& grid, const Array& values) {
  if (values.ndim() != 1 || static_cast<std::size_t>(values.shape(0)) != grid.N) {
    raise(ErrorKind::GridMismatch, "expected a 1-d array of length N");
  }
  Field f = Field::zeros(grid);
  std::copy(values.data(), values.data() + grid.N, f.values.begin());
  return f;
}

KernelSpec make_spec(const std::string& family, double alpha, double beta, double b,
                     double sigma) {
  const auto fam = family_from_string(family);
  if (!fam) raise(ErrorKind::InvalidParams, "unknown kernel family '" + family + "'");
  KernelSpec s;
  s.family = *fam;
  s.alpha = alpha;
  s.beta = beta;
  s.b = b;
  s.sigma = sigma;
  return s;
}

// Elementwise map over a numpy array, scalars included.
template <class F>
py::object vectorize(const py::object& xs, F f) {
  return py::vectorize([f](double v) { return f(v); })(xs);
}

}  // namespace

PYBIND11_MODULE(_fatkpp, m) {
  m.doc() = "Nonlocal Fisher-KPP with fat-tailed kernels and its Hamilton-Jacobi limit";

  py::register_exception<Error>(m, "FatkppError", PyExc_RuntimeError);

  py::class_<Kernel>(m, "Kernel")
      .def(py::init([](const std::string& family, double alpha, double beta, double b,
                       double sigma) { return build_kernel(make_spec(family, alpha, beta, b, sigma)); }),
           py::arg("family"), py::arg("alpha") = 0.0, py::arg("beta") = 0.0, py::arg("b") = 0.0,
           py::arg("sigma") = 0.0)
      .def_property_readonly("family", [](const Kernel& k) { return std::string(to_string(k.spec().family)); })
      .def_property_readonly("mass", &Kernel::mass)
      .def_property_readonly("mu", &Kernel::mu)
      .def_property_readonly("fprime0", &Kernel::fprime0)
      .def_property_readonly("mutation_eligible", &Kernel::mutation_eligible)
      .def("f", [](const Kernel& k, const py::object& x) { return vectorize(x, [&](double v) { return k.f(v); }); })
      .def("J", [](const Kernel& k, const py::object& x) { return vectorize(x, [&](double v) { return k.J(v); }); })
      .def("density", [](const Kernel& k, const py::object& x) { return vectorize(x, [&](double v) { return k.density(v); }); })
      .def("inv_f", [](const Kernel& k, const py::object& y) { return vectorize(y, [&](double v) { return k.inv_f(v); }); })
      .def("inv_J", &Kernel::inv_J)
      .def("tail_mass", &Kernel::tail_mass)
      .def("__repr__", [](const Kernel& k) {
        return "<Kernel " + std::string(to_string(k.spec().family)) + " Z=" + std::to_string(k.mass()) + ">";
      });

  m.def("validate_hypotheses", [](const Kernel& k) {
    const HypothesisReport r = validate_hypotheses(k);
    py::dict checks;
    for (const auto& c : r.checks) checks[py::str(c.name)] = py::make_tuple(c.passed, c.value, c.detail);
    py::dict out;
    out["checks"] = checks;
    out["all_passed"] = r.all_passed();
    out["mass_error"] = r.mass_error;
    out["limsup_ratio"] = r.limsup_ratio;
    out["mu"] = r.mu;
    out["fat_tailed"] = r.fat_tailed;
    out["mutation_eligible"] = r.mutation_eligible;
    return out;
  });

  py::class_<Grid1D>(m, "Grid")
      .def(py::init(&Grid1D::make), py::arg("L"), py::arg("N"))
      .def_readonly("L", &Grid1D::L)
      .def_readonly("N", &Grid1D::N)
      .def_property_readonly("dx", &Grid1D::dx)
      .def("nodes", [](const Grid1D& g) { return to_array(g.nodes()); });

  py::class_<DiscreteKernel>(m, "DiscreteKernel")
      .def(py::init([](const Kernel& k, const Grid1D& g, double tol) {
             return DiscreteKernel::from_kernel(k, g, tol);
           }),
           py::arg("kernel"), py::arg("grid"), py::arg("tail_tol") = 1e-6)
      .def_property_readonly("radius", &DiscreteKernel::radius)
      .def_property_readonly("tail_mass", &DiscreteKernel::tail_mass)
      .def_property_readonly("samples", [](const DiscreteKernel& d) { return to_array(d.samples()); })
      .def("convolve", [](const DiscreteKernel& d, const Array& v) {
        return to_array(convolve(d, to_field(d.grid(), v)).values);
      })
      .def("convolve_direct", [](const DiscreteKernel& d, const Array& v) {
        return to_array(convolve_direct(d, to_field(d.grid(), v)).values);
      });

  m.def(
      "simulate",
      [](const Kernel& k, const Grid1D& g, double t_end, double dt, std::vector<double> times,
         double C, const std::string& method) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.t_end = t_end;
        cfg.snapshot_times = std::move(times);
        const auto meth = method_from_string(method);
        if (!meth) raise(ErrorKind::InvalidParams, "unknown method '" + method + "'");
        cfg.method = *meth;
        SimulationRun r;
        {
          py::gil_scoped_release release;
          r = run(k, g, cfg, initial_condition(k, g, C));
        }
        py::list snaps;
        for (const auto& s : r.snapshots) snaps.append(py::make_tuple(s.t, to_array(s.field.values)));
        py::dict out;
        out["snapshots"] = snaps;
        out["contaminated"] = r.manifest.contaminated;
        out["aborted_at"] = r.manifest.aborted_at;
        out["clamp_total"] = r.manifest.clamp_total;
        out["steps"] = r.manifest.steps;
        out["kernel_radius"] = r.manifest.kernel_radius;
        return out;
      },
      py::arg("kernel"), py::arg("grid"), py::arg("t_end"), py::arg("dt") = 0.05,
      py::arg("snapshot_times") = std::vector<double>{}, py::arg("C") = 1.0,
      py::arg("method") = "RK4");

  m.def("rightmost_crossing", [](const Grid1D& g, const Array& n, double level) {
    return rightmost_crossing(to_field(g, n), level);
  });
  m.def("phi_envelope", [](const Kernel& k, double t, const py::object& x) {
    return vectorize(x, [&](double v) { return phi_envelope(k, t, v); });
  });
  m.def("theta1", &theta1, py::arg("kernel"), py::arg("t"), py::arg("theta1_alpha") = 0.5);
  m.def("gamma_loc", &gamma_loc, py::arg("kernel"), py::arg("t"), py::arg("theta1_alpha") = 0.5);

  py::class_<MutationKernel>(m, "MutationKernel")
      .def(py::init<const Kernel&, double>(), py::arg("kernel"), py::arg("eps"))
      .def("density", &MutationKernel::density)
      .def("mass", &MutationKernel::mass)
      .def("second_moment_f", &MutationKernel::second_moment_f)
      .def("contract", &MutationKernel::contract)
      .def("dilate", &MutationKernel::dilate);

  py::class_<Hamiltonian>(m, "Hamiltonian")
      .def(py::init<const Kernel&>())
      .def_property_readonly("p_max", &Hamiltonian::p_max)
      .def("__call__", &Hamiltonian::eval)
      .def("derivative", &Hamiltonian::derivative)
      .def("kappa_bounds", [](const Hamiltonian& h, double A) {
        const KappaBounds b = h.kappa_bounds(A);
        return py::make_tuple(b.lower, b.upper);
      });

  m.def(
      "solve_hj",
      [](const Kernel& k, const Grid1D& g, double A, std::vector<double> times) {
        HJSolution sol;
        {
          py::gil_scoped_release release;
          sol = solve_constrained_hj(Hamiltonian(k), power_initial_data(k, g, A).u0, times);
        }
        py::list snaps;
        for (const auto& s : sol.snapshots) {
          const ZeroSetBoundary z = zero_set_boundary(s.u);
          snaps.append(py::make_tuple(s.t, to_array(s.u.values), z.right));
        }
        return snaps;
      },
      py::arg("kernel"), py::arg("grid"), py::arg("A"), py::arg("times"));

  m.def("example_inclusion_radius", &example_inclusion_radius, py::arg("kernel"),
        py::arg("kappa"), py::arg("A"), py::arg("t"), py::arg("samples") = 101);

  m.def(
      "run_config",
      [](const std::string& path, const std::string& out) {
        RunConfig cfg = parse_config(path);
        if (!out.empty()) cfg.output.directory = out;
        const ExperimentResult r = run_experiment(cfg, cfg.output.directory);
        py::dict metrics;
        for (const auto& [k, v] : r.metrics) metrics[py::str(k)] = v;
        return py::make_tuple(r.files, metrics);
      },
      py::arg("path"), py::arg("out") = "");

  m.def(
      "emit_svg_plot",
      [](const std::vector<std::tuple<std::string, std::vector<double>, std::vector<double>>>& series,
         const std::string& path, bool log_y) {
        std::vector<PlotSeries> s;
        for (const auto& [label, x, y] : series) s.push_back({label, x, y});
        PlotOptions o;
        o.log_y = log_y;
        emit_svg_plot(s, path, o);
      },
      py::arg("series"), py::arg("path"), py::arg("log_y") = false);
}
