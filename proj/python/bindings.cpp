#include "nozzle/boundary.hpp"
#include "nozzle/config.hpp"
#include "nozzle/errors.hpp"
#include "nozzle/euler.hpp"
#include "nozzle/gas.hpp"
#include "nozzle/potential.hpp"
#include "nozzle/verify.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace nozzle;

namespace {

py::array_t<double> to_numpy(const ScalarField& f) {
    const Grid& g = f.grid;
    py::array_t<double> out({g.n1, g.n2, g.n3});
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

py::array_t<double> to_numpy(const VectorField& f) {
    const Grid& g = f.grid;
    py::array_t<double> out({3, g.n1, g.n2, g.n3});
    double* p = out.mutable_data();
    for (int c = 0; c < 3; ++c) p = std::copy(f[c].values.begin(), f[c].values.end(), p);
    return out;
}

py::array_t<double> to_numpy(const PlaneField& f) {
    py::array_t<double> out({f.n2, f.n3});
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

py::dict potential_dict(const GasModel& gas, const PotentialSolution& s) {
    py::dict d;
    d["phi"] = to_numpy(s.phi);
    d["u"] = to_numpy(s.u);
    d["rho"] = to_numpy(s.rho);
    d["theta"] = s.theta;
    d["m"] = s.m;
    d["max_speed_sq"] = s.max_speed_sq;
    d["max_mach"] = max_mach(gas, s);
    d["min_u1"] = check_positivity_u1(s.u).min_u1;
    d["picard_iters"] = s.picard_iters;
    d["history"] = s.history;
    return d;
}

}  // namespace

PYBIND11_MODULE(_nozzle, m) {
    m.doc() = "Steady subsonic nozzle flow: gas model, potential flow, critical flux, Euler fixed point";

    static py::exception<Error> base(m, "NozzleError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InvalidDataError>(m, "InvalidDataError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
    py::register_exception<OutOfRangeError>(m, "OutOfRangeError", base.ptr());

    py::class_<GasModel>(m, "GasModel")
        .def(py::init([](double gamma, double A, double B) {
                 GasModel g{gamma, A, B};
                 g.validate();
                 return g;
             }),
             py::arg("gamma") = 2.0, py::arg("entropy_const") = 0.5, py::arg("bernoulli_const") = 1.5)
        .def_readonly("gamma", &GasModel::gamma)
        .def_readonly("entropy_const", &GasModel::entropy_const)
        .def_readonly("bernoulli_const", &GasModel::bernoulli_const)
        .def("pressure", &GasModel::pressure)
        .def("enthalpy", &GasModel::enthalpy)
        .def("density_from_enthalpy", &GasModel::density_from_enthalpy);

    m.def("sound_speed", &sound_speed, py::arg("gas"), py::arg("rho"));
    m.def("density_from_speed", &density_from_speed, py::arg("gas"), py::arg("q_sq"), py::arg("bernoulli"));
    m.def("critical_speed", &critical_speed, py::arg("gas"), py::arg("bernoulli"));
    m.def("mass_flux", &mass_flux, py::arg("gas"), py::arg("q"), py::arg("bernoulli"));
    m.def("subsonic_speed_from_flux", &subsonic_speed_from_flux, py::arg("gas"), py::arg("flux"), py::arg("bernoulli"));
    m.def(
        "truncated_density",
        [](const GasModel& gas, int mm, double q_sq) {
            Truncation t{mm};
            t.validate();
            return truncated_density(gas, t, q_sq);
        },
        py::arg("gas"), py::arg("m"), py::arg("q_sq"));

    py::class_<Grid>(m, "Grid")
        .def(py::init(&Grid::make), py::arg("L") = 1.0, py::arg("n1") = 17, py::arg("n2") = 17, py::arg("n3") = 17)
        .def_readonly("L", &Grid::L)
        .def_readonly("n1", &Grid::n1)
        .def_readonly("n2", &Grid::n2)
        .def_readonly("n3", &Grid::n3)
        .def_property_readonly("shape", [](const Grid& g) { return py::make_tuple(g.n1, g.n2, g.n3); });

    py::class_<BoundaryData>(m, "BoundaryData")
        .def_property_readonly("f_minus", [](const BoundaryData& d) { return to_numpy(d.f_minus); })
        .def_property_readonly("f_plus", [](const BoundaryData& d) { return to_numpy(d.f_plus); })
        .def_property_readonly("kappa", [](const BoundaryData& d) { return to_numpy(d.kappa); })
        .def_property_readonly("B0", [](const BoundaryData& d) { return to_numpy(d.B0); })
        .def("compatibility_defect", &BoundaryData::compatibility_defect)
        .def("validate", &BoundaryData::validate, py::arg("tol_compat") = 1e-12)
        .def("mirror_x2", [](const BoundaryData& d) { return mirror_x2(d); });

    m.def(
        "boundary_family",
        [](const Grid& g, double a2, double a3, double eps_kappa, double eps_b, double theta_bar, double bernoulli) {
            return boundary_family(g, BoundaryFamilyParams{a2, a3, eps_kappa, eps_b, theta_bar}, bernoulli);
        },
        py::arg("grid"), py::arg("a2") = 0.0, py::arg("a3") = 0.0, py::arg("eps_kappa") = 0.0, py::arg("eps_b") = 0.0,
        py::arg("theta_bar") = 1.0, py::arg("bernoulli") = 1.5);

    m.def(
        "solve_potential",
        [](const GasModel& gas, const BoundaryData& data, double theta, int mm, double tol, double relax) {
            PotentialSolution s;
            {
                py::gil_scoped_release release;
                PicardOptions opts;
                opts.tol = tol;
                opts.relax = relax;
                s = solve_potential(gas, data, theta, mm, opts);
            }
            return potential_dict(gas, s);
        },
        py::arg("gas"), py::arg("data"), py::arg("theta"), py::arg("m") = 10, py::arg("tol") = 1e-9,
        py::arg("relax") = 0.7);

    m.def(
        "find_critical_theta",
        [](const GasModel& gas, const BoundaryData& data, int mm, double bis_tol) {
            CriticalThetaResult r;
            {
                py::gil_scoped_release release;
                CriticalOptions opts;
                opts.bis_tol = bis_tol;
                r = find_critical_theta(gas, data, mm, opts);
            }
            py::dict d;
            d["m"] = r.m;
            d["theta_star"] = r.theta_star;
            d["bracket"] = py::make_tuple(r.bracket.first, r.bracket.second);
            d["open"] = r.open;
            py::list trace;
            for (const auto& s : r.mach_trace) trace.append(py::make_tuple(s.theta, s.mach_max, s.converged));
            d["mach_trace"] = trace;
            return d;
        },
        py::arg("gas"), py::arg("data"), py::arg("m"), py::arg("bis_tol") = 1e-3);

    m.def(
        "run_euler",
        [](const BoundaryData& data, const GasModel& gas, double fp_tol, int max_outer) {
            EulerSolution s;
            EulerResiduals res;
            {
                py::gil_scoped_release release;
                EulerConfig cfg;
                cfg.fp_tol = fp_tol;
                cfg.max_outer = max_outer;
                s = run_euler(data, gas, cfg);
                res = verify_euler_residuals(s, data);
            }
            py::dict d;
            d["u"] = to_numpy(s.u);
            d["rho"] = to_numpy(s.rho);
            d["B"] = to_numpy(s.B);
            d["omega"] = to_numpy(s.omega);
            d["W"] = to_numpy(s.W);
            d["phi"] = to_numpy(s.phi);
            d["history"] = s.history;
            d["converged"] = s.converged;
            d["iterations"] = s.iterations;
            py::dict r;
            const auto names = EulerResiduals::names();
            for (int c = 0; c < EulerResiduals::kCount; ++c)
                r[names[c]] = py::dict(py::arg("max") = res.max[c], py::arg("rms") = res.rms[c]);
            d["residuals"] = r;
            return d;
        },
        py::arg("data"), py::arg("gas") = GasModel{}, py::arg("fp_tol") = 1e-8, py::arg("max_outer") = 30);

    m.def(
        "verify_battery",
        [](const std::string& level) {
            BatteryResult res;
            {
                py::gil_scoped_release release;
                BatteryOptions opts;
                opts.level = level;
                res = verify_battery(opts);
            }
            py::list rows;
            for (const auto& r : res.rows)
                rows.append(py::dict(py::arg("module") = r.module, py::arg("oracle") = r.oracle,
                                     py::arg("observed") = r.observed, py::arg("required") = r.required(),
                                     py::arg("pass") = r.pass));
            return rows;
        },
        py::arg("level") = "quick");

    m.def(
        "parse_config", [](const std::string& text) { return echo_config(parse_config(text)); }, py::arg("text"),
        "Validates a config and returns its canonical echo.");
}
