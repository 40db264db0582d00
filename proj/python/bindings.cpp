#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "resorb/coefficient.hpp"
#include "resorb/errors.hpp"
#include "resorb/kepler.hpp"
#include "resorb/levi_civita.hpp"
#include "resorb/series.hpp"
#include "resorb/verifier.hpp"

namespace py = pybind11;
using namespace resorb;

PYBIND11_MODULE(_resorb, m) {
    m.doc() = "Resonance stability coefficients of restricted three-body periodic orbits";
    m.attr("__version__") = RESORB_VERSION;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<CollisionError>(m, "CollisionError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

    py::class_<DelaunayState>(m, "DelaunayState")
        .def(py::init<double, double, double, double>(), py::arg("L"), py::arg("G"), py::arg("l"), py::arg("g"))
        .def_readwrite("L", &DelaunayState::L)
        .def_readwrite("G", &DelaunayState::G)
        .def_readwrite("l", &DelaunayState::l)
        .def_readwrite("g", &DelaunayState::g);

    py::class_<PolarState>(m, "PolarState")
        .def(py::init<double, double, double, double>(), py::arg("R"), py::arg("G"), py::arg("r"), py::arg("theta"))
        .def_readwrite("R", &PolarState::R)
        .def_readwrite("G", &PolarState::G)
        .def_readwrite("r", &PolarState::r)
        .def_readwrite("theta", &PolarState::theta);

    py::class_<RtbpState>(m, "RtbpState")
        .def(py::init<double, double, double, double>(), py::arg("px"), py::arg("py"), py::arg("x"), py::arg("y"))
        .def_readwrite("px", &RtbpState::px)
        .def_readwrite("py", &RtbpState::py)
        .def_readwrite("x", &RtbpState::x)
        .def_readwrite("y", &RtbpState::y);

    py::class_<ResonantFamily>(m, "ResonantFamily")
        .def(py::init([](int p, int q, double e, int n_l, int n_g, const std::string& dir) {
                 return ResonantFamily::make(p, q, e, n_l, n_g, direction_from_string(dir));
             }),
             py::arg("p"), py::arg("q"), py::arg("e"), py::arg("n_l") = 0, py::arg("n_g") = 0,
             py::arg("direction") = "direct")
        .def_readonly("p", &ResonantFamily::p)
        .def_readonly("q", &ResonantFamily::q)
        .def_readonly("e", &ResonantFamily::e)
        .def_readonly("n_l", &ResonantFamily::n_l)
        .def_readonly("n_g", &ResonantFamily::n_g)
        .def_property_readonly("direction", [](const ResonantFamily& f) { return to_string(f.direction); })
        .def("__repr__", &ResonantFamily::label);

    py::class_<CoefficientResult>(m, "CoefficientResult")
        .def_readonly("C", &CoefficientResult::C)
        .def_readonly("C1", &CoefficientResult::C1)
        .def_readonly("C2", &CoefficientResult::C2)
        .def_readonly("nodes", &CoefficientResult::nodes)
        .def_readonly("err_estimate", &CoefficientResult::err_estimate)
        .def_readonly("min_delta1", &CoefficientResult::min_delta1);

    py::class_<LeadingCoefficient>(m, "LeadingCoefficient")
        .def_readonly("exponent", &LeadingCoefficient::exponent)
        .def_readonly("value", &LeadingCoefficient::value)
        .def_readonly("c1_part", &LeadingCoefficient::c1_part)
        .def_readonly("c2_part", &LeadingCoefficient::c2_part);

    m.def("solve_kepler", &solve_kepler<double>, py::arg("l"), py::arg("e"));
    m.def("true_anomaly", &true_anomaly<double>, py::arg("E"), py::arg("e"));
    m.def("delaunay_to_polar", &delaunay_to_polar);
    m.def("polar_to_delaunay", &polar_to_delaunay);
    m.def("polar_to_cartesian_rotating", &polar_to_cartesian_rotating);
    m.def("cartesian_rotating_to_polar", &cartesian_rotating_to_polar);

    m.def(
        "canonical_families",
        [](int p, int q, double e, const std::string& dir) {
            const auto f = canonical_families(p, q, e, direction_from_string(dir));
            return std::vector<ResonantFamily>(f.begin(), f.end());
        },
        py::arg("p"), py::arg("q"), py::arg("e"), py::arg("direction") = "direct");
    m.def("compute_C", &compute_C, py::arg("family"), py::arg("tol") = kDefaultQuadratureTol,
          py::call_guard<py::gil_scoped_release>());
    m.def("min_delta1", &min_delta1);
    m.def("leading_coefficient", &leading_coefficient);
    m.def(
        "coefficient_series",
        [](const ResonantFamily& f, int order) {
            const auto s = coefficient_series(f, order);
            return py::dict(py::arg("C") = s.C, py::arg("C1") = s.C1, py::arg("C2") = s.C2);
        },
        py::arg("family"), py::arg("order"));
    m.def("laplace_b", &laplace_b, py::arg("n"), py::arg("alpha"), py::arg("deriv_order") = 0);
    m.def("bessel_j", &bessel_j, py::arg("k"), py::arg("x"));

    m.def(
        "multiplier_estimate",
        [](const ResonantFamily& f, double mu) {
            PeriodicOrbit o;
            MonodromyReport r;
            {
                py::gil_scoped_release release;
                o = refine_periodic_orbit(f, mu);
                r = monodromy(o);
            }
            return py::dict(py::arg("C_estimate") = r.C_estimate, py::arg("trace") = r.trace,
                            py::arg("determinant") = r.determinant, py::arg("period") = o.period,
                            py::arg("x0") = o.initial.x, py::arg("hyperbolic") = r.hyperbolic);
        },
        py::arg("family"), py::arg("mu"));

    m.def(
        "lc_forward",
        [](const RtbpState& s, double mu) {
            const auto r = lc_forward(s, mu);
            return py::make_tuple(r.p_xi, r.p_nu, r.xi, r.nu, r.C_J);
        },
        py::arg("state"), py::arg("mu"), "Returns (p_xi, p_nu, xi, nu, C_J).");
    m.def(
        "lc_inverse",
        [](double p_xi, double p_nu, double xi, double nu, double mu) {
            return lc_inverse(RegularizedState{p_xi, p_nu, xi, nu, 0.0}, mu);
        },
        py::arg("p_xi"), py::arg("p_nu"), py::arg("xi"), py::arg("nu"), py::arg("mu"));
    m.def(
        "action_angle",
        [](double p_xi, double p_nu, double xi, double nu, double C) {
            const auto a = action_angle_from_state(RegularizedState{p_xi, p_nu, xi, nu, C});
            return py::dict(py::arg("L") = a.L, py::arg("G") = a.G, py::arg("l") = a.l, py::arg("g") = a.g,
                            py::arg("a") = a.a, py::arg("e") = a.e, py::arg("L_star") = a.L_star);
        },
        py::arg("p_xi"), py::arg("p_nu"), py::arg("xi"), py::arg("nu"), py::arg("C"));
}
