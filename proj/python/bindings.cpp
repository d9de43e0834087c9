#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dstc/errors.hpp"
#include "dstc/experiment.hpp"
#include "dstc/hybrid_sim.hpp"
#include "dstc/io.hpp"
#include "dstc/stc.hpp"
#include "dstc/synthesis.hpp"
#include "dstc/system.hpp"
#include "dstc/timing.hpp"

namespace py = pybind11;
using namespace dstc;

PYBIND11_MODULE(_dstc, m) {
    m.doc() = "dynamic self-triggered control core";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NoSolutionError>(m, "NoSolutionError", PyExc_RuntimeError);
    py::register_exception<RegionViolation>(m, "RegionViolation", PyExc_RuntimeError);
    py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SynthesisError>(m, "SynthesisError", PyExc_RuntimeError);

    m.def("t_max", &t_max, py::arg("gamma"), py::arg("lambda_cap"));
    m.def("t_tilde_max", &t_tilde_max, py::arg("lam"), py::arg("gamma"), py::arg("lambda_cap"));
    m.def("solve_lambda_for_horizon", &solve_lambda_for_horizon, py::arg("h"), py::arg("gamma"),
          py::arg("lambda_cap"));

    py::class_<PhiSolution>(m, "PhiSolution")
        .def_property_readonly("lam", &PhiSolution::lam)
        .def_property_readonly("gamma", &PhiSolution::gamma)
        .def_property_readonly("lambda_cap", &PhiSolution::lambda_cap)
        .def_property_readonly("horizon", &PhiSolution::horizon)
        .def("__call__", &PhiSolution::evaluate, py::arg("tau"));
    m.def("phi_solve", &phi_solve, py::arg("lam"), py::arg("gamma"), py::arg("lambda_cap"));

    py::class_<SystemSpec>(m, "SystemSpec")
        .def_readonly("name", &SystemSpec::name)
        .def_readonly("state_dim", &SystemSpec::state_dim)
        .def_readonly("error_dim", &SystemSpec::error_dim)
        .def_readonly("region_c", &SystemSpec::region_c)
        .def_readonly("x_radius", &SystemSpec::x_radius)
        .def_readonly("e_radius", &SystemSpec::e_radius)
        .def("f", [](const SystemSpec& s, const Vector& x, const Vector& e) { return eval_f(s, x, e); })
        .def("v", [](const SystemSpec& s, const Vector& x) { return s.v(x); })
        .def("w", [](const SystemSpec& s, const Vector& e) { return s.w(e); })
        .def("in_region", [](const SystemSpec& s, const Vector& x) { return in_region(s, x); });
    m.def("van_der_pol", py::overload_cast<>(&van_der_pol));
    m.def("linear_test", &linear_test, py::arg("dim") = 1, py::arg("c") = 1.0);
    m.def(
        "system_from_json", [](const std::string& text) { return system_from_json(json::parse(text)); },
        py::arg("text"));

    py::class_<ParameterSet>(m, "ParameterSet")
        .def(py::init([](double eps, double gamma, double l) {
                 ParameterSet ps;
                 ps.epsilon = eps;
                 ps.gamma = gamma;
                 ps.l_const = l;
                 return ps;
             }),
             py::arg("epsilon"), py::arg("gamma"), py::arg("l_const") = 0.05)
        .def_readwrite("epsilon", &ParameterSet::epsilon)
        .def_readwrite("gamma", &ParameterSet::gamma)
        .def_readwrite("l_const", &ParameterSet::l_const)
        .def_readwrite("margin", &ParameterSet::margin)
        .def_readwrite("grid_density", &ParameterSet::grid_density)
        .def("__repr__", [](const ParameterSet& ps) {
            std::ostringstream os;
            os << "ParameterSet(epsilon=" << ps.epsilon << ", gamma=" << ps.gamma << ", l_const=" << ps.l_const
               << ")";
            return os.str();
        });

    py::class_<ParameterFamily>(m, "ParameterFamily")
        .def(py::init([](std::vector<ParameterSet> sets, std::size_t fb) {
                 ParameterFamily f{std::move(sets), fb};
                 f.validate();
                 return f;
             }),
             py::arg("sets"), py::arg("fallback_index") = 0)
        .def_readonly("sets", &ParameterFamily::sets)
        .def_readonly("fallback_index", &ParameterFamily::fallback_index)
        .def("t_min", &ParameterFamily::t_min, py::arg("delta"))
        .def("to_json", [](const ParameterFamily& f) { return family_to_json(f).dump(); });

    py::class_<AssumptionReport>(m, "AssumptionReport")
        .def_readonly("max_residual", &AssumptionReport::max_residual)
        .def_readonly("scale", &AssumptionReport::scale)
        .def_readonly("points", &AssumptionReport::points)
        .def_readonly("certified", &AssumptionReport::certified)
        .def_readonly("w_bound_holds", &AssumptionReport::w_bound_holds)
        .def("certified_within", &AssumptionReport::certified_within, py::arg("rel_tol"));

    m.def("verify_assumption", &verify_assumption, py::arg("spec"), py::arg("ps"), py::arg("grid_density"),
          py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());
    m.def("synthesize_gamma", &synthesize_gamma, py::arg("spec"), py::arg("epsilon"), py::arg("l_const"),
          py::arg("grid_density"), py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());
    m.def(
        "build_family",
        [](const SystemSpec& spec, const std::vector<double>& eps, double l, int density, int jobs) {
            return build_family(spec, eps, l, density, jobs);
        },
        py::arg("spec"), py::arg("epsilons"), py::arg("l_const") = 0.05, py::arg("grid_density") = 24,
        py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());
    m.def("log_spaced_epsilons", &log_spaced_epsilons, py::arg("fallback_eps"), py::arg("count"),
          py::arg("most_negative"));

    py::enum_<BoundType>(m, "BoundType")
        .value("window", BoundType::window)
        .value("fallback", BoundType::fallback)
        .value("none", BoundType::none);

    py::class_<StcConfig>(m, "StcConfig")
        .def(py::init([](ParameterFamily family, double delta, double eps_ref, int m_len, double c) {
                 StcConfig cfg;
                 cfg.family = std::move(family);
                 cfg.delta = delta;
                 cfg.eps_ref = eps_ref;
                 cfg.m = m_len;
                 cfg.c = c;
                 cfg.validate();
                 return cfg;
             }),
             py::arg("family"), py::arg("delta") = 0.999, py::arg("eps_ref") = 0.01, py::arg("m") = 30,
             py::arg("c") = 10.0)
        .def_readonly("delta", &StcConfig::delta)
        .def_readonly("eps_ref", &StcConfig::eps_ref)
        .def_readonly("m", &StcConfig::m)
        .def_readonly("c", &StcConfig::c)
        .def("t_min", &StcConfig::t_min)
        .def("t_cap", &StcConfig::t_cap);

    py::class_<TriggerDecision>(m, "TriggerDecision")
        .def_readonly("h", &TriggerDecision::h)
        .def_readonly("set_index", &TriggerDecision::set_index)
        .def_readonly("used_fallback", &TriggerDecision::used_fallback)
        .def_readonly("lambda_cap_used", &TriggerDecision::lambda_cap_used)
        .def_readonly("bound_type", &TriggerDecision::bound_type)
        .def_readonly("v", &TriggerDecision::v)
        .def_readonly("c_val", &TriggerDecision::c_val);

    m.def("window_average_c",
          [](double v, std::vector<double> eta, double c, int m_len) {
              return window_average_c(v, DynamicVariable{std::move(eta)}, c, m_len);
          },
          py::arg("v_now"), py::arg("eta"), py::arg("c"), py::arg("m"));
    m.def("interval_for_set", &interval_for_set, py::arg("v_now"), py::arg("c_val"), py::arg("ps"),
          py::arg("delta"), py::arg("eps_ref"));
    m.def("decide_interval", &decide_interval, py::arg("v_now"), py::arg("c_val"), py::arg("cfg"));

    py::class_<HybridTrajectory>(m, "HybridTrajectory")
        .def_readonly("mechanism", &HybridTrajectory::mechanism)
        .def_readonly("t_min", &HybridTrajectory::t_min)
        .def_readonly("t_cap", &HybridTrajectory::t_cap)
        .def_property_readonly("sample_times",
                               [](const HybridTrajectory& t) {
                                   std::vector<double> out;
                                   for (const auto& s : t.samples) out.push_back(s.t);
                                   return out;
                               })
        .def_property_readonly("sample_values",
                               [](const HybridTrajectory& t) {
                                   std::vector<double> out;
                                   for (const auto& s : t.samples) out.push_back(s.v);
                                   return out;
                               })
        .def_property_readonly("intervals",
                               [](const HybridTrajectory& t) {
                                   std::vector<double> out;
                                   for (const auto& d : t.decisions) out.push_back(d.h);
                                   return out;
                               })
        .def("violation_count", &HybridTrajectory::violation_count)
        .def("samples_before", &HybridTrajectory::samples_before, py::arg("t"));

    m.def("simulate", &simulate, py::arg("x0"), py::arg("cfg"), py::arg("spec"), py::arg("t_end"),
          py::arg("dt_flow"), py::call_guard<py::gil_scoped_release>());
    m.def("simulate_periodic", &simulate_periodic, py::arg("x0"), py::arg("spec"), py::arg("period"),
          py::arg("t_end"), py::arg("dt_flow"), py::call_guard<py::gil_scoped_release>());

    m.def(
        "run_command",
        [](const std::string& command, const std::string& config, std::optional<std::string> out, int jobs,
           std::uint64_t seed) {
            CommandOptions opt;
            opt.out = std::move(out);
            opt.jobs = jobs;
            opt.seed = seed;
            std::ostringstream o;
            std::ostringstream e;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_command(command, config, opt, o, e);
            }
            return py::make_tuple(code, o.str(), e.str());
        },
        py::arg("command"), py::arg("config"), py::arg("out") = py::none(), py::arg("jobs") = 1,
        py::arg("seed") = 0);
}
