// Python module mimome._core: sampling, rate functionals, the per-antenna
// solver and the property suite. Covariances cross the boundary as complex
// numpy arrays and are made exactly Hermitian on entry.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mimome/channel.hpp"
#include "mimome/errors.hpp"
#include "mimome/oracle.hpp"
#include "mimome/rates.hpp"
#include "mimome/solver.hpp"

namespace py = pybind11;
using namespace mimome;

namespace {

HermitianMatrix herm(const ComplexMatrix& m) { return HermitianMatrix(m); }

py::dict estimate(const RateEstimate& e) {
    py::dict d;
    d["mean"] = e.mean;
    d["std_err"] = e.std_err;
    d["n_samples"] = e.n_samples;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Ergodic secrecy rates of Rayleigh MIMOME wiretap channels (nats)";

    static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
    static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ValueError);
    static py::exception<ConstraintError> constraint_error(m, "ConstraintError", PyExc_ValueError);
    static py::exception<SolverError> solver_error(m, "SolverError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InputError& e) {
            py::set_error(input_error, e.what());
        } catch (const DomainError& e) {
            py::set_error(domain_error, e.what());
        } catch (const ConstraintError& e) {
            py::set_error(constraint_error, e.what());
        } catch (const SolverError& e) {
            py::set_error(solver_error, e.what());
        }
    });

    py::class_<ChannelSpec>(m, "ChannelSpec")
        .def(py::init([](std::size_t n_t, std::size_t n_r, std::size_t n_e, double sigma_h2, double sigma_g2) {
                 ChannelSpec s{n_t, n_r, n_e, sigma_h2, sigma_g2};
                 s.validate();
                 return s;
             }),
             py::arg("n_t"), py::arg("n_r"), py::arg("n_e"), py::arg("sigma_h2") = 4.0, py::arg("sigma_g2") = 1.0)
        .def_readonly("n_t", &ChannelSpec::n_t)
        .def_readonly("n_r", &ChannelSpec::n_r)
        .def_readonly("n_e", &ChannelSpec::n_e)
        .def_readonly("sigma_h2", &ChannelSpec::sigma_h2)
        .def_readonly("sigma_g2", &ChannelSpec::sigma_g2)
        .def("__eq__", [](const ChannelSpec& a, const ChannelSpec& b) { return a == b; })
        .def("__repr__", [](const ChannelSpec& s) {
            std::ostringstream os;
            os << "ChannelSpec(n_t=" << s.n_t << ", n_r=" << s.n_r << ", n_e=" << s.n_e << ", sigma_h2=" << s.sigma_h2
               << ", sigma_g2=" << s.sigma_g2 << ")";
            return os.str();
        });

    py::class_<SampleSet>(m, "SampleSet")
        .def_property_readonly("spec", &SampleSet::spec)
        .def_property_readonly("seed", &SampleSet::seed)
        .def("__len__", &SampleSet::size)
        .def("h", [](const SampleSet& s, std::size_t k) { return s.draws().at(k).h; })
        .def("g", [](const SampleSet& s, std::size_t k) { return s.draws().at(k).g; })
        .def("__eq__", [](const SampleSet& a, const SampleSet& b) { return a == b; });

    m.def("sample", &sample, py::arg("spec"), py::arg("count"), py::arg("seed"),
          "Seeded ensemble of (H, G) draws; draw k depends only on (seed, k).");

    m.def("secrecy_rate", [](const ComplexMatrix& s, const SampleSet& x) { return estimate(secrecy_rate(herm(s), x)); },
          py::arg("sigma"), py::arg("samples"));
    m.def("transformed_rate",
          [](const ComplexMatrix& s, const SampleSet& x) { return estimate(transformed_rate(herm(s), x)); },
          py::arg("sigma"), py::arg("samples"));
    m.def("capacity_total",
          [](const ChannelSpec& spec, double p, const SampleSet& x) { return estimate(capacity_total(spec, p, x)); },
          py::arg("spec"), py::arg("p"), py::arg("samples"));
    m.def(
        "capacity_misose_per_antenna",
        [](const ChannelSpec& spec, const std::vector<double>& p, const SampleSet& x) {
            return estimate(capacity_misose_per_antenna(spec, p, x));
        },
        py::arg("spec"), py::arg("p"), py::arg("samples"));

    m.def("barrier_objective",
          [](const ComplexMatrix& s, double t, const SampleSet& x) { return barrier_objective(herm(s), t, x); },
          py::arg("sigma"), py::arg("t"), py::arg("samples"));
    m.def("gradient", [](const ComplexMatrix& s, double t, const SampleSet& x) { return gradient(herm(s), t, x); },
          py::arg("sigma"), py::arg("t"), py::arg("samples"));
    m.def("hessian", [](const ComplexMatrix& s, double t, const SampleSet& x) { return hessian(herm(s), t, x); },
          py::arg("sigma"), py::arg("t"), py::arg("samples"));

    m.def(
        "optimize",
        [](const ChannelSpec& spec, const std::vector<double>& p, const SampleSet& x, double epsilon,
           std::size_t max_newton_iters) {
            SolverConfig cfg;
            cfg.epsilon = epsilon;
            cfg.inner_residual_tol = epsilon;
            cfg.max_newton_iters = max_newton_iters;
            const auto res = optimize(spec, p, x, cfg);
            py::dict d;
            d["sigma"] = res.state.sigma.matrix();
            d["objective"] = res.objective;
            d["rate"] = estimate(res.rate);
            d["gap"] = res.state.gap;
            d["t"] = res.state.t;
            d["newton_steps"] = res.newton_steps;
            d["stage_objectives"] = res.stage_objectives;
            py::list trace;
            for (const auto& r : res.trace)
                trace.append(py::make_tuple(r.iter, r.t, r.residual, r.objective, r.step));
            d["trace"] = trace;
            return d;
        },
        py::arg("spec"), py::arg("p"), py::arg("samples"), py::arg("epsilon") = 1e-4,
        py::arg("max_newton_iters") = 200,
        "Per-antenna power solver; trace rows are (iter, t, residual, objective, step).");

    m.def(
        "property_suite",
        [](const ChannelSpec& spec, double p, const SampleSet& x, std::size_t trials) {
            const auto report = property_suite(spec, PowerBudget::total(p), x, trials);
            py::list out;
            for (const auto& r : report.results) {
                py::dict d;
                d["property"] = r.property;
                d["trials"] = r.trials;
                d["worst_margin"] = r.worst_margin;
                d["statistical"] = r.statistical;
                d["pass"] = r.pass;
                d["detail"] = r.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("spec"), py::arg("p"), py::arg("samples"), py::arg("trials") = 50);

    m.def("scalar_quadrature_rate", &scalar_quadrature_rate, py::arg("a_h"), py::arg("a_g"),
          py::arg("tolerance") = 1e-12);
    m.def("scalar_closed_form_rate", &scalar_closed_form_rate, py::arg("a_h"), py::arg("a_g"));
}
