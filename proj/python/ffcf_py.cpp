#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ffcf/harness.hpp"

namespace py = pybind11;
using namespace ffcf;
using namespace ffcf::harness;

namespace {

std::vector<std::string> quotient_strings(const CFExpansion& cf) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < cf.certified && i < cf.b.size(); ++i) out.push_back(cf.b[i].str());
    return out;
}

}  // namespace

PYBIND11_MODULE(_ffcf, m) {
    m.doc() = "Continued fractions and counting over F_q((1/X))";
    m.attr("__version__") = std::string(kVersion);

    static py::exception<Error> error_type(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            py::object pos = py::int_(e.position());
            PyErr_SetObject(error_type.ptr(),
                            py::make_tuple(std::string(error_name(e.code())), e.what(), pos).ptr());
        } catch (const Error& e) {
            PyErr_SetObject(error_type.ptr(),
                            py::make_tuple(std::string(error_name(e.code())), e.what(), py::none()).ptr());
        }
    });

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("q", &RunConfig::q)
        .def_readwrite("p", &RunConfig::p)
        .def_readwrite("r", &RunConfig::r)
        .def_readwrite("modulus", &RunConfig::modulus)
        .def_readwrite("alpha", &RunConfig::alpha)
        .def_readwrite("form", &RunConfig::form)
        .def_readwrite("precision", &RunConfig::precision)
        .def_readwrite("n", &RunConfig::n)
        .def_readwrite("m", &RunConfig::m)
        .def_readwrite("e_k", &RunConfig::e_k)
        .def_readwrite("R", &RunConfig::R)
        .def_readwrite("R_min", &RunConfig::R_min)
        .def_readwrite("depth", &RunConfig::depth)
        .def_readwrite("samples", &RunConfig::samples)
        .def_readwrite("levels", &RunConfig::levels)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("budget", &RunConfig::budget)
        .def_readwrite("threads", &RunConfig::threads)
        .def_readwrite("allow_rational", &RunConfig::allow_rational);

    m.def(
        "run_json",
        [](const std::string& command, const RunConfig& cfg) {
            Report rep;
            {
                py::gil_scoped_release release;
                rep = run_command(command, cfg);
            }
            return rep.render(Format::Json);
        },
        py::arg("command"), py::arg("config"), "Run a subcommand and return its JSON report.");

    m.def(
        "cf_expand",
        [](std::uint64_t q, const std::string& alpha, std::size_t n, std::int64_t precision, std::uint64_t seed) {
            return quotient_strings(expansion_of(FieldSpec::from_q(q), alpha, precision, n, seed));
        },
        py::arg("q"), py::arg("alpha"), py::arg("n") = 20, py::arg("precision") = 64, py::arg("seed") = 0,
        "Certified partial quotients of a value literal.");

    m.def(
        "is_convergent",
        [](std::uint64_t q, const std::string& alpha, const std::string& s, const std::string& t,
           std::int64_t precision) {
            const FieldSpec F = FieldSpec::from_q(q);
            return ffcf::is_convergent(parse_value(F, alpha, precision), Poly::parse(F, s), Poly::parse(F, t));
        },
        py::arg("q"), py::arg("alpha"), py::arg("s"), py::arg("t"), py::arg("precision") = 64);

    m.def(
        "measure_H",
        [](std::uint64_t q, std::int64_t m_, std::int64_t e_k, std::int64_t R) {
            return to_string(ffcf::measure_H(Thresholds::make(m_, e_k, R), FieldSpec::from_q(q)).value);
        },
        py::arg("q"), py::arg("m"), py::arg("e_k"), py::arg("R"), "Exact measure as a fraction string.");

    m.def(
        "count_G",
        [](std::uint64_t q, const std::string& form, std::int64_t m_, std::int64_t e_k, std::int64_t R,
           std::uint64_t budget, std::int64_t precision) {
            const FieldSpec F = FieldSpec::from_q(q);
            const IsotropicForm f = form.starts_with("form:") ? parse_form(F, form, precision)
                                                                : IsotropicForm::from_alpha(parse_value(F, form, precision));
            py::gil_scoped_release release;
            return count_G_bruteforce(f, Thresholds::make(m_, e_k, R), budget);
        },
        py::arg("q"), py::arg("form"), py::arg("m"), py::arg("e_k"), py::arg("R"), py::arg("budget") = kDefaultBudget,
        py::arg("precision") = 128, "Brute-force count for a form literal or for (1, -alpha, 0, -1).");

    m.def(
        "count_Gprime",
        [](std::uint64_t q, const std::string& alpha, std::int64_t m_, std::int64_t e_k, std::int64_t R,
           std::size_t quotients, std::int64_t precision) {
            const CFExpansion cf = expansion_of(FieldSpec::from_q(q), alpha, precision, quotients);
            return ffcf::count_Gprime(cf, Thresholds::make(m_, e_k, R));
        },
        py::arg("q"), py::arg("alpha"), py::arg("m"), py::arg("e_k"), py::arg("R"), py::arg("quotients") = 64,
        py::arg("precision") = 256);

    m.def("exit_code", [](const std::string& code) {
        for (int c = 0; c <= static_cast<int>(ErrorCode::ParseError); ++c)
            if (error_name(static_cast<ErrorCode>(c)) == code) return exit_code(static_cast<ErrorCode>(c));
        throw py::value_error("unknown error code " + code);
    });
}
